#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "grpcomb/error.hpp"
#include "grpcomb/group.hpp"
#include "grpcomb/rng.hpp"

namespace grpcomb {

namespace {

std::vector<std::string> split(const std::string &s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

uint64_t parse_uint(const std::string &s, const std::string &spec)
{
  require(!s.empty() && std::all_of(s.begin(), s.end(), ::isdigit),
          ErrorCode::invalid_argument, "bad number '" + s + "' in spec " + spec);
  require(s.size() <= 12, ErrorCode::invalid_argument, "number too large in " + spec);
  return std::stoull(s);
}

constexpr uint64_t kHuge = ~0ull >> 2;

uint64_t sat_mul(uint64_t a, uint64_t b)
{
  if (a == 0 || b == 0)
    return 0;
  if (a > kHuge / b)
    return kHuge;
  return a * b;
}

uint64_t sat_pow(uint64_t a, uint64_t e)
{
  uint64_t r = 1;
  while (e--)
    r = sat_mul(r, a);
  return r;
}

uint64_t factorial(uint64_t n)
{
  uint64_t r = 1;
  for (uint64_t i = 2; i <= n; ++i)
    r = sat_mul(r, i);
  return r;
}

struct Parsed {
  std::string kind;
  std::vector<std::string> args;
};

Parsed parse_spec(const std::string &spec)
{
  auto colon = spec.find(':');
  Parsed p;
  p.kind = spec.substr(0, colon);
  if (p.kind == "product") {
    require(colon != std::string::npos, ErrorCode::invalid_argument, "empty product");
    p.args = split(spec.substr(colon + 1), '+');
  } else if (p.kind == "table") {
    require(colon != std::string::npos, ErrorCode::invalid_argument, "table needs a path");
    p.args = {spec.substr(colon + 1)};
  } else if (colon != std::string::npos) {
    p.args = split(spec.substr(colon + 1), ':');
  }
  return p;
}

void need_args(const Parsed &p, size_t lo, size_t hi, const std::string &spec)
{
  require(p.args.size() >= lo && p.args.size() <= hi, ErrorCode::invalid_argument,
          "wrong number of parameters in " + spec);
}

uint64_t gl_order(uint64_t d, uint64_t q)
{
  uint64_t r = 1, qd = sat_pow(q, d);
  for (uint64_t i = 0; i < d; ++i)
    r = sat_mul(r, qd - sat_pow(q, i));
  return r;
}

struct MatFamily {
  int d;
  FieldPtr F;
};

MatFamily mat_family(const Parsed &p, const std::string &spec)
{
  need_args(p, 2, 2, spec);
  uint64_t d = parse_uint(p.args[0], spec), q = parse_uint(p.args[1], spec);
  require(d >= 1 && d <= 8, ErrorCode::invalid_argument, "matrix degree out of range");
  require(q <= 256, ErrorCode::invalid_argument, "matrix groups need q <= 256");
  return {int(d), Field::of_order(uint32_t(q))};
}

Mat transvection(const Field &F, int d, int i, int j, Elt c)
{
  (void)F;
  Mat m = identity(d);
  m(i, j) = c;
  return m;
}

Mat diag_gen(const Field &F, int d, int i)
{
  Mat m = identity(d);
  m(i, i) = F.generator();
  return m;
}

// F_p-basis 1, w, ..., w^{k-1} of F_q
std::vector<Elt> additive_basis(const Field &F)
{
  std::vector<Elt> b;
  for (uint32_t e = 0; e < F.k(); ++e)
    b.push_back(F.exp(e));
  return b;
}

GroupPtr dicyclic(const std::string &spec, uint64_t n)
{
  require(n >= 4 && n % 4 == 0, ErrorCode::invalid_argument,
          "dicyclic order must be a positive multiple of 4");
  Id m = Id(n / 4), r = 2 * m;
  // element a^i x^j has id j*r + i
  std::vector<Id> t(size_t(n) * n);
  for (Id u = 0; u < n; ++u)
    for (Id v = 0; v < n; ++v) {
      Id i = u % r, j = u / r, k = v % r, l = v / r;
      Id e, f;
      if (j == 0) {
        e = (i + k) % r;
        f = l;
      } else {
        e = (i + r - k) % r;
        f = 1 + l;
        if (f == 2) {
          f = 0;
          e = (e + m) % r;
        }
      }
      t[size_t(u) * n + v] = f * r + e;
    }
  return std::make_shared<TableGroup>(spec, Id(n), std::move(t), false);
}

GroupPtr small_dihedral(const std::string &spec, Id n)
{
  // r^i s^j with id j*n + i, for n < 3 where the point action is not faithful
  Id N = 2 * n;
  std::vector<Id> t(size_t(N) * N);
  for (Id u = 0; u < N; ++u)
    for (Id v = 0; v < N; ++v) {
      Id i = u % n, j = u / n, k = v % n, l = v / n;
      Id e = j ? (i + n - k) % n : (i + k) % n;
      t[size_t(u) * N + v] = ((j + l) % 2) * n + e;
    }
  return std::make_shared<TableGroup>(spec, N, std::move(t), false);
}

GroupPtr olshanskii(const std::string &spec, const Parsed &p, uint64_t cap)
{
  need_args(p, 3, 4, spec);
  uint64_t m = parse_uint(p.args[0], spec), k = parse_uint(p.args[1], spec),
           prime = parse_uint(p.args[2], spec), seed = 1;
  if (p.args.size() == 4) {
    const std::string &s = p.args[3];
    require(s.rfind("seed=", 0) == 0, ErrorCode::invalid_argument,
            "expected seed=<n> in " + spec);
    seed = parse_uint(s.substr(5), spec);
  }
  require(is_prime(prime), ErrorCode::invalid_argument, "olshanskii needs a prime");
  require(m >= 1 && k >= 1 && m + k <= 40, ErrorCode::invalid_argument,
          "olshanskii dimensions out of range");
  require(sat_pow(prime, m + k) <= cap, ErrorCode::cap_exceeded,
          "group order exceeds cap " + std::to_string(cap));
  // alternating forms: B_i = U - U^T for uniform strictly-upper U
  Stream rng(seed, 0x6f6c7368);
  std::vector<std::vector<uint32_t>> forms(k, std::vector<uint32_t>(m * m, 0));
  for (auto &B : forms)
    for (uint64_t a = 0; a < m; ++a)
      for (uint64_t b = a + 1; b < m; ++b) {
        uint32_t u = uint32_t(rng.below(prime));
        B[a * m + b] = u;
        B[b * m + a] = uint32_t((prime - u) % prime);
      }
  uint32_t P = uint32_t(prime), K = uint32_t(k), M = uint32_t(m);
  auto cocycle = [forms, P, K, M](const uint32_t *x, const uint32_t *y, uint32_t *z) {
    const uint32_t *v = x + K, *w = y + K;
    for (uint32_t i = 0; i < K; ++i) {
      uint64_t s = 0;
      const auto &B = forms[i];
      for (uint32_t a = 0; a < M; ++a) {
        if (!v[a])
          continue;
        for (uint32_t b = 0; b < M; ++b)
          s += uint64_t(v[a]) * B[a * M + b] * w[b];
      }
      z[i] = uint32_t((z[i] + s) % P);
    }
  };
  std::vector<uint32_t> radices(k + m, P);
  return std::make_shared<TupleGroup>(spec, radices, cocycle);
}

GroupPtr matrix_family(const std::string &spec, const Parsed &p, uint64_t cap)
{
  auto [d, F] = mat_family(p, spec);
  std::vector<Mat> gens;
  auto basis = additive_basis(*F);
  const std::string &kind = p.kind;
  bool upper_only = kind == "borel" || kind == "unipotent";
  if (kind == "gl" || kind == "sl" || upper_only)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (i == j || (upper_only && j < i))
          continue;
        for (Elt c : basis)
          gens.push_back(transvection(*F, d, i, j, c));
      }
  if (kind == "gl" && F->q() > 2)
    gens.push_back(diag_gen(*F, d, 0));
  if ((kind == "borel" || kind == "diagonal" || kind == "monomial") && F->q() > 2)
    for (int i = 0; i < d; ++i)
      gens.push_back(diag_gen(*F, d, i));
  if (kind == "monomial")
    for (int i = 0; i + 1 < d; ++i) {
      Mat s(d, d);
      for (int r = 0; r < d; ++r)
        s(r, r == i ? i + 1 : r == i + 1 ? i : r) = 1;
      gens.push_back(s);
    }
  return std::make_shared<MatrixGroup>(spec, F, d, gens, cap);
}

GroupPtr build(const std::string &spec, uint64_t cap)
{
  Parsed p = parse_spec(spec);
  uint64_t predicted = predicted_order(spec);
  require(predicted <= cap, ErrorCode::cap_exceeded,
          "order of " + spec + " exceeds cap " + std::to_string(cap));

  if (p.kind == "cyclic") {
    need_args(p, 1, 1, spec);
    uint64_t n = parse_uint(p.args[0], spec);
    require(n >= 1, ErrorCode::invalid_argument, "cyclic order must be positive");
    return std::make_shared<TupleGroup>(spec, std::vector<uint32_t>{uint32_t(n)});
  }
  if (p.kind == "abelian") {
    need_args(p, 1, 1, spec);
    std::vector<uint32_t> r;
    for (auto const &s : split(p.args[0], ','))
      r.push_back(uint32_t(parse_uint(s, spec)));
    return std::make_shared<TupleGroup>(spec, r);
  }
  if (p.kind == "dihedral") {
    need_args(p, 1, 1, spec);
    uint64_t n = parse_uint(p.args[0], spec);
    require(n >= 1 && n <= 255, ErrorCode::invalid_argument, "dihedral degree");
    if (n < 3)
      return small_dihedral(spec, Id(n));
    std::vector<uint8_t> rot(n), ref(n);
    for (uint64_t i = 0; i < n; ++i) {
      rot[i] = uint8_t((i + 1) % n);
      ref[i] = uint8_t((n - i) % n);
    }
    return std::make_shared<PermGroup>(spec, int(n),
                                       std::vector<std::vector<uint8_t>>{rot, ref}, cap);
  }
  if (p.kind == "symmetric" || p.kind == "alternating") {
    need_args(p, 1, 1, spec);
    uint64_t n = parse_uint(p.args[0], spec);
    require(n >= 1 && n <= 10, ErrorCode::invalid_argument, "degree out of range");
    std::vector<std::vector<uint8_t>> gens;
    auto idp = [&] {
      std::vector<uint8_t> g(n);
      std::iota(g.begin(), g.end(), 0);
      return g;
    };
    if (p.kind == "symmetric" && n >= 2) {
      auto t = idp();
      std::swap(t[0], t[1]);
      gens.push_back(t);
      auto c = idp();
      for (uint64_t i = 0; i < n; ++i)
        c[i] = uint8_t((i + 1) % n);
      gens.push_back(c);
    }
    if (p.kind == "alternating")
      for (uint64_t i = 2; i < n; ++i) {
        auto c = idp();
        c[0] = 1;
        c[1] = uint8_t(i);
        c[i] = 0;
        gens.push_back(c);
      }
    return std::make_shared<PermGroup>(spec, int(n), gens, cap);
  }
  if (p.kind == "dicyclic") {
    need_args(p, 1, 1, spec);
    return dicyclic(spec, parse_uint(p.args[0], spec));
  }
  if (p.kind == "quaternion") {
    need_args(p, 0, 0, spec);
    return dicyclic(spec, 8);
  }
  if (p.kind == "heisenberg") {
    need_args(p, 1, 1, spec);
    uint64_t q = parse_uint(p.args[0], spec);
    Parsed u{"unipotent", {"3", std::to_string(q)}};
    auto g = matrix_family(spec, u, cap);
    return g;
  }
  if (p.kind == "gl" || p.kind == "sl" || p.kind == "borel" || p.kind == "unipotent" ||
      p.kind == "diagonal" || p.kind == "monomial")
    return matrix_family(spec, p, cap);
  if (p.kind == "olshanskii")
    return olshanskii(spec, p, cap);
  if (p.kind == "product") {
    GroupPtr acc;
    for (auto const &s : p.args) {
      GroupPtr g = build(s, cap);
      acc = acc ? std::make_shared<ProductGroup>(spec, acc, g) : g;
    }
    if (p.args.size() == 1)
      acc = std::make_shared<ProductGroup>(spec, acc, build("cyclic:1", cap));
    return acc;
  }
  if (p.kind == "table") {
    auto g = read_table_group(p.args[0]);
    require(g->order() <= cap, ErrorCode::cap_exceeded, "table exceeds cap");
    return g;
  }
  fail(ErrorCode::invalid_argument, "unknown group spec: " + spec);
}

} // namespace

uint64_t predicted_order(const std::string &spec)
{
  Parsed p = parse_spec(spec);
  auto arg = [&](size_t i) {
    require(i < p.args.size(), ErrorCode::invalid_argument, "missing parameter in " + spec);
    return parse_uint(p.args[i], spec);
  };
  if (p.kind == "cyclic" || p.kind == "dicyclic")
    return arg(0);
  if (p.kind == "quaternion")
    return 8;
  if (p.kind == "abelian") {
    uint64_t n = 1;
    for (auto const &s : split(p.args.at(0), ','))
      n = sat_mul(n, parse_uint(s, spec));
    return n;
  }
  if (p.kind == "dihedral")
    return 2 * arg(0);
  if (p.kind == "symmetric")
    return factorial(arg(0));
  if (p.kind == "alternating")
    return arg(0) <= 1 ? 1 : factorial(arg(0)) / 2;
  if (p.kind == "heisenberg")
    return sat_pow(arg(0), 3);
  if (p.kind == "olshanskii")
    return sat_pow(arg(2), arg(0) + arg(1));
  if (p.kind == "gl" || p.kind == "sl" || p.kind == "borel" || p.kind == "unipotent" ||
      p.kind == "diagonal" || p.kind == "monomial") {
    uint64_t d = arg(0), q = arg(1);
    if (p.kind == "gl")
      return gl_order(d, q);
    if (p.kind == "sl")
      return gl_order(d, q) / (q - 1);
    if (p.kind == "borel")
      return sat_mul(sat_pow(q - 1, d), sat_pow(q, d * (d - 1) / 2));
    if (p.kind == "unipotent")
      return sat_pow(q, d * (d - 1) / 2);
    if (p.kind == "diagonal")
      return sat_pow(q - 1, d);
    return sat_mul(sat_pow(q - 1, d), factorial(d));
  }
  if (p.kind == "product") {
    uint64_t n = 1;
    for (auto const &s : p.args)
      n = sat_mul(n, predicted_order(s));
    return n;
  }
  if (p.kind == "table")
    return 0;
  fail(ErrorCode::invalid_argument, "unknown group spec: " + spec);
}

GroupPtr build_group(const std::string &spec, uint64_t cap) { return build(spec, cap); }

const std::vector<CatalogEntry> &catalog_constructors()
{
  static const std::vector<CatalogEntry> entries = {
    {"cyclic:n", "cyclic group Z/n (tuple backend)"},
    {"abelian:r1,r2,...", "Z/r1 x Z/r2 x ... (tuple backend)"},
    {"dihedral:n", "dihedral group of order 2n acting on n points"},
    {"symmetric:n", "symmetric group on n points"},
    {"alternating:n", "alternating group on n points"},
    {"dicyclic:n", "dicyclic group of order n (n divisible by 4)"},
    {"quaternion", "quaternion group of order 8"},
    {"heisenberg:p", "upper unitriangular 3x3 matrices over F_p"},
    {"gl:d:q", "general linear group GL_d(F_q)"},
    {"sl:d:q", "special linear group SL_d(F_q)"},
    {"borel:d:q", "invertible upper triangular matrices"},
    {"unipotent:d:q", "upper unitriangular matrices"},
    {"diagonal:d:q", "invertible diagonal matrices"},
    {"monomial:d:q", "invertible monomial matrices"},
    {"olshanskii:m:k:p[:seed=s]",
     "central extension of (Z/p)^m by (Z/p)^k through k seeded alternating forms"},
    {"product:S1+S2+...", "direct product of catalog groups"},
    {"table:<path>", "multiplication table file (n, then n rows; id 0 identity)"},
  };
  return entries;
}

std::vector<std::string> test_catalog(uint64_t max_order)
{
  std::vector<std::string> specs;
  for (int n : {1, 2, 3, 4, 5, 6, 7, 8, 9, 12, 16, 25, 27, 35, 55, 64, 101, 128, 251, 499})
    specs.push_back("cyclic:" + std::to_string(n));
  for (int n : {3, 4, 5, 6, 8, 10, 12})
    specs.push_back("dihedral:" + std::to_string(n));
  for (int n : {2, 3, 4, 5})
    specs.push_back("symmetric:" + std::to_string(n));
  for (int n : {3, 4, 5, 6})
    specs.push_back("alternating:" + std::to_string(n));
  for (int n : {8, 12, 16})
    specs.push_back("dicyclic:" + std::to_string(n));
  for (int p : {3, 5, 7})
    specs.push_back("heisenberg:" + std::to_string(p));
  for (const char *s :
       {"gl:2:2", "gl:2:3", "gl:2:4", "gl:3:2", "sl:2:3", "sl:2:5", "sl:2:7", "borel:2:3",
        "unipotent:3:3", "diagonal:2:5", "monomial:2:5", "abelian:2,2", "abelian:2,2,2",
        "abelian:3,3", "abelian:2,4", "abelian:3,3,3", "abelian:2,2,2,2", "abelian:5,5",
        "abelian:3,9", "abelian:2,2,2,2,2", "product:dihedral:4+cyclic:2",
        "product:symmetric:3+cyclic:3", "product:symmetric:3+symmetric:3",
        "product:dicyclic:8+cyclic:3", "product:cyclic:2+alternating:4",
        "olshanskii:3:3:2:seed=1"})
    specs.push_back(s);
  std::vector<std::string> out;
  for (auto const &s : specs)
    if (predicted_order(s) <= max_order)
      out.push_back(s);
  return out;
}

GroupPtr read_table_group(const std::string &path)
{
  std::ifstream in(path);
  require(bool(in), ErrorCode::io, "cannot open " + path);
  uint64_t n;
  require(bool(in >> n), ErrorCode::not_a_group, "missing order line");
  require(n >= 1 && n <= 20000, ErrorCode::cap_exceeded, "table order out of range");
  std::vector<Id> t(n * n);
  for (auto &v : t) {
    int64_t x;
    require(bool(in >> x), ErrorCode::not_a_group, "table truncated");
    require(x >= 0 && uint64_t(x) < n, ErrorCode::not_a_group, "table entry out of range");
    v = Id(x);
  }
  return std::make_shared<TableGroup>("table:" + path, Id(n), std::move(t), true);
}

void write_table_group(const FiniteGroup &g, const std::string &path)
{
  std::ofstream out(path);
  require(bool(out), ErrorCode::io, "cannot write " + path);
  out << g.order() << "\n";
  for (Id x = 0; x < g.order(); ++x) {
    for (Id y = 0; y < g.order(); ++y)
      out << (y ? " " : "") << g.mul(x, y);
    out << "\n";
  }
}

} // namespace grpcomb
