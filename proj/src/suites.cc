#include "grpcomb/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "grpcomb/approx.hpp"
#include "grpcomb/error.hpp"
#include "grpcomb/extract.hpp"
#include "grpcomb/flag.hpp"
#include "grpcomb/gl.hpp"
#include "grpcomb/parallel.hpp"
#include "grpcomb/patterns.hpp"
#include "grpcomb/ramsey.hpp"
#include "grpcomb/rng.hpp"
#include "grpcomb/structure.hpp"

namespace grpcomb {

namespace {

constexpr size_t kKeptFailures = 20;

// outcome of one instance
struct Case {
  bool ok = true;
  std::vector<std::string> msgs;
  std::vector<Inequality> bad;

  void check(const Inequality &q, const std::string &where)
  {
    if (q.holds)
      return;
    ok = false;
    bad.push_back(q);
    msgs.push_back(where + ": " + q.name + " fails, " + q.lhs + " > " + q.rhs);
  }
  void check(bool cond, const std::string &what)
  {
    if (cond)
      return;
    ok = false;
    msgs.push_back(what);
  }
};

void merge(SuiteResult &r, const std::vector<Case> &cases)
{
  for (const auto &c : cases) {
    ++r.cases;
    if (c.ok)
      continue;
    ++r.failure_count;
    for (const auto &m : c.msgs)
      if (r.failures.size() < kKeptFailures)
        r.failures.push_back(m);
    for (const auto &q : c.bad)
      if (r.violated.size() < kKeptFailures)
        r.violated.push_back(q);
  }
}

// runs body(i, stream, case) for i < n, one stream per instance
template <class Body>
std::vector<Case> instances(size_t n, const SuiteOptions &opt, uint64_t label, Body body)
{
  std::vector<Case> out(n);
  parallel_for(n, opt.threads, [&](size_t i) {
    Stream rng(opt.seed, label, i);
    try {
      body(i, rng, out[i]);
    } catch (const Error &e) {
      out[i].check(false, "instance " + std::to_string(i) + " threw: " + e.what());
    }
  });
  return out;
}

size_t scaled(const SuiteOptions &opt, size_t full, size_t quick) { return opt.quick ? quick : full; }

std::vector<GroupPtr> catalog_groups(uint64_t max_order, uint64_t min_order = 2)
{
  std::vector<GroupPtr> out;
  for (const auto &s : test_catalog(max_order))
    if (predicted_order(s) >= min_order)
      out.push_back(build_group(s));
  return out;
}

std::string where(const GroupPtr &G, size_t i)
{
  return G->spec() + " #" + std::to_string(i);
}

std::set<Id> naive_product(const FiniteGroup &G, const std::vector<Id> &A, const std::vector<Id> &B)
{
  std::set<Id> s;
  for (Id a : A)
    for (Id b : B)
      s.insert(G.mul(a, b));
  return s;
}

std::set<Id> naive_power(const FiniteGroup &G, const std::vector<Id> &A, int k)
{
  std::set<Id> cur(A.begin(), A.end());
  for (int i = 1; i < k; ++i)
    cur = naive_product(G, std::vector<Id>(cur.begin(), cur.end()), A);
  return cur;
}

bool all_commute(const FiniteGroup &G, const std::vector<Id> &xs)
{
  for (Id a : xs)
    for (Id b : xs)
      if (!G.commute(a, b))
        return false;
  return true;
}

// ---------------------------------------------------------------- group axioms and series

SuiteResult suite_axioms(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "axioms";
  auto specs = test_catalog(opt.quick ? 128 : 512);
  auto cases = instances(specs.size(), opt, 1, [&](size_t i, Stream &, Case &c) {
    auto G = build_group(specs[i]);
    c.check(G->order() == predicted_order(specs[i]), specs[i] + ": order differs from prediction");
    auto err = check_axioms(*G);
    c.check(err.empty(), specs[i] + ": " + err);
  });
  merge(r, cases);

  std::vector<std::pair<std::string, bool>> series_cases{{"symmetric:3", true}, {"symmetric:4", true},
                                                         {"alternating:5", false}};
  for (int n = 3; n <= 12; ++n)
    series_cases.emplace_back("dihedral:" + std::to_string(n), true);
  std::vector<Case> sc(series_cases.size());
  Json lengths = Json::object();
  for (size_t i = 0; i < series_cases.size(); ++i) {
    auto [spec, solvable] = series_cases[i];
    auto s = series(build_group(spec), SeriesKind::derived);
    sc[i].check(s.reaches_trivial == solvable,
                spec + (solvable ? ": derived series stalls" : ": derived series reaches 1"));
    lengths[spec] = s.chain.size();
  }
  merge(r, sc);
  r.details = Json{{"groups", specs.size()}, {"derived_lengths", lengths}};
  return r;
}

// ---------------------------------------------------------------- Ruzsa calculus

SuiteResult suite_ruzsa(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "ruzsa";
  auto groups = catalog_groups(200);
  size_t n = scaled(opt, 500, 60);
  auto tri = instances(n, opt, 2, [&](size_t i, Stream &rng, Case &c) {
    const auto &G = groups[i % groups.size()];
    size_t cap = std::min<size_t>(12, G->order());
    auto A = random_subset(G, 1 + rng.below(cap), rng);
    auto B = random_subset(G, 1 + rng.below(cap), rng);
    auto C = random_subset(G, 1 + rng.below(cap), rng);
    auto q = triangle_and_cover(A, B, C);
    c.check(q.triangle, where(G, i));
    c.check(q.cover_size, where(G, i));
    // A inside Y B B^-1 by direct products
    auto bbinv = naive_product(*G, B.ids(), inverse(B).ids());
    auto ybb = naive_product(*G, q.cover, std::vector<Id>(bbinv.begin(), bbinv.end()));
    bool inside = true;
    for (Id a : A.ids())
      inside = inside && ybb.count(a);
    c.check(inside && q.cover_contains, where(G, i) + ": A not covered by Y B B^-1");
    c.check(q.cover.size() * B.size() <= naive_product(*G, A.ids(), B.ids()).size(),
            where(G, i) + ": cover larger than |AB|/|B|");
  });
  auto inter = instances(n, opt, 3, [&](size_t i, Stream &rng, Case &c) {
    const auto &G = groups[i % groups.size()];
    auto A = random_centered(G, 1 + rng.below(5), rng);
    std::vector<Id> gens{Id(rng.below(G->order()))};
    if (rng.coin())
      gens.push_back(Id(rng.below(G->order())));
    auto H = closure(G, gens);
    int k = 3 + int(rng.below(2));
    auto q = subgroup_intersection_stats(A, H, k);
    c.check(q.power_bound, where(G, i));
    c.check(q.witness_size, where(G, i));
    c.check(q.witness_covers, where(G, i) + ": witness does not cover (A^2 n H)^2");
    size_t akh = 0, a2h = 0;
    for (Id x : naive_power(*G, A.ids(), k))
      akh += H.contains(x);
    for (Id x : naive_power(*G, A.ids(), 2))
      a2h += H.contains(x);
    c.check(akh == q.akh && a2h == q.a2h, where(G, i) + ": intersection sizes differ from recount");
  });
  merge(r, tri);
  merge(r, inter);
  r.details = Json{{"triangle_cover_instances", n}, {"intersection_instances", n}};
  return r;
}

// ---------------------------------------------------------------- Freiman fibres

SuiteResult suite_freiman(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "freiman";
  std::vector<GroupPtr> groups;
  for (auto s : {"dihedral:6", "dihedral:8", "symmetric:4", "heisenberg:3", "abelian:2,4,3",
                 "dicyclic:12", "cyclic:12", "product:symmetric:3+cyclic:3", "gl:2:3", "alternating:4"})
    groups.push_back(build_group(s));
  std::vector<std::vector<Subgroup>> normals;
  for (const auto &G : groups) {
    std::vector<Subgroup> keep;
    for (auto &N : normal_subgroups(G))
      if (N.order() > 1 && N.order() < G->order())
        keep.push_back(N);
    normals.push_back(keep);
  }
  size_t n = scaled(opt, 200, 30);
  auto cases = instances(n, opt, 4, [&](size_t i, Stream &rng, Case &c) {
    size_t gi = i % groups.size();
    const auto &G = groups[gi];
    const auto &N = normals[gi][rng.below(normals[gi].size())];
    auto q = quotient(G, N);
    auto A = random_centered(G, 1 + rng.below(3), rng);
    std::vector<Id> S;
    for (Id y = 0; y < q.quotient->order(); ++y)
      if (rng.coin())
        S.push_back(y);
    if (S.empty())
      S.push_back(0);
    auto f = freiman_fiber_check(A, q.projection, q.quotient, S, 300, rng());
    c.check(f.exhaustive, where(G, i) + ": Freiman check was not exhaustive");
    c.check(f.freiman_ok, where(G, i) + ": quotient map failed the Freiman test");
    c.check(f.left, where(G, i));
    c.check(f.right, where(G, i));
  });
  merge(r, cases);
  r.details = Json{{"instances", n}};
  return r;
}

// ---------------------------------------------------------------- extraction

// dissociated, commuting and span meeting S only in 1, by direct enumeration
std::string independent_dissociation(const GroupPtr &G, const std::vector<Id> &D,
                                     const GroupSubset &S)
{
  if (!all_commute(*G, D))
    return "D does not commute";
  size_t m = D.size(), total = 1;
  for (size_t i = 0; i < m; ++i)
    total *= 3;
  std::set<Id> span;
  size_t all_zero = (total - 1) / 2; // every digit 1, i.e. every exponent 0
  for (size_t code = 0; code < total; ++code) {
    if (code == all_zero)
      continue;
    size_t cc = code;
    Id v = 0;
    for (size_t i = 0; i < m; ++i, cc /= 3)
      v = G->mul(v, G->pow(D[i], int64_t(cc % 3) - 1));
    if (v == 0)
      return "nontrivial signed product equals 1";
    if (S.contains(v))
      return "span meets S outside 1";
  }
  return {};
}

SuiteResult suite_extraction(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "extraction";
  const char *specs[] = {"dihedral:8", "heisenberg:3", "symmetric:4", "dicyclic:12", "abelian:2,4,3",
                         "gl:2:3", "alternating:4", "heisenberg:5"};
  size_t n = scaled(opt, 120, 16);
  auto random_cases = instances(n, opt, 5, [&](size_t i, Stream &rng, Case &c) {
    auto G = build_group(specs[i % 8]);
    auto A = random_centered(G, 2 + rng.below(3), rng);
    bool over_center = i % 3 == 2;
    Subgroup W = whole_group(G);
    Subgroup N = over_center ? center(G) : trivial_subgroup(G);
    ExtractContext ctx{G, W, N};
    GroupSubset S = over_center ? GroupSubset::of(N) : GroupSubset(G, {0});
    auto res = commutable_extract(ctx, A, S, *default_extractor(W));
    auto v = verify_extraction(ctx, A, S, res.D.elems);
    c.check(v.empty(), where(G, i) + ": " + v);
    auto ind = independent_dissociation(G, res.D.elems, S);
    c.check(ind.empty(), where(G, i) + ": " + ind);
    auto a4 = power(A, 4);
    for (Id x : res.D.elems)
      c.check(a4.contains(x), where(G, i) + ": element of D outside A^4");
    if (res.trace.hard)
      c.check(res.trace.bound, where(G, i));
  });
  merge(r, random_cases);

  // elementary abelian groups with S = {1} and K from the greedy witness
  std::vector<std::pair<int, int>> ea; // (m, instance)
  for (int m = 1; m <= 4; ++m)
    for (int t = 0; t < (opt.quick ? 3 : 12); ++t)
      ea.emplace_back(m, t);
  Json floors = Json::array();
  std::vector<Json> floor_rows(ea.size());
  auto ea_cases = instances(ea.size(), opt, 6, [&](size_t i, Stream &rng, Case &c) {
    auto [m, t] = ea[i];
    std::string spec = "abelian:5";
    for (int j = 1; j < m; ++j)
      spec += ",5";
    auto G = build_group(spec);
    GroupSubset A = t == 0 ? GroupSubset::of(whole_group(G))
                           : random_centered(G, 1 + rng.below(std::min<uint64_t>(8, (G->order() - 1) / 2)), rng);
    ExtractContext ctx{G, whole_group(G), trivial_subgroup(G)};
    GroupSubset S(G, {0});
    auto res = commutable_extract(ctx, A, S, *abelian_extractor());
    auto v = verify_extraction(ctx, A, S, res.D.elems);
    c.check(v.empty(), spec + ": " + v);
    auto ind = independent_dissociation(G, res.D.elems, S);
    c.check(ind.empty(), spec + ": " + ind);
    // floor sqrt(log_3 n / 3) - log_3(3 K |S|), recomputed here
    uint64_t K = tripling_stats(A).K();
    size_t a2 = power(A, 2).size();
    long double floor_ = std::sqrt(std::log((long double)a2) / std::log(3.0L) / 3) -
                         std::log(3.0L * K) / std::log(3.0L);
    c.check((long double)res.D.elems.size() >= floor_,
            spec + ": |D| = " + std::to_string(res.D.elems.size()) + " below the floor");
    c.check(res.trace.bound, spec);
    c.check(res.trace.K == K, spec + ": extraction used a different K");
    floor_rows[i] = Json{{"group", spec}, {"A", A.size()}, {"K", K}, {"D", res.D.elems.size()},
                         {"floor", double(floor_)}};
  });
  merge(r, ea_cases);
  for (auto &f : floor_rows)
    floors.push_back(f);
  r.details = Json{{"random_instances", n}, {"elementary_abelian", floors}};
  return r;
}

// ---------------------------------------------------------------- solvable groups

SuiteResult suite_pyber(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "pyber";
  std::vector<std::string> specs;
  for (const auto &s : test_catalog(opt.quick ? 256 : 5000))
    specs.push_back(s);
  if (!opt.quick)
    for (auto s : {"olshanskii:4:3:3:seed=1", "olshanskii:4:3:3:seed=2", "olshanskii:4:3:3:seed=3",
                   "olshanskii:3:4:2:seed=1", "heisenberg:11", "dicyclic:1000", "borel:3:5",
                   "product:heisenberg:5+symmetric:3", "product:dicyclic:16+dihedral:9",
                   "product:symmetric:4+symmetric:4", "gl:2:5", "borel:2:7"})
      specs.push_back(s);
  std::vector<char> solvable(specs.size(), 0);
  std::vector<Json> rows(specs.size());
  auto cases = instances(specs.size(), opt, 7, [&](size_t i, Stream &, Case &c) {
    auto G = build_group(specs[i]);
    if (!is_solvable(G))
      return;
    solvable[i] = 1;
    auto res = pyber_solvable_abelian(G);
    c.check(res.abelian_verified, specs[i] + ": output not verified abelian");
    c.check(all_commute(*G, res.I.members), specs[i] + ": output does not commute");
    c.check(closure(G, res.I.gens).members == res.I.members, specs[i] + ": output is not a subgroup");
    long double floor_ = std::exp(0.5L * std::cbrt(std::log((long double)G->order())));
    c.check((long double)res.I.order() >= floor_,
            specs[i] + ": |I| = " + std::to_string(res.I.order()) + " below the floor");
    c.check(res.bound, specs[i]);
    rows[i] = Json{{"group", specs[i]}, {"order", G->order()}, {"I", res.I.order()},
                   {"floor", double(floor_)}};
  });
  std::vector<Case> kept;
  Json table = Json::array();
  for (size_t i = 0; i < specs.size(); ++i)
    if (solvable[i]) {
      kept.push_back(cases[i]);
      table.push_back(rows[i]);
    }
  merge(r, kept);
  r.details = Json{{"groups", table}};
  return r;
}

// ---------------------------------------------------------------- pivot

SuiteResult suite_pivot(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "pivot";
  auto groups = catalog_groups(200);
  size_t n = scaled(opt, 1000, 100);
  auto cases = instances(n, opt, 8, [&](size_t i, Stream &rng, Case &c) {
    const auto &G = groups[i % groups.size()];
    // the counting argument maps g to g a g^-1 and needs A symmetric
    auto R = random_subset(G, 1 + rng.below(std::min<size_t>(8, G->order())), rng);
    std::vector<Id> sym = R.ids();
    for (Id x : R.ids())
      sym.push_back(G->inv(x));
    GroupSubset A(G, sym);
    Id a = A.ids()[rng.below(A.size())];
    auto rep = pivot_split(A, a);
    c.check(rep.bound, where(G, i));
    size_t cent = 0, conj = 0;
    auto cls = conjugacy_class(G, a);
    std::set<Id> cl(cls.begin(), cls.end());
    for (Id x : naive_power(*G, A.ids(), 2))
      cent += G->commute(x, a);
    for (Id x : naive_power(*G, A.ids(), 3))
      conj += cl.count(x);
    c.check(cent == rep.centralized.size() && conj == rep.conjugates.size(),
            where(G, i) + ": pivot sets differ from recount");
    c.check(A.size() <= cent * conj, where(G, i) + ": |A| exceeds the recounted product");
  });
  merge(r, cases);
  r.details = Json{{"instances", n}};
  return r;
}

// ---------------------------------------------------------------- rank inequalities

SuiteResult suite_rank(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "rank";
  const uint32_t qs[] = {2, 3, 4, 5, 7, 8, 9, 11, 13, 16};
  size_t n = scaled(opt, 1000, 100);
  auto cases = instances(n, opt, 9, [&](size_t i, Stream &rng, Case &c) {
    auto F = Field::of_order(qs[i % 10]);
    const Field &K = *F;
    int d = 1 + int(rng.below(5));
    auto lowrank = [&]() {
      int k = int(rng.below(d + 1));
      if (k == d && rng.coin()) {
        Mat m(d, d);
        for (auto &e : m.a)
          e = Elt(rng.below(K.q()));
        return m;
      }
      Mat u(d, k), v(k, d);
      for (auto &e : u.a)
        e = Elt(rng.below(K.q()));
      for (auto &e : v.a)
        e = Elt(rng.below(K.q()));
      return k ? mat_mul(K, u, v) : Mat(d, d);
    };
    Mat x = lowrank(), y = lowrank();
    auto rep = rank_inequality_check(K, x, y);
    std::string w = K.name() + " d=" + std::to_string(d) + " #" + std::to_string(i);
    c.check(rep.lemma, w);
    c.check(rep.cor_left, w);
    c.check(rep.cor_right, w);
    c.check(rep.rk_x == rank(K, x) && rep.rk_y == rank(K, y) && rep.rk_sum == rank(K, mat_add(K, x, y)),
            w + ": ranks differ from recomputation");
  });
  merge(r, cases);
  r.details = Json{{"instances", n}};
  return r;
}

// ---------------------------------------------------------------- GL pipeline

SuiteResult suite_gl(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "gl";
  std::vector<std::string> specs{"gl:2:2", "gl:2:3", "sl:2:3", "diagonal:2:5", "monomial:2:5", "unipotent:3:3"};
  if (opt.quick)
    specs.resize(3);
  std::vector<Json> rows(specs.size());
  auto cases = instances(specs.size(), opt, 10, [&](size_t i, Stream &, Case &c) {
    auto G = build_group(specs[i]);
    GlOptions go;
    go.seed = opt.seed;
    auto res = gl_abelian_substruct(GroupSubset::of(whole_group(G)), go);
    c.check(int(res.iterations.size()) < res.d * res.d, specs[i] + ": too many flag iterations");
    c.check(res.d == 1 || res.final_flag.complete(), specs[i] + ": final flag not complete");
    c.check(res.abelian && all_commute(*G, res.H.members), specs[i] + ": H is not abelian");
    c.check(closure(G, res.H.gens).members == res.H.members, specs[i] + ": H is not a subgroup");
    c.check(res.hard, specs[i]);
    rows[i] = Json{{"group", specs[i]}, {"d", res.d}, {"K", res.K}, {"A2", res.a2},
                   {"iterations", res.iterations.size()}, {"H", res.H.order()}, {"in_h", res.in_h},
                   {"hard", to_json(res.hard)}};
  });
  merge(r, cases);
  r.details = Json{{"runs", rows}};
  return r;
}

// ---------------------------------------------------------------- dimension decrement

uint64_t brute_tuple_sum(const ApproxInput &in, const Embedder &emb, const AffineSubspace &V, int k)
{
  const Field &K = *emb.field();
  const auto &ids = in.A2.ids();
  size_t n = ids.size();
  std::vector<std::vector<char>> in_v(n, std::vector<char>(n));
  for (size_t a = 0; a < n; ++a)
    for (size_t x = 0; x < n; ++x)
      in_v[a][x] = V.contains(mat_mul(K, emb(ids[a]), emb(ids[x])));
  uint64_t total = 0;
  std::vector<size_t> tup(size_t(k), 0);
  for (;;) {
    for (size_t x = 0; x < n; ++x) {
      bool ok = true;
      for (int i = 0; i < k && ok; ++i)
        ok = in_v[tup[size_t(i)]][x];
      total += ok;
    }
    int i = 0;
    while (i < k && ++tup[size_t(i)] == n)
      tup[size_t(i++)] = 0;
    if (i == k)
      break;
  }
  return total;
}

SuiteResult suite_decrement(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "decrement";
  const char *specs[] = {"gl:2:2", "gl:2:3", "sl:2:3", "borel:2:5", "monomial:2:3", "unipotent:3:3",
                         "diagonal:2:7"};
  size_t want = scaled(opt, 20, 5);
  // instances are drawn until `want` qualify; candidate j uses stream j
  std::vector<Case> cases;
  Json rows = Json::array();
  for (uint64_t j = 0; cases.size() < want && j < 2000; ++j) {
    Stream rng(opt.seed, 11, j);
    auto G = build_group(specs[j % 7]);
    Embedder emb(G);
    const Field &K = *emb.field();
    int d = emb.dim();
    auto A = random_centered(G, 1 + rng.below(4), rng);
    auto in = approx_input(A);
    uint64_t n = in.A2.size();
    int k = 1 + int(rng.below(3));
    uint64_t nk = 1;
    for (int i = 0; i < k; ++i)
      nk *= n;
    if (nk > 1000000)
      continue;
    std::vector<Mat> pts{emb(in.A2.ids()[rng.below(n)])};
    int extra = 1 + int(rng.below(uint64_t(d * d - 2)));
    for (int i = 0; i < extra; ++i) {
      Mat m(d, d);
      for (auto &v : m.a)
        v = Elt(rng.below(K.q()));
      pts.push_back(m);
    }
    auto V = AffineSubspace::hull(emb.field(), pts);
    if (V.dim() >= d * d)
      continue;
    Case c;
    std::string w = G->spec() + " k=" + std::to_string(k) + " n=" + std::to_string(n);
    try {
      auto res = dimension_decrement(in, emb, Flag::trivial(emb.field(), d), V, k);
      c.check(res.mode == DecrementMode::exhaustive, w + ": not exhaustive");
      c.check(res.identity_holds, w + ": tuple sum differs from the closed form");
      c.check(res.averaging, w);
      c.check(res.pigeonhole, w);
      if (nk * n <= 5000000)
        c.check(res.tuple_sum == brute_tuple_sum(in, emb, V, k), w + ": tuple sum differs from brute force");
      rows.push_back(Json{{"group", G->spec()}, {"k", k}, {"n", n}, {"tuple_sum", res.tuple_sum.str()},
                          {"averaging", to_json(res.averaging)}});
    } catch (const Error &e) {
      c.check(false, w + " threw: " + e.what());
    }
    cases.push_back(c);
  }
  merge(r, cases);
  if (cases.size() < want) {
    ++r.failure_count;
    r.failures.push_back("only " + std::to_string(cases.size()) + " qualifying instances");
  }
  r.details = Json{{"instances", rows}};
  return r;
}

// ---------------------------------------------------------------- Ramsey constructions

SuiteResult suite_ramsey_structure(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "ramsey-structure";
  auto specs = test_catalog(opt.quick ? 128 : 512);
  specs.erase(std::remove_if(specs.begin(), specs.end(),
                             [](const std::string &s) { return predicted_order(s) < 2; }),
              specs.end());
  auto structure = instances(2 * specs.size(), opt, 12, [&](size_t i, Stream &, Case &c) {
    auto mode = i % 2 ? PairingMode::smallest_prime : PairingMode::squaring;
    auto G = build_group(specs[i / 2]);
    auto P = build_pairing(G, mode);
    std::string w = specs[i / 2] + " " + pairing_mode_name(mode);
    c.check(P.structure_error.empty(), w + ": " + P.structure_error);
    c.check(P.maximal, w + ": matching not maximal");
  });
  merge(r, structure);

  // matched-edge exclusivity
  std::vector<std::string> sample_groups{"cyclic:35", "cyclic:55", "heisenberg:3", "dihedral:10", "cyclic:101"};
  std::vector<PairingGraph> pairings;
  for (const auto &s : sample_groups)
    for (auto m : {PairingMode::squaring, PairingMode::smallest_prime})
      pairings.push_back(build_pairing(build_group(s), m));
  size_t samples = scaled(opt, 10000, 1000);
  auto excl = instances(samples, opt, 13, [&](size_t i, Stream &rng, Case &c) {
    const auto &P = pairings[i % pairings.size()];
    auto s = sample_connection(P, rng());
    auto err = check_sample(P, s);
    c.check(err.empty(), P.G->spec() + ": " + err);
  });
  merge(r, excl);

  // deterministic avoidance on Z/35 and Z/55
  Json exp = Json::array();
  for (auto spec : {"cyclic:35", "cyclic:55"})
    for (auto m : {PairingMode::squaring, PairingMode::smallest_prime}) {
      RamseyOptions ro;
      ro.trials = int(scaled(opt, 200, 20));
      ro.mode = m;
      ro.seed = derive_key(opt.seed, 14);
      ro.threads = opt.threads;
      ro.threshold = 1e9;
      ro.count_n = 0;
      auto rep = ramsey_experiment(build_group(spec), ro);
      std::vector<Case> cs(rep.trials.size());
      for (size_t t = 0; t < rep.trials.size(); ++t) {
        const auto &tr = rep.trials[t];
        std::string w = std::string(spec) + " " + pairing_mode_name(m) + " trial " + std::to_string(t);
        cs[t].check(tr.sample_error.empty(), w + ": " + tr.sample_error);
        cs[t].check(tr.avoidance_ok, w + ": chain pattern inside a monochromatic quotient set");
      }
      merge(r, cs);
      exp.push_back(Json{{"group", spec}, {"mode", pairing_mode_name(m)}, {"trials", rep.trials.size()},
                         {"worst", rep.worst}, {"avoidance_failures", rep.avoidance_failures}});
    }

  // monochromatic probability on a fixed instance
  auto G = build_group("cyclic:35");
  auto P = build_pairing(G, PairingMode::squaring);
  std::optional<GroupSubset> pick;
  for (Id x = 1; x < 35 && !pick; ++x)
    for (Id y = x + 1; y < 35 && !pick; ++y) {
      GroupSubset A(G, {0, x, y});
      std::vector<char> in(P.vertices(), 0);
      for (Id a : A.ids())
        for (Id b : A.ids())
          if (a != b)
            in[size_t(P.class_of[G->mul(a, G->inv(b))])] = 1;
      bool ok = true;
      size_t cnt = 0;
      for (auto [u, v] : P.matching)
        ok = ok && !(in[size_t(u)] && in[size_t(v)]);
      for (char f : in)
        cnt += f;
      if (ok && cnt == 3)
        pick = A;
    }
  Case mc;
  Json mono;
  if (!pick) {
    mc.check(false, "no fixed instance found on Z/35");
  } else {
    uint64_t ns = scaled(opt, 100000, 10000);
    auto m = monochrome_estimate(P, *pick, ns, derive_key(opt.seed, 15), opt.threads);
    mc.check(m.edge_free, "fixed instance meets a matched edge");
    mc.check(std::fabs(double(m.z)) <= 4.0, "monochromatic frequency off by " + std::to_string(double(m.z)) + " sigma");
    mono = Json{{"A", ids_json(pick->ids())}, {"classes", m.classes}, {"samples", m.samples},
                {"predicted", double(m.predicted)}, {"observed", double(m.observed)}, {"z", double(m.z)}};
  }
  merge(r, {mc});
  r.details = Json{{"pairing_groups", specs.size()}, {"exclusivity_samples", samples},
                   {"avoidance", exp}, {"monochrome", mono}};
  return r;
}

SuiteResult suite_ramsey_magnitude(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "ramsey-magnitude";
  Json runs = Json::array();
  for (int p : {101, 251, 499}) {
    RamseyOptions ro;
    ro.trials = int(scaled(opt, 50, 3));
    ro.seed = derive_key(opt.seed, 16);
    ro.threads = opt.threads;
    ro.count_n = 0;
    auto rep = ramsey_experiment(build_group("cyclic:" + std::to_string(p)), ro);
    std::vector<Case> cs(rep.trials.size());
    for (size_t t = 0; t < rep.trials.size(); ++t) {
      const auto &tr = rep.trials[t];
      std::string w = "Z/" + std::to_string(p) + " trial " + std::to_string(t);
      cs[t].check(tr.within_threshold, w + ": max " + std::to_string(tr.max) + " exceeds 6 log2 p");
      cs[t].check(tr.sample_error.empty(), w + ": " + tr.sample_error);
    }
    merge(r, cs);
    runs.push_back(Json{{"p", p}, {"trials", rep.trials.size()}, {"worst", rep.worst},
                        {"worst_ratio", rep.worst_ratio}, {"mean_max", rep.mean_max},
                        {"limit", 6.0 * std::log2(double(p))}});
  }
  r.details = Json{{"runs", runs}};
  return r;
}

// ---------------------------------------------------------------- multiples in the integers

// all valid (t, q): t != 0, q prime below Q, q^s_q | t, q'^s_q' does not
// divide t for primes q' < q, and t, qt, q^2 t, q^3 t in A - A
std::set<std::pair<int64_t, uint64_t>> multiples_oracle(const std::vector<int64_t> &A, int64_t N,
                                                         const std::map<uint64_t, int> &s, uint64_t Q)
{
  std::vector<char> diff(size_t(2 * N + 1), 0);
  for (int64_t a : A)
    for (int64_t b : A)
      diff[size_t(a - b + N)] = 1;
  auto in = [&](int64_t x) { return x > -N && x < N && diff[size_t(x + N)]; };
  auto sq = [&](uint64_t q) {
    auto it = s.find(q);
    int e = it == s.end() ? 0 : it->second;
    int64_t v = 1;
    for (int i = 0; i < e; ++i)
      v *= int64_t(q);
    return v;
  };
  std::vector<uint64_t> primes;
  for (uint64_t q = 2; q < Q; ++q)
    if (is_prime(q))
      primes.push_back(q);
  std::set<std::pair<int64_t, uint64_t>> out;
  for (size_t qi = 0; qi < primes.size(); ++qi) {
    int64_t q = int64_t(primes[qi]);
    for (int64_t t = -N; t <= N; ++t) {
      if (t == 0 || t % sq(primes[qi]) != 0)
        continue;
      bool lower = false;
      for (size_t j = 0; j < qi; ++j)
        lower = lower || t % sq(primes[j]) == 0;
      if (lower)
        continue;
      if (in(t) && in(q * t) && in(q * q * t) && in(q * q * q * t))
        out.emplace(t, primes[qi]);
    }
  }
  return out;
}

SuiteResult suite_multiples(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "multiples";
  size_t n = scaled(opt, 50, 8);
  std::vector<Json> rows(n);
  auto cases = instances(n, opt, 17, [&](size_t i, Stream &rng, Case &c) {
    // the exact heaviest-fibre search grows like |A|^4, so dense sets stay below 256
    int64_t N = i % 3 == 0 ? 64 + int64_t(rng.below(193)) : 64 + int64_t(rng.below(449));
    std::vector<int64_t> A;
    switch (i % 3) {
    case 0: { // random dense subset
      uint64_t keep = 30 + rng.below(60);
      for (int64_t x = 1; x <= N; ++x)
        if (rng.below(100) < keep)
          A.push_back(x);
      break;
    }
    case 1: { // block
      int64_t len = N / (2 + int64_t(rng.below(4)));
      int64_t start = 1 + int64_t(rng.below(uint64_t(N - len)));
      for (int64_t x = start; x < start + len; ++x)
        A.push_back(x);
      break;
    }
    default: { // arithmetic progression with a random step
      int64_t step = 1 + int64_t(rng.below(6));
      for (int64_t x = 1 + int64_t(rng.below(uint64_t(step))); x <= N; x += step)
        A.push_back(x);
    }
    }
    if (A.size() < 2)
      A = {1, 2};
    uint64_t Q = std::vector<uint64_t>{3, 5, 7}[rng.below(3)];
    std::map<uint64_t, int> s;
    s[2] = int(rng.below(3));
    s[3] = int(rng.below(2));
    s[5] = int(rng.below(2));
    bool small = false;
    for (auto [p, e] : s) {
      uint64_t v = 1;
      for (int k = 0; k < e; ++k)
        v *= p;
      small = small || (p < Q && v <= Q);
    }
    if (!small)
      s[2] = 0;
    auto res = find_multiples_Z(A, N, s, Q, 2);
    std::string w = "N=" + std::to_string(N) + " #" + std::to_string(i);
    c.check(res.verify_error.empty(), w + ": " + res.verify_error);
    auto oracle = multiples_oracle(A, N, s, Q);
    for (int64_t t : res.t)
      c.check(oracle.count({t, res.q}) > 0, w + ": t = " + std::to_string(t) + " not valid for q = " + std::to_string(res.q));
    c.check(res.fiber_bound, w);
    rows[i] = Json{{"N", N}, {"A", A.size()}, {"Q", Q}, {"q", res.q}, {"found", res.t.size()},
                   {"oracle", oracle.size()}, {"certified", res.certified}};
  });
  merge(r, cases);
  r.details = Json{{"instances", rows}};
  return r;
}

// ---------------------------------------------------------------- corner transfer

SuiteResult suite_corner_transfer(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "corner-transfer";
  const char *specs[] = {"heisenberg:3", "dihedral:9", "dihedral:15", "symmetric:4", "dicyclic:12",
                         "alternating:4", "cyclic:27", "abelian:3,9", "product:symmetric:3+cyclic:3", "heisenberg:5"};
  size_t n = scaled(opt, 50, 6);
  std::vector<Json> rows(n);
  auto cases = instances(n, opt, 18, [&](size_t i, Stream &rng, Case &c) {
    auto G = build_group(specs[i % 10]);
    auto A = grow_ap_free(G, 5 + rng.below(8), ApMode::averaging, rng);
    std::string w = where(G, i);
    RothOptions ro;
    ro.exact_h = 0;
    ro.exact_b0 = 0;
    auto rep = local_roth_experiment(A, ApMode::averaging, ro);
    const auto &B0 = rep.near.piece;
    Id g = rep.near.g;
    // S recomputed from its definition
    std::set<Cell> S;
    for (Id x : B0.ids())
      for (Id y : B0.ids())
        if (A.contains(G->mul(G->mul(x, g), G->inv(y))))
          S.emplace(x, y);
    c.check(std::set<Cell>(rep.S.begin(), rep.S.end()) == S, w + ": transfer set differs from its definition");
    c.check(all_commute(*G, B0.ids()), w + ": B0 does not commute");
    c.check(rep.corner.free, w + ": corner check found a corner");
    bool free = true;
    for (auto [x, y] : S)
      for (Id b : B0.ids()) {
        Id d = G->mul(G->inv(x), b);
        if (d != 0 && S.count({b, y}) && S.count({x, G->mul(y, d)}))
          free = false;
      }
    c.check(free, w + ": exhaustive scan found a corner");
    rows[i] = Json{{"group", G->spec()}, {"A", A.size()}, {"B0", B0.size()}, {"S", S.size()},
                   {"density", double(rep.corner_density)}};
  });
  merge(r, cases);
  r.details = Json{{"instances", rows}};
  return r;
}

// ---------------------------------------------------------------- p-ranks

SuiteResult suite_appendix_ranks(const SuiteOptions &opt)
{
  SuiteResult r;
  r.name = "appendix-ranks";
  auto specs = test_catalog(opt.quick ? 64 : 256);
  auto cases = instances(2 * specs.size(), opt, 19, [&](size_t i, Stream &, Case &c) {
    uint64_t p = i % 2 ? 3 : 2;
    auto G = build_group(specs[i / 2]);
    std::string w = specs[i / 2] + " p=" + std::to_string(p);
    for (auto *f : {&check_sectional_subadditive, &check_sylow_reduction, &check_rank_square_bound}) {
      auto e = (*f)(G, p);
      c.check(e.empty(), w + ": " + e);
    }
  });
  merge(r, cases);
  r.details = Json{{"groups", specs.size()}};
  return r;
}

using SuiteFn = SuiteResult (*)(const SuiteOptions &);

const std::vector<std::pair<std::string, std::pair<SuiteFn, const char *>>> &registry()
{
  static const std::vector<std::pair<std::string, std::pair<SuiteFn, const char *>>> reg{
    {"axioms", {suite_axioms, "group axioms on the catalog and derived series"}},
    {"ruzsa", {suite_ruzsa, "Ruzsa triangle, covering and subgroup intersection bounds"}},
    {"freiman", {suite_freiman, "fibre inequalities for quotient maps"}},
    {"extraction", {suite_extraction, "commuting dissociated extraction soundness and floor"}},
    {"pyber", {suite_pyber, "large abelian subgroups of solvable groups"}},
    {"pivot", {suite_pivot, "centralizer and conjugacy class pivot bound"}},
    {"rank", {suite_rank, "rank inequalities over finite fields"}},
    {"gl", {suite_gl, "GL flag pipeline termination and Borel bound"}},
    {"decrement", {suite_decrement, "dimension decrement averaging identity"}},
    {"ramsey-structure", {suite_ramsey_structure, "pairing graphs, exclusivity, avoidance, monochromatic rate"}},
    {"ramsey-magnitude", {suite_ramsey_magnitude, "clique and independence numbers on Z/p"}},
    {"multiples", {suite_multiples, "multiples in difference sets against a brute-force oracle"}},
    {"corner-transfer", {suite_corner_transfer, "corner-freeness of transferred sets"}},
    {"appendix-ranks", {suite_appendix_ranks, "sectional p-rank inequalities"}},
  };
  return reg;
}

} // namespace

const std::vector<std::string> &suite_names()
{
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto &e : registry())
      v.push_back(e.first);
    return v;
  }();
  return names;
}

std::string suite_description(const std::string &name)
{
  for (const auto &e : registry())
    if (e.first == name)
      return e.second.second;
  fail(ErrorCode::invalid_argument, "unknown suite " + name);
}

SuiteResult run_suite(const std::string &name, const SuiteOptions &opt)
{
  for (const auto &e : registry())
    if (e.first == name)
      return e.second.first(opt);
  fail(ErrorCode::invalid_argument, "unknown suite " + name);
}

Record suite_record(const SuiteResult &r)
{
  Record rec;
  rec.op = "suite";
  rec.result = Json{{"cases", r.cases},
                    {"failures", r.failure_count},
                    {"failure_messages", r.failures},
                    {"details", r.details}};
  for (const auto &q : r.violated)
    rec.asserts.push_back(from_inequality(q));
  rec.asserts.push_back(condition(r.name + ": zero failures", r.pass(),
                                  r.pass() ? "" : std::to_string(r.failure_count) + " failing instances"));
  return rec;
}

} // namespace grpcomb
