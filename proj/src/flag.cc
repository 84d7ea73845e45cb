#include "grpcomb/flag.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "grpcomb/error.hpp"
#include "grpcomb/rng.hpp"

namespace grpcomb {

namespace {

constexpr uint64_t kFieldCap = uint64_t(1) << 20;

std::vector<Elt> unit_vec(int n, int i)
{
  std::vector<Elt> v(n, 0);
  v[i] = 1;
  return v;
}

Mat single_row(const std::vector<Elt> &v)
{
  Mat m(0, int(v.size()));
  m.append_row(v);
  return m;
}

std::vector<Elt> vec_sub(const Field &F, std::vector<Elt> a, const std::vector<Elt> &b)
{
  for (size_t i = 0; i < a.size(); ++i)
    a[i] = F.sub(a[i], b[i]);
  return a;
}

Elt dot(const Field &F, const std::vector<Elt> &a, const std::vector<Elt> &b)
{
  Elt s = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i])
      s = F.add(s, F.mul(a[i], b[i]));
  return s;
}

// sum_i coef[i] * rows(i)
std::vector<Elt> combine(const Field &F, const Mat &rows, const std::vector<Elt> &coef)
{
  std::vector<Elt> v(rows.cols, 0);
  for (int i = 0; i < rows.rows; ++i) {
    if (!coef[i])
      continue;
    for (int j = 0; j < rows.cols; ++j)
      if (rows(i, j))
        v[j] = F.add(v[j], F.mul(coef[i], rows(i, j)));
  }
  return v;
}

uint64_t sat_pow(uint64_t base, int e)
{
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (uint64_t(1) << 62) / std::max<uint64_t>(base, 1))
      return uint64_t(1) << 63;
    r *= base;
  }
  return r;
}

// reduce v modulo a reduced echelon basis; zero iff v in the span
std::vector<Elt> reduce_against(const Field &F, std::vector<Elt> v, const Subspace &S)
{
  for (int r = 0; r < S.rows; ++r) {
    int piv = 0;
    while (piv < S.cols && !S(r, piv))
      ++piv;
    if (piv == S.cols || !v[piv])
      continue;
    Elt f = v[piv];
    for (int j = piv; j < S.cols; ++j)
      if (S(r, j))
        v[j] = F.sub(v[j], F.mul(f, S(r, j)));
  }
  return v;
}

bool is_zero_vec(const std::vector<Elt> &v)
{
  return std::all_of(v.begin(), v.end(), [](Elt x) { return x == 0; });
}

// polynomials, coefficients low to high, trimmed
using Poly = std::vector<Elt>;

void trim(Poly &p)
{
  while (!p.empty() && p.back() == 0)
    p.pop_back();
}

Poly poly_mod(const Field &F, Poly a, const Poly &m)
{
  trim(a);
  Elt lead_inv = F.inv(m.back());
  while (a.size() >= m.size()) {
    Elt f = F.mul(a.back(), lead_inv);
    size_t shift = a.size() - m.size();
    for (size_t i = 0; i < m.size(); ++i)
      a[shift + i] = F.sub(a[shift + i], F.mul(f, m[i]));
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Field &F, const Poly &a, const Poly &b, const Poly &m)
{
  if (a.empty() || b.empty())
    return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  return poly_mod(F, r, m);
}

Poly poly_gcd(const Field &F, Poly a, Poly b)
{
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = poly_mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// degree of gcd(f, x^q - x): the number of distinct roots in F
int distinct_root_count(const Field &F, const Poly &f)
{
  if (f.size() <= 1)
    return 0;
  Poly x = {0, 1};
  Poly acc = {1};
  Poly base = poly_mod(F, x, f);
  uint64_t e = F.q();
  while (e) {
    if (e & 1)
      acc = poly_mulmod(F, acc, base, f);
    base = poly_mulmod(F, base, base, f);
    e >>= 1;
  }
  // acc = x^q mod f
  acc.resize(std::max<size_t>(acc.size(), 2), 0);
  acc[1] = F.sub(acc[1], 1);
  trim(acc);
  Poly g = poly_gcd(F, f, acc);
  return int(g.size()) - 1;
}

Poly poly_div_linear(const Field &F, const Poly &p, Elt r)
{
  // p / (x - r), p(r) = 0 assumed
  Poly q(p.size() - 1, 0);
  Elt carry = 0;
  for (size_t i = p.size(); i-- > 1;) {
    carry = F.add(p[i], F.mul(carry, r));
    q[i - 1] = carry;
  }
  return q;
}

Elt smallest_root(const Field &F, const Poly &p)
{
  for (Elt r = 0; r < F.q(); ++r)
    if (poly_eval(F, p, r) == 0)
      return r;
  fail(ErrorCode::internal, "root expected");
}

std::vector<Mat> mats_of(const Subspace &S, int d)
{
  std::vector<Mat> out;
  for (int i = 0; i < S.rows; ++i)
    out.push_back(unflatten(S.row(i), d));
  return out;
}

} // namespace

const std::vector<Elt> &field_embedding(const FieldPtr &from, const FieldPtr &to)
{
  static std::mutex mu;
  static std::map<std::pair<const Field *, const Field *>, std::vector<Elt>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(from.get(), to.get());
  auto it = cache.find(key);
  if (it != cache.end())
    return it->second;
  std::vector<Elt> map;
  if (from == to) {
    map.resize(from->q());
    for (Elt i = 0; i < from->q(); ++i)
      map[i] = i;
  } else {
    map = from->embedding_into(*to);
  }
  return cache.emplace(key, std::move(map)).first->second;
}

Mat embed_mat(const Mat &x, const FieldPtr &from, const FieldPtr &to)
{
  if (from == to)
    return x;
  return apply_map(x, field_embedding(from, to));
}

// ---------------------------------------------------------------- flags

Flag::Flag(FieldPtr F, int d, std::vector<Subspace> chain)
  : field_(std::move(F)), d_(d), chain_(std::move(chain))
{
  require(field_ && d_ >= 1, ErrorCode::invalid_argument, "flag needs a field and d >= 1");
  require(chain_.size() >= 2, ErrorCode::invalid_argument, "flag needs {0} and the whole space");
  const Field &K = *field_;
  for (auto &s : chain_) {
    require(s.cols == d_, ErrorCode::invalid_argument, "flag subspace width");
    s = row_basis(K, s);
  }
  require(chain_.front().rows == 0 && chain_.back().rows == d_,
          ErrorCode::invalid_argument, "flag must run from 0 to the whole space");
  for (size_t i = 1; i < chain_.size(); ++i)
    require(chain_[i].rows > chain_[i - 1].rows && space_leq(K, chain_[i - 1], chain_[i]),
            ErrorCode::invalid_argument, "flag is not strictly nested");

  Mat rows(0, d_);
  Subspace cur = zero_space(d_);
  off_ = {0};
  for (size_t i = 1; i < chain_.size(); ++i) {
    for (int r = 0; r < chain_[i].rows; ++r) {
      auto v = chain_[i].row(r);
      if (space_contains(K, cur, v))
        continue;
      rows.append_row(v);
      cur = space_sum(K, cur, single_row(v));
    }
    off_.push_back(rows.rows);
  }
  basis_ = transpose(rows);
  auto inv = inverse(K, basis_);
  require(bool(inv), ErrorCode::internal, "adapted basis not invertible");
  basis_inv_ = *inv;
}

Flag Flag::trivial(FieldPtr F, int d)
{
  return Flag(std::move(F), d, {zero_space(d), full_space(d)});
}

Flag Flag::standard_complete(FieldPtr F, int d)
{
  std::vector<Subspace> chain{zero_space(d)};
  Mat rows(0, d);
  for (int i = 0; i < d; ++i) {
    rows.append_row(unit_vec(d, i));
    chain.push_back(rows);
  }
  return Flag(std::move(F), d, std::move(chain));
}

std::vector<int> Flag::block_dims() const
{
  std::vector<int> out;
  for (int b = 0; b < length(); ++b)
    out.push_back(block_dim(b));
  return out;
}

long Flag::pdim() const
{
  long s = 0;
  for (int b = 0; b < length(); ++b)
    s += long(block_dim(b)) * block_dim(b) - 1;
  return s;
}

Mat Flag::adapted(const Mat &x) const
{
  require(x.rows == d_ && x.cols == d_, ErrorCode::invalid_argument, "matrix size vs flag");
  return mat_mul(*field_, mat_mul(*field_, basis_inv_, x), basis_);
}

bool Flag::stabilizes(const Mat &x) const
{
  Mat y = adapted(x);
  for (int b = 0; b < length(); ++b)
    for (int c = off_[b]; c < off_[b + 1]; ++c)
      for (int r = off_[b + 1]; r < d_; ++r)
        if (y(r, c))
          return false;
  return true;
}

Mat Flag::block(const Mat &x, int b) const
{
  Mat y = adapted(x);
  int n = block_dim(b), o = off_[b];
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out(i, j) = y(o + i, o + j);
  return out;
}

std::vector<Elt> Flag::vtr(const Mat &x) const
{
  require(stabilizes(x), ErrorCode::precondition, "vtr of a matrix outside the stabilizer");
  Mat y = adapted(x);
  std::vector<Elt> out;
  for (int b = 0; b < length(); ++b) {
    Elt t = 0;
    for (int i = off_[b]; i < off_[b + 1]; ++i)
      t = field_->add(t, y(i, i));
    out.push_back(t);
  }
  return out;
}

long Flag::fdim(const std::vector<Mat> &mats) const
{
  std::vector<Mat> ys;
  for (auto &x : mats) {
    require(stabilizes(x), ErrorCode::precondition, "fdim of a matrix outside the stabilizer");
    ys.push_back(adapted(x));
  }
  long s = 0;
  for (int b = 0; b < length(); ++b) {
    int n = block_dim(b), o = off_[b];
    Mat rows(0, n * n);
    for (auto &y : ys) {
      std::vector<Elt> v;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          v.push_back(y(o + i, o + j));
      rows.append_row(v);
    }
    s += rank(*field_, rows) - 1;
  }
  return s;
}

Flag Flag::refine(int b, const std::vector<Subspace> &inner) const
{
  require(b >= 0 && b < length(), ErrorCode::invalid_argument, "refine: no such block");
  int n = block_dim(b);
  Flag check(field_, n, inner); // validates the inner chain
  std::vector<Subspace> out(chain_.begin(), chain_.begin() + b + 1);
  for (int j = 1; j + 1 < int(check.chain().size()); ++j) {
    const Subspace &w = check.V(j);
    Mat rows = chain_[b];
    for (int r = 0; r < w.rows; ++r) {
      std::vector<Elt> v(d_, 0);
      for (int c = 0; c < n; ++c) {
        Elt coef = w(r, c);
        if (!coef)
          continue;
        for (int i = 0; i < d_; ++i)
          v[i] = field_->add(v[i], field_->mul(coef, basis_(i, off_[b] + c)));
      }
      rows.append_row(v);
    }
    out.push_back(row_basis(*field_, rows));
  }
  out.insert(out.end(), chain_.begin() + b + 1, chain_.end());
  return Flag(field_, d_, std::move(out));
}

Flag Flag::lift(const FieldPtr &E) const
{
  if (E == field_)
    return *this;
  const auto &map = field_embedding(field_, E);
  std::vector<Subspace> out;
  for (auto &s : chain_)
    out.push_back(apply_map(s, map));
  return Flag(E, d_, std::move(out));
}

std::string Flag::signature() const
{
  std::ostringstream os;
  os << field_->name() << "[";
  for (int b = 0; b < length(); ++b)
    os << (b ? "," : "") << block_dim(b);
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------- eigen

Elt poly_eval(const Field &F, const std::vector<Elt> &p, Elt x)
{
  Elt acc = 0;
  for (size_t i = p.size(); i-- > 0;)
    acc = F.add(F.mul(acc, x), p[i]);
  return acc;
}

std::vector<Elt> charpoly(const Field &F, const Mat &a)
{
  require(a.rows == a.cols, ErrorCode::invalid_argument, "charpoly of non-square");
  int n = a.rows;
  Mat h = a;
  // similarity to upper Hessenberg form
  for (int c = 0; c + 2 < n; ++c) {
    int p = c + 1, sel = -1;
    for (int i = p; i < n; ++i)
      if (h(i, c)) {
        sel = i;
        break;
      }
    if (sel < 0)
      continue;
    if (sel != p) {
      for (int j = 0; j < n; ++j)
        std::swap(h(sel, j), h(p, j));
      for (int i = 0; i < n; ++i)
        std::swap(h(i, sel), h(i, p));
    }
    Elt pinv = F.inv(h(p, c));
    for (int j = c + 2; j < n; ++j) {
      Elt u = F.mul(h(j, c), pinv);
      if (!u)
        continue;
      for (int k = 0; k < n; ++k)
        h(j, k) = F.sub(h(j, k), F.mul(u, h(p, k)));
      for (int k = 0; k < n; ++k)
        h(k, p) = F.add(h(k, p), F.mul(u, h(k, j)));
    }
  }
  // p_{k+1} = (x - h_kk) p_k - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_i
  std::vector<Poly> ps{{1}};
  for (int k = 0; k < n; ++k) {
    Poly next(k + 2, 0);
    const Poly &pk = ps[k];
    for (int i = 0; i <= k; ++i) {
      next[i + 1] = F.add(next[i + 1], pk[i]);
      next[i] = F.sub(next[i], F.mul(h(k, k), pk[i]));
    }
    Elt prod = 1;
    for (int i = k - 1; i >= 0; --i) {
      prod = F.mul(prod, h(i + 1, i));
      if (!prod)
        break;
      Elt f = F.mul(h(i, k), prod);
      for (int j = 0; j <= i; ++j)
        next[j] = F.sub(next[j], F.mul(f, ps[i][j]));
    }
    ps.push_back(std::move(next));
  }
  return ps[n];
}

EigenStats eigen_stats(const FieldPtr &F, const Mat &a, int cap)
{
  require(a.rows == a.cols && a.rows >= 1, ErrorCode::invalid_argument, "eigen_stats shape");
  int d = a.rows;
  Poly cp = charpoly(*F, a);
  for (int e = 1; e <= cap; ++e) {
    uint64_t q = sat_pow(F->p(), int(F->k()) * e);
    require(q <= kFieldCap, ErrorCode::need_extension,
            "splitting field beyond " + std::to_string(kFieldCap) + " elements");
    FieldPtr E = Field::get(F->p(), F->k() * e);
    const Field &K = *E;
    const auto &map = field_embedding(F, E);
    Poly p;
    for (Elt c : cp)
      p.push_back(map[c]);
    std::vector<EigenStats::Root> roots;
    int total = 0;
    for (Elt r = 0; r < K.q() && total < d; ++r) {
      int mult = 0;
      while (p.size() > 1 && poly_eval(K, p, r) == 0) {
        p = poly_div_linear(K, p, r);
        ++mult;
      }
      if (mult)
        roots.push_back({r, mult, 0});
      total += mult;
    }
    if (total < d)
      continue;
    EigenStats out;
    out.E = E;
    out.degree = e;
    Mat ae = embed_mat(a, F, E);
    for (auto &r : roots) {
      r.geometric = d - rank(K, mat_sub(K, ae, scalar_mat(d, r.value)));
      if (r.geometric > out.m) {
        out.m = r.geometric;
        out.lambda = r.value;
      }
    }
    out.roots = std::move(roots);
    return out;
  }
  fail(ErrorCode::need_extension, "characteristic polynomial does not split within degree " +
                                      std::to_string(cap));
}

CentralizerFlag centralizer_flag(const FieldPtr &F, const Mat &a, int cap)
{
  const Field &B = *F;
  require(bool(inverse(B, a)), ErrorCode::invalid_argument, "centralizer_flag needs invertible a");
  int d = a.rows;
  CentralizerFlag out;
  out.eig = eigen_stats(F, a, cap);
  const FieldPtr &E = out.eig.E;
  const Field &K = *E;
  Mat ae = embed_mat(a, F, E);
  std::vector<Subspace> chain{zero_space(d)};
  Subspace acc = zero_space(d);
  for (auto &root : out.eig.roots) {
    Mat nil = mat_sub(K, ae, scalar_mat(d, root.value));
    Mat power = identity(d);
    Subspace base = acc;
    for (int i = 1; i <= root.algebraic; ++i) {
      power = mat_mul(K, power, nil);
      Subspace s = space_sum(K, base, kernel(K, power));
      if (s.rows > chain.back().rows)
        chain.push_back(s);
      acc = s;
    }
  }
  out.flag = Flag(E, d, chain);

  // centralizer algebra: kernel of X -> aX - Xa over the base field
  int n = d * d;
  Mat sys(n, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        int row = i * d + j;
        sys(row, k * d + j) = B.add(sys(row, k * d + j), a(i, k));
        sys(row, i * d + k) = B.sub(sys(row, i * d + k), a(k, j));
      }
  Subspace cent = kernel(B, sys);
  out.centralizer_basis = mats_of(cent, d);
  for (auto &x : out.centralizer_basis)
    if (!out.flag.stabilizes(embed_mat(x, F, E)))
      out.centralizer_stabilizes = false;
  uint64_t count = sat_pow(B.q(), cent.rows);
  if (count <= 5000) {
    out.exhaustive = true;
    std::vector<Elt> coef(cent.rows, 0);
    for (uint64_t idx = 0; idx < count; ++idx) {
      uint64_t t = idx;
      for (int i = 0; i < cent.rows; ++i) {
        coef[i] = Elt(t % B.q());
        t /= B.q();
      }
      Mat x = unflatten(combine(B, cent, coef), d);
      if (det(B, x) == 0)
        continue;
      if (!out.flag.stabilizes(embed_mat(x, F, E))) {
        out.centralizer_stabilizes = false;
        break;
      }
    }
  }
  out.bound = check_le("pdim <= d m(a) - 1", out.flag.pdim(), long(d) * out.eig.m - 1);
  return out;
}

// ---------------------------------------------------------------- affine subspaces

AffineSubspace::AffineSubspace(FieldPtr F, int d, Mat base, Subspace dirs)
  : field_(std::move(F)), d_(d)
{
  require(field_ && d_ >= 1, ErrorCode::invalid_argument, "affine subspace needs a field");
  require(base.rows == d_ && base.cols == d_, ErrorCode::invalid_argument, "base point shape");
  if (dirs.rows == 0 && dirs.cols == 0)
    dirs = zero_space(d_ * d_);
  require(dirs.cols == d_ * d_, ErrorCode::invalid_argument, "direction width");
  dirs_ = row_basis(*field_, dirs);
  base_ = unflatten(reduce_against(*field_, flatten(base), dirs_), d_);
}

AffineSubspace AffineSubspace::whole(FieldPtr F, int d)
{
  return AffineSubspace(std::move(F), d, Mat(d, d), full_space(d * d));
}

AffineSubspace AffineSubspace::point(FieldPtr F, const Mat &x)
{
  return AffineSubspace(std::move(F), x.rows, x, zero_space(x.rows * x.rows));
}

AffineSubspace AffineSubspace::hull(FieldPtr F, const std::vector<Mat> &pts)
{
  require(!pts.empty(), ErrorCode::invalid_argument, "hull of nothing");
  int d = pts[0].rows;
  Mat dirs(0, d * d);
  for (size_t i = 1; i < pts.size(); ++i)
    dirs.append_row(vec_sub(*F, flatten(pts[i]), flatten(pts[0])));
  return AffineSubspace(F, d, pts[0], dirs);
}

AffineSubspace AffineSubspace::trace_slice(FieldPtr F, int d, Elt t)
{
  Mat base(d, d);
  base(0, 0) = t;
  Subspace dirs = annihilator(*F, single_row(flatten(identity(d))));
  return AffineSubspace(std::move(F), d, base, dirs);
}

std::vector<Mat> AffineSubspace::direction_mats() const { return mats_of(dirs_, d_); }

bool AffineSubspace::contains(const Mat &x) const
{
  if (x.rows != d_ || x.cols != d_)
    return false;
  auto v = vec_sub(*field_, flatten(x), flatten(base_));
  return is_zero_vec(reduce_against(*field_, v, dirs_));
}

Subspace AffineSubspace::span() const
{
  Mat rows = dirs_;
  rows.append_row(flatten(base_));
  return row_basis(*field_, rows);
}

AffineSubspace AffineSubspace::canonical() const { return *this; }

uint64_t AffineSubspace::size() const { return sat_pow(field_->q(), dim()); }

Mat AffineSubspace::point_at(uint64_t index) const
{
  std::vector<Elt> coef(dim(), 0);
  for (int i = 0; i < dim(); ++i) {
    coef[i] = Elt(index % field_->q());
    index /= field_->q();
  }
  auto v = combine(*field_, dirs_, coef);
  auto b = flatten(base_);
  for (size_t i = 0; i < v.size(); ++i)
    v[i] = field_->add(v[i], b[i]);
  return unflatten(v, d_);
}

AffineSubspace AffineSubspace::left_mul(const Mat &a) const
{
  Mat dirs(0, d_ * d_);
  for (auto &m : direction_mats())
    dirs.append_row(flatten(mat_mul(*field_, a, m)));
  return AffineSubspace(field_, d_, mat_mul(*field_, a, base_), dirs);
}

AffineSubspace AffineSubspace::right_mul(const Mat &a) const
{
  Mat dirs(0, d_ * d_);
  for (auto &m : direction_mats())
    dirs.append_row(flatten(mat_mul(*field_, m, a)));
  return AffineSubspace(field_, d_, mat_mul(*field_, base_, a), dirs);
}

std::optional<AffineSubspace> AffineSubspace::intersect(const AffineSubspace &o) const
{
  require(o.field_ == field_ && o.d_ == d_, ErrorCode::invalid_argument, "ambient mismatch");
  const Field &K = *field_;
  int n = d_ * d_;
  Mat sys(n, dim() + o.dim());
  for (int c = 0; c < dim(); ++c)
    for (int i = 0; i < n; ++i)
      sys(i, c) = dirs_(c, i);
  for (int c = 0; c < o.dim(); ++c)
    for (int i = 0; i < n; ++i)
      sys(i, dim() + c) = K.neg(o.dirs_(c, i));
  auto sol = solve(K, sys, vec_sub(K, flatten(o.base_), flatten(base_)));
  if (!sol)
    return std::nullopt;
  std::vector<Elt> coef(sol->begin(), sol->begin() + dim());
  auto v = combine(K, dirs_, coef);
  auto b = flatten(base_);
  for (int i = 0; i < n; ++i)
    v[i] = K.add(v[i], b[i]);
  return AffineSubspace(field_, d_, unflatten(v, d_), space_intersect(K, dirs_, o.dirs_));
}

AffineSubspace AffineSubspace::lift(const FieldPtr &E) const
{
  if (E == field_)
    return *this;
  const auto &map = field_embedding(field_, E);
  return AffineSubspace(E, d_, apply_map(base_, map), apply_map(dirs_, map));
}

bool AffineSubspace::operator==(const AffineSubspace &o) const
{
  return field_ == o.field_ && d_ == o.d_ && base_ == o.base_ && dirs_ == o.dirs_;
}

std::optional<Mat> find_invertible(const AffineSubspace &V, uint64_t budget, uint64_t seed)
{
  const Field &K = *V.field();
  uint64_t total = V.size();
  if (total <= budget) {
    for (uint64_t i = 0; i < total; ++i) {
      Mat x = V.point_at(i);
      if (det(K, x) != 0)
        return x;
    }
    return std::nullopt;
  }
  if (det(K, V.base()) != 0)
    return V.base();
  for (auto &m : V.direction_mats()) {
    Mat x = mat_add(K, V.base(), m);
    if (det(K, x) != 0)
      return x;
  }
  Stream rng(seed, 0x51a7);
  for (uint64_t t = 0; t < budget; ++t) {
    std::vector<Elt> coef(V.dim());
    for (auto &c : coef)
      c = Elt(rng.below(K.q()));
    auto v = combine(K, V.dirs(), coef);
    Mat x = mat_add(K, V.base(), unflatten(v, V.d()));
    if (det(K, x) != 0)
      return x;
  }
  return std::nullopt;
}

std::optional<AffineSubspace> transporter_space(const AffineSubspace &W,
                                                const AffineSubspace &V, Side side)
{
  require(W.field() == V.field() && W.d() == V.d(), ErrorCode::invalid_argument,
          "transporter: ambient mismatch");
  const Field &K = *V.field();
  int d = V.d(), n = d * d;
  Subspace normals = annihilator(K, V.dirs());
  if (normals.rows == 0)
    return AffineSubspace::whole(V.field(), d);
  std::vector<Mat> ws{W.base()};
  for (auto &m : W.direction_mats())
    ws.push_back(m);
  Mat sys(0, n);
  std::vector<Elt> rhs;
  auto vb = flatten(V.base());
  for (size_t wi = 0; wi < ws.size(); ++wi) {
    const Mat &w = ws[wi];
    for (int r = 0; r < normals.rows; ++r) {
      auto nrm = normals.row(r);
      std::vector<Elt> coef(n, 0);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          Elt nv = nrm[i * d + j];
          if (!nv)
            continue;
          for (int k = 0; k < d; ++k) {
            if (side == Side::left) {
              // (x w)_ij = sum_k x_ik w_kj
              coef[i * d + k] = K.add(coef[i * d + k], K.mul(nv, w(k, j)));
            } else {
              // (w x)_ij = sum_k w_ik x_kj
              coef[k * d + j] = K.add(coef[k * d + j], K.mul(nv, w(i, k)));
            }
          }
        }
      sys.append_row(coef);
      rhs.push_back(wi == 0 ? dot(K, nrm, vb) : 0);
    }
  }
  auto sol = solve(K, sys, rhs);
  if (!sol)
    return std::nullopt;
  return AffineSubspace(V.field(), d, unflatten(*sol, d), kernel(K, sys));
}

std::vector<Mat> Subalgebra::mats() const { return mats_of(basis, d); }

bool Subalgebra::contains(const Mat &x) const
{
  return is_zero_vec(reduce_against(*F, flatten(x), basis));
}

bool Subalgebra::closed() const
{
  auto ms = mats();
  for (auto &x : ms)
    for (auto &y : ms)
      if (!contains(mat_mul(*F, x, y)))
        return false;
  return true;
}

TransporterReport transporter(const AffineSubspace &W, const AffineSubspace &V, Side side,
                              uint64_t seed)
{
  const Field &K = *V.field();
  int d = V.d();
  TransporterReport rep;
  rep.side = side;
  rep.X = transporter_space(W, V, side);
  auto a = find_invertible(W, 4096, seed);
  rep.dim_bound = {"dim X <= dim V", "empty", std::to_string(V.dim()), true};
  if (!a)
    return rep;
  rep.w_invertible = true;
  rep.a = *a;
  if (!rep.X)
    return rep;
  rep.dim_bound = check_le("dim X <= dim V", rep.X->dim(), V.dim());
  rep.equality = rep.X->dim() == V.dim();
  if (!rep.equality)
    return rep;
  auto b = find_invertible(V, 4096, seed + 1);
  if (!b)
    return rep;
  rep.b = *b;
  // left: U + 1 = {y : Vy in V}; right: U + 1 = {y : yV in V}
  auto R = transporter_space(V, V, side == Side::left ? Side::right : Side::left);
  require(R && R->contains(identity(d)), ErrorCode::internal, "self transporter misses 1");
  Subalgebra U{V.field(), d, R->dirs()};
  rep.closed = U.closed();
  Mat ainv = *inverse(K, *a);
  auto in_one_plus_u = [&](const Mat &x) { return U.contains(mat_sub(K, x, identity(d))); };
  rep.w_inside = true;
  {
    Mat t = side == Side::left ? mat_mul(K, ainv, W.base()) : mat_mul(K, W.base(), ainv);
    if (!in_one_plus_u(t))
      rep.w_inside = false;
    for (auto &m : W.direction_mats()) {
      Mat u = side == Side::left ? mat_mul(K, ainv, m) : mat_mul(K, m, ainv);
      if (!U.contains(u))
        rep.w_inside = false;
    }
  }
  rep.v_contains = V.contains(*b);
  for (auto &u : U.mats()) {
    Mat bu = side == Side::left ? mat_mul(K, *b, u) : mat_mul(K, u, *b);
    if (!V.contains(mat_add(K, *b, bu)))
      rep.v_contains = false;
  }
  // sampled products inside (1+U) n GL
  Stream rng(seed, 0x6a0u);
  auto ums = U.mats();
  std::vector<Mat> pts;
  for (int t = 0; t < 64 && pts.size() < 24; ++t) {
    Mat x = identity(d);
    for (auto &u : ums)
      x = mat_add(K, x, mat_scale(K, Elt(rng.below(K.q())), u));
    if (det(K, x) != 0)
      pts.push_back(x);
  }
  rep.group_sampled = true;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = 0; j < pts.size(); j += 3)
      if (!in_one_plus_u(mat_mul(K, pts[i], pts[j])))
        rep.group_sampled = false;
  rep.U = std::move(U);
  return rep;
}

FrobeniusReport frobenius_orthogonality_check(const AffineSubspace &V, const AffineSubspace &W,
                                              Elt t)
{
  require(V.field() == W.field() && V.d() == W.d(), ErrorCode::invalid_argument,
          "frobenius check: ambient mismatch");
  const Field &K = *V.field();
  int d = V.d();
  FrobeniusReport rep;
  auto tr = [&](const Mat &x, const Mat &y) { return trace(K, mat_mul(K, x, y)); };
  auto dv = V.direction_mats(), dw = W.direction_mats();
  auto fail_with = [&](const Mat &v, const Mat &w) {
    rep.hypothesis = false;
    rep.witness_v = v;
    rep.witness_w = w;
  };
  if (tr(V.base(), W.base()) != t)
    fail_with(V.base(), W.base());
  for (size_t i = 0; i < dv.size() && rep.hypothesis; ++i)
    if (tr(dv[i], W.base()) != 0)
      fail_with(mat_add(K, V.base(), dv[i]), W.base());
  for (size_t j = 0; j < dw.size() && rep.hypothesis; ++j)
    if (tr(V.base(), dw[j]) != 0)
      fail_with(V.base(), mat_add(K, W.base(), dw[j]));
  for (size_t i = 0; i < dv.size() && rep.hypothesis; ++i)
    for (size_t j = 0; j < dw.size() && rep.hypothesis; ++j)
      if (tr(dv[i], dw[j]) != 0)
        fail_with(mat_add(K, V.base(), dv[i]), mat_add(K, W.base(), dw[j]));
  rep.span_v = V.span_dim();
  rep.span_w = W.span_dim();
  rep.bound = check_le("dim span V + dim span W <= d^2 + 1", rep.span_v + rep.span_w,
                       d * d + 1);
  return rep;
}

// ---------------------------------------------------------------- invariant subspaces

Subspace algebra_span(const Field &F, int d, const std::vector<Mat> &gens)
{
  std::vector<Mat> found{identity(d)};
  Subspace S = single_row(flatten(identity(d)));
  for (size_t idx = 0; idx < found.size() && S.rows < d * d; ++idx)
    for (auto &g : gens) {
      Mat y = mat_mul(F, g, found[idx]);
      auto v = flatten(y);
      if (is_zero_vec(reduce_against(F, v, S)))
        continue;
      S = space_sum(F, S, single_row(v));
      found.push_back(y);
    }
  return S;
}

Subspace spin(const Field &F, const std::vector<Mat> &gens, const std::vector<Elt> &v)
{
  int n = int(v.size());
  if (is_zero_vec(v))
    return zero_space(n);
  std::vector<std::vector<Elt>> found{v};
  Subspace S = row_basis(F, single_row(v));
  for (size_t idx = 0; idx < found.size() && S.rows < n; ++idx)
    for (auto &g : gens) {
      auto w = mat_vec(F, g, found[idx]);
      if (is_zero_vec(reduce_against(F, w, S)))
        continue;
      S = space_sum(F, S, single_row(w));
      found.push_back(w);
    }
  return S;
}

bool is_invariant(const Field &F, const std::vector<Mat> &gens, const Subspace &U)
{
  for (auto &g : gens)
    for (int r = 0; r < U.rows; ++r)
      if (!is_zero_vec(reduce_against(F, mat_vec(F, g, U.row(r)), U)))
        return false;
  return true;
}

namespace {

// visits representatives of the lines of the row space of `basis`
template <class Fn>
bool for_each_line(const Field &F, const Mat &basis, Fn &&fn)
{
  int k = basis.rows;
  uint64_t q = F.q();
  for (int lead = 0; lead < k; ++lead) {
    uint64_t tail = sat_pow(q, k - lead - 1);
    std::vector<Elt> coef(k, 0);
    coef[lead] = 1;
    for (uint64_t idx = 0; idx < tail; ++idx) {
      uint64_t t = idx;
      for (int i = lead + 1; i < k; ++i) {
        coef[i] = Elt(t % q);
        t /= q;
      }
      if (fn(combine(F, basis, coef)))
        return true;
    }
  }
  return false;
}

uint64_t line_count(uint64_t q, int k)
{
  uint64_t s = 0;
  for (int i = 0; i < k; ++i)
    s += sat_pow(q, i);
  return s;
}

} // namespace

InvariantResult invariant_subspace(const FieldPtr &Fp, int d, const std::vector<Mat> &gens,
                                   uint64_t seed)
{
  const Field &F = *Fp;
  for (auto &g : gens)
    require(g.rows == d && g.cols == d, ErrorCode::invalid_argument, "generator shape");
  InvariantResult res;
  Subspace alg = algebra_span(F, d, gens);
  res.algebra_dim = alg.rows;
  auto irreducible = [&](std::string why) {
    res.irreducible = true;
    res.absolutely_irreducible = res.algebra_dim == d * d;
    res.sub = full_space(d);
    res.certificate = std::move(why);
    return res;
  };
  if (d == 1)
    return irreducible("dimension one");
  if (res.algebra_dim == d * d)
    return irreducible("full matrix algebra");
  auto proper = [&](const Subspace &s) { return s.rows > 0 && s.rows < d; };
  auto found = [&](Subspace s, std::string why) {
    res.sub = std::move(s);
    res.certificate = std::move(why);
    return res;
  };
  std::vector<Mat> tgens;
  for (auto &g : gens)
    tgens.push_back(transpose(g));

  Stream rng(seed, 0x1f1a9);
  std::vector<std::vector<Elt>> probes;
  for (int i = 0; i < d; ++i)
    probes.push_back(unit_vec(d, i));
  for (int t = 0; t < 3; ++t) {
    std::vector<Elt> v(d);
    for (auto &x : v)
      x = Elt(rng.below(F.q()));
    probes.push_back(v);
  }
  for (auto &v : probes) {
    Subspace s = spin(F, gens, v);
    if (proper(s))
      return found(s, "spin-up");
  }
  for (auto &v : probes) {
    Subspace s = spin(F, tgens, v);
    if (proper(s))
      return found(annihilator(F, s), "dual spin-up");
  }

  // Norton's criterion on singular elements of the algebra
  auto algm = mats_of(alg, d);
  std::vector<Mat> cands = gens;
  cands.insert(cands.end(), algm.begin(), algm.end());
  for (int t = 0; t < 32; ++t) {
    std::vector<Elt> coef(alg.rows);
    for (auto &c : coef)
      c = Elt(rng.below(F.q()));
    cands.push_back(unflatten(combine(F, alg, coef), d));
  }
  constexpr uint64_t kMaxLines = 4000;
  for (auto &z : cands) {
    Poly cp = charpoly(F, z);
    if (distinct_root_count(F, cp) == 0)
      continue;
    Elt lambda = smallest_root(F, cp);
    Mat y = mat_sub(F, z, scalar_mat(d, lambda));
    Mat ker = kernel(F, y);
    if (line_count(F.q(), ker.rows) > kMaxLines)
      continue;
    Subspace hit;
    bool got = for_each_line(F, ker, [&](const std::vector<Elt> &v) {
      Subspace s = spin(F, gens, v);
      if (proper(s)) {
        hit = s;
        return true;
      }
      return false;
    });
    if (got)
      return found(hit, "kernel line spin-up");
    Mat kert = kernel(F, transpose(y));
    Subspace s = spin(F, tgens, kert.row(0));
    if (proper(s))
      return found(annihilator(F, s), "dual kernel spin-up");
    return irreducible("Norton criterion");
  }

  if (sat_pow(F.q(), d) <= 100000) {
    Subspace hit;
    bool got = for_each_line(F, full_space(d), [&](const std::vector<Elt> &v) {
      Subspace s = spin(F, gens, v);
      if (proper(s)) {
        hit = s;
        return true;
      }
      return false;
    });
    if (got)
      return found(hit, "exhaustive line search");
    return irreducible("exhaustive line search");
  }
  fail(ErrorCode::internal, "invariant subspace search inconclusive");
}

std::vector<Subspace> all_invariant_subspaces(const Field &F, int d,
                                              const std::vector<Mat> &gens)
{
  require(sat_pow(F.q(), d) <= 100000, ErrorCode::cap_exceeded,
          "exhaustive invariant subspace enumeration too large");
  std::set<Subspace> out{zero_space(d)};
  std::vector<Subspace> cyclic;
  for_each_line(F, full_space(d), [&](const std::vector<Elt> &v) {
    Subspace s = spin(F, gens, v);
    if (out.insert(s).second)
      cyclic.push_back(s);
    return false;
  });
  // every invariant subspace is a sum of cyclic ones
  std::vector<Subspace> frontier(out.begin(), out.end());
  while (!frontier.empty()) {
    std::vector<Subspace> next;
    for (auto &s : frontier)
      for (auto &c : cyclic) {
        Subspace t = space_sum(F, s, c);
        if (out.insert(t).second)
          next.push_back(t);
      }
    frontier = std::move(next);
  }
  return {out.begin(), out.end()};
}

Flag maximal_invariant_flag(const Flag &F, const std::vector<Mat> &algebra_gens, uint64_t seed,
                            int cap)
{
  for (auto &g : algebra_gens)
    require(F.stabilizes(g), ErrorCode::precondition, "generator does not stabilize the flag");
  const FieldPtr &base = F.field();
  for (int t = 1; t <= cap; ++t) {
    if (t > 1 && sat_pow(base->p(), int(base->k()) * t) > kFieldCap)
      break;
    FieldPtr E = t == 1 ? base : Field::get(base->p(), base->k() * t);
    Flag cur = F.lift(E);
    std::vector<Mat> gens;
    for (auto &g : algebra_gens)
      gens.push_back(embed_mat(g, base, E));
    bool extend = false;
    for (int b = 0; b < cur.length() && !extend;) {
      int n = cur.block_dim(b);
      if (n == 1) {
        ++b;
        continue;
      }
      std::vector<Mat> bg;
      for (auto &g : gens)
        bg.push_back(cur.block(g, b));
      InvariantResult inv = invariant_subspace(E, n, bg, seed);
      if (inv.absolutely_irreducible) {
        ++b;
      } else if (inv.irreducible) {
        extend = true;
      } else {
        cur = cur.refine(b, {zero_space(n), inv.sub, full_space(n)});
      }
    }
    if (!extend)
      return cur;
  }
  fail(ErrorCode::need_extension, "block algebra not split within the extension cap");
}

SubalgFlagReport subalg_to_flag(const Subalgebra &U, const Flag &F, const BigInt &rho_num,
                                const BigInt &rho_den, uint64_t seed)
{
  require(U.d == F.d(), ErrorCode::invalid_argument, "subalgebra and flag sizes differ");
  require(rho_num >= 0 && rho_den > 0, ErrorCode::invalid_argument, "rho must be nonnegative");
  std::vector<Mat> mats;
  for (auto &x : U.mats())
    mats.push_back(embed_mat(x, U.F, F.field()));
  for (auto &x : mats)
    require(F.stabilizes(x), ErrorCode::precondition, "subalgebra leaves the flag stabilizer");
  SubalgFlagReport rep;
  rep.fdim_u = F.fdim(mats);
  require(BigInt(rep.fdim_u) * rho_den <= rho_num * F.pdim(), ErrorCode::precondition,
          "F-dimension of the subalgebra exceeds rho pdim");
  rep.G = maximal_invariant_flag(F, mats, seed);
  rep.span_inside = true;
  for (auto &x : mats)
    if (!rep.G.stabilizes(embed_mat(x, F.field(), rep.G.field())))
      rep.span_inside = false;
  BigInt pg = rep.G.pdim(), pf = F.pdim();
  rep.bound = check_le("pdim(G)^2 <= rho pdim(F)^2", pg * pg, 1, rho_num * pf * pf, rho_den);
  return rep;
}

// ---------------------------------------------------------------- rank inequalities

RankReport rank_inequality_check(const Field &F, const Mat &x, const Mat &y)
{
  require(x.rows == y.rows && x.cols == y.cols && x.rows == x.cols,
          ErrorCode::invalid_argument, "rank check needs square matrices of one size");
  int d = x.rows;
  RankReport r;
  r.rk_x = rank(F, x);
  r.rk_y = rank(F, y);
  r.rk_sum = rank(F, mat_add(F, x, y));
  Subspace im_x = row_basis(F, transpose(x)), im_y = row_basis(F, transpose(y));
  r.im_sum = space_sum(F, im_x, im_y).rows;
  Subspace ker_y = kernel(F, y);
  r.ker_meet = space_intersect(F, kernel(F, x), ker_y).rows;
  r.rk_pi_x = r.im_sum - r.rk_y;
  Subspace x_ker_y = image_of(F, x, ker_y);
  r.rk_x_iota = x_ker_y.rows;
  r.rk_pi_x_iota = space_sum(F, x_ker_y, im_y).rows - r.rk_y;
  r.lemma = check_le("dim(im x + im y) + codim(ker x n ker y) <= rk x + rk y + rk(x+y)",
                     r.im_sum + (d - r.ker_meet), r.rk_x + r.rk_y + r.rk_sum);
  r.cor_left = check_le("2 rk(pi x iota) <= rk(pi x) + rk(x iota)", 2 * r.rk_pi_x_iota,
                        r.rk_pi_x + r.rk_x_iota);
  r.cor_right = check_le("rk(pi x) + rk(x iota) <= rk(x+y) + rk x - rk y",
                         r.rk_pi_x + r.rk_x_iota, r.rk_sum + r.rk_x - r.rk_y);
  return r;
}

// ---------------------------------------------------------------- matrix-set files

MatrixSet parse_matrix_set(const std::string &text)
{
  std::istringstream in(text);
  long long q = 0, d = 0, n = 0;
  require(bool(in >> q >> d >> n), ErrorCode::io, "matrix set: bad header");
  auto pk = prime_power(uint64_t(std::max(q, 0LL)));
  require(pk.first != 0, ErrorCode::invalid_argument, "matrix set: q is not a prime power");
  require(d >= 1 && d <= 64 && n >= 0, ErrorCode::invalid_argument, "matrix set: bad d or n");
  MatrixSet s;
  s.F = Field::get(pk.first, pk.second);
  s.d = int(d);
  for (long long m = 0; m < n; ++m) {
    Mat x(s.d, s.d);
    for (auto &v : x.a) {
      long long e;
      require(bool(in >> e), ErrorCode::io, "matrix set: truncated");
      require(e >= 0 && e < q, ErrorCode::invalid_argument, "matrix set: entry out of range");
      v = Elt(e);
    }
    s.mats.push_back(std::move(x));
  }
  return s;
}

std::string format_matrix_set(const MatrixSet &s)
{
  std::ostringstream os;
  os << s.F->q() << " " << s.d << " " << s.mats.size() << "\n";
  for (auto &x : s.mats) {
    for (int i = 0; i < x.rows; ++i) {
      for (int j = 0; j < x.cols; ++j)
        os << (j ? " " : "") << x(i, j);
      os << "\n";
    }
    os << "\n";
  }
  return os.str();
}

MatrixSet read_matrix_set(const std::string &path)
{
  std::ifstream in(path);
  require(bool(in), ErrorCode::io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix_set(ss.str());
}

void write_matrix_set(const std::string &path, const MatrixSet &s)
{
  std::ofstream out(path);
  require(bool(out), ErrorCode::io, "cannot write " + path);
  out << format_matrix_set(s);
}

} // namespace grpcomb
