#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "grpcomb/error.hpp"
#include "grpcomb/gl.hpp"
#include "grpcomb/rng.hpp"
#include "grpcomb/structure.hpp"

namespace grpcomb {

namespace {

const MatrixGroup *as_matrix_group(const GroupPtr &G)
{
  auto *m = dynamic_cast<const MatrixGroup *>(G.get());
  require(m != nullptr, ErrorCode::invalid_argument, "matrix group expected");
  return m;
}

Mat inv_mat(const Field &K, const Mat &x)
{
  auto r = inverse(K, x);
  require(bool(r), ErrorCode::internal, "singular matrix");
  return *r;
}

BigInt bpow(const BigInt &b, long e) { return big_pow(b, unsigned(std::max(e, 0L))); }

std::string affine_key(const AffineSubspace &V)
{
  std::string s;
  auto put = [&](const Mat &m) {
    s.append(reinterpret_cast<const char *>(&m.rows), sizeof m.rows);
    s.append(reinterpret_cast<const char *>(m.a.data()), m.a.size() * sizeof(Elt));
  };
  put(V.canonical().base());
  put(V.dirs());
  return s;
}

bool is_scalar(const Mat &x)
{
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j)
      if (i == j ? x(i, j) != x(0, 0) : x(i, j) != 0)
        return false;
  return true;
}

std::vector<int> block_of(const Flag &F)
{
  std::vector<int> out(F.d());
  for (int b = 0; b < F.length(); ++b)
    for (int i = F.block_offset(b); i < F.block_offset(b) + F.block_dim(b); ++i)
      out[i] = b;
  return out;
}

// Q x Q^-1 for x = E_rc
std::vector<Elt> unit_back(const Field &K, const Mat &Q, const Mat &Qi, int r, int c)
{
  int d = Q.rows;
  std::vector<Elt> v(size_t(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      v[size_t(i) * d + j] = K.mul(Q(i, r), Qi(c, j));
  return v;
}

Id first_member(const GroupSubset &S, const Embedder &emb, const AffineSubspace &V)
{
  for (Id a : S.ids())
    if (V.contains(emb(a)))
      return a;
  return S.group()->order();
}

// l (1 + U) r inside V
bool bitranslate_inside(const Field &K, const AffineSubspace &V, const Mat &l, const Subalgebra &U,
                        const Mat &r)
{
  Mat lr = mat_mul(K, l, r);
  if (!V.contains(lr))
    return false;
  for (auto &u : U.mats())
    if (!V.contains(mat_add(K, lr, mat_mul(K, mat_mul(K, l, u), r))))
      return false;
  return true;
}

// sum over b in A^2 of #{a in A^2 : ab in V}^k
BigInt closed_form_sum(const ApproxInput &in, const Embedder &emb, const AffineSubspace &V, int k)
{
  const FiniteGroup &G = *in.A2.group();
  std::unordered_map<Id, bool> inside;
  BigInt total = 0;
  for (Id b : in.A2.ids()) {
    uint64_t c = 0;
    for (Id a : in.A2.ids()) {
      Id ab = G.mul(a, b);
      auto it = inside.find(ab);
      if (it == inside.end())
        it = inside.emplace(ab, V.contains(emb(ab))).first;
      c += it->second;
    }
    total += bpow(c, k);
  }
  return total;
}

long floor_div_sqrt2(long D)
{
  long x = long(std::floor(D / std::sqrt(2.0L)));
  while (2 * (x + 1) * (x + 1) <= D * D)
    ++x;
  while (x > 0 && 2 * x * x > D * D)
    --x;
  return x;
}

Subalgebra zero_algebra(const FieldPtr &F, int d) { return Subalgebra{F, d, zero_space(d * d)}; }

// The translates a^-1 V (a in A^2) and their intersections, interned by content.
class Lattice {
public:
  Lattice(const ApproxInput &in, const Embedder &emb, const AffineSubspace &V) : V_(V)
  {
    const FiniteGroup &G = *in.A2.group();
    for (Id a : in.A2.ids())
      pts_.push_back(emb(a));
    std::map<std::string, int> seen;
    for (Id a : in.A2.ids()) {
      AffineSubspace T = V.left_mul(emb(G.inv(a)));
      auto [it, fresh] = seen.emplace(affine_key(T), int(trans_.size()));
      if (fresh) {
        trans_.push_back(intern(T));
        mult_.push_back(0);
        rep_.push_back(a);
      }
      mult_[it->second]++;
    }
  }

  int translates() const { return int(trans_.size()); }
  int translate_node(int t) const { return trans_[t]; }
  uint64_t mult(int t) const { return mult_[t]; }
  Id rep(int t) const { return rep_[t]; }
  const AffineSubspace &node(int i) const { return nodes_[i]; }
  size_t weight(int i) const { return w_[i]; }
  size_t node_count() const { return nodes_.size(); }

  // node i meet translate t, -1 when empty
  int meet(int i, int t)
  {
    uint64_t key = (uint64_t(uint32_t(i)) << 32) | uint32_t(t);
    auto it = meet_.find(key);
    if (it != meet_.end())
      return it->second;
    auto I = nodes_[i].intersect(nodes_[trans_[t]]);
    int r = I ? intern(*I) : -1;
    meet_.emplace(key, r);
    return r;
  }

  int of_set(const std::vector<int> &ts)
  {
    int n = trans_[ts[0]];
    for (size_t i = 1; i < ts.size() && n >= 0; ++i)
      n = meet(n, ts[i]);
    return n;
  }

  // |A^2 n Lmul(node -> V)|
  size_t xcount(int i)
  {
    auto it = x_.find(i);
    if (it != x_.end())
      return it->second;
    size_t c = 0;
    if (auto X = transporter_space(nodes_[i], V_, Side::left))
      for (auto &p : pts_)
        c += X->contains(p);
    x_.emplace(i, c);
    return c;
  }

private:
  int intern(const AffineSubspace &S)
  {
    auto [it, fresh] = index_.emplace(affine_key(S), int(nodes_.size()));
    if (fresh) {
      nodes_.push_back(S);
      size_t c = 0;
      for (auto &p : pts_)
        c += S.contains(p);
      w_.push_back(c);
    }
    return it->second;
  }

  AffineSubspace V_;
  std::vector<Mat> pts_;
  std::vector<int> trans_;
  std::vector<uint64_t> mult_;
  std::vector<Id> rep_;
  std::vector<AffineSubspace> nodes_;
  std::vector<size_t> w_;
  std::map<std::string, int> index_;
  std::unordered_map<uint64_t, int> meet_;
  std::unordered_map<int, size_t> x_;
};

struct Cand {
  int node;
  std::vector<int> path; // translates, strictly shrinking
};

// Greedy tuple walk: a position joins the intersection iff it shrinks it.
// Leaves are reduced to an inclusion-minimal subfamily and grouped by the
// positions that survive.
class TupleRun {
public:
  TupleRun(Lattice &lat, int k) : lat_(lat), k_(k) {}

  void run()
  {
    std::vector<std::pair<int, int>> incl;
    dfs(0, -2, incl, 1);
  }

  uint64_t total = 0;
  std::map<uint32_t, uint64_t> mask_sum;
  std::map<uint32_t, std::map<int, std::vector<int>>> mask_nodes;

private:
  void dfs(int depth, int node, std::vector<std::pair<int, int>> &incl, uint64_t weight)
  {
    if (depth == k_) {
      leaf(node, incl, weight);
      return;
    }
    for (int t = 0; t < lat_.translates(); ++t) {
      uint64_t w2 = weight * lat_.mult(t);
      bool in_r = std::any_of(incl.begin(), incl.end(), [&](auto &p) { return p.first == t; });
      if (in_r) {
        dfs(depth + 1, node, incl, w2);
        continue;
      }
      int nn = node == -2 ? lat_.translate_node(t) : lat_.meet(node, t);
      if (nn == -1) // empty: no A^2 points
        continue;
      if (nn == node) {
        dfs(depth + 1, node, incl, w2);
        continue;
      }
      incl.push_back({t, depth});
      dfs(depth + 1, nn, incl, w2);
      incl.pop_back();
    }
  }

  void leaf(int node, const std::vector<std::pair<int, int>> &incl, uint64_t weight)
  {
    std::vector<int> R;
    for (auto &p : incl)
      R.push_back(p.first);
    std::sort(R.begin(), R.end());
    auto it = minimal_.find(R);
    if (it == minimal_.end()) {
      std::vector<int> cur = R;
      int target = lat_.of_set(R);
      for (int t : R) {
        std::vector<int> trial;
        for (int u : cur)
          if (u != t)
            trial.push_back(u);
        if (!trial.empty() && lat_.of_set(trial) == target)
          cur = trial;
      }
      it = minimal_.emplace(R, cur).first;
    }
    const auto &kept = it->second;
    uint32_t mask = 0;
    std::vector<int> path;
    for (auto &p : incl)
      if (std::binary_search(kept.begin(), kept.end(), p.first)) {
        mask |= 1u << p.second;
        path.push_back(p.first);
      }
    uint64_t v = weight * lat_.weight(node);
    total += v;
    mask_sum[mask] += v;
    mask_nodes[mask].emplace(node, path);
  }

  Lattice &lat_;
  int k_;
  std::map<std::vector<int>, std::vector<int>> minimal_;
};

BigInt score_of(size_t w, size_t x, int k, int j, size_t n)
{
  return BigInt(w) * bpow(x, k - j) * bpow(n, j - 1);
}

} // namespace

// ---------------------------------------------------------------- embedder

Embedder::Embedder(const GroupPtr &G)
  : ptr_(G), G_(as_matrix_group(G)), tower_{G_->field_ptr()}
{
}

const Mat &Embedder::operator()(Id a) const
{
  auto it = cache_.find(a);
  if (it != cache_.end())
    return it->second;
  return cache_.emplace(a, lift(G_->matrix(a))).first->second;
}

Mat Embedder::lift(const Mat &x) const
{
  Mat y = x;
  for (size_t i = 1; i < tower_.size(); ++i)
    y = embed_mat(y, tower_[i - 1], tower_[i]);
  return y;
}

void Embedder::extend(const FieldPtr &E)
{
  if (E == field())
    return;
  require(E->p() == field()->p() && E->k() % field()->k() == 0, ErrorCode::invalid_argument,
          "not an extension of the working field");
  tower_.push_back(E);
  cache_.clear();
}

ApproxInput approx_input(const GroupSubset &A, uint64_t K)
{
  require(A.centered(), ErrorCode::precondition, "the set must be centered");
  ApproxInput in;
  in.A = A;
  in.A2 = power(A, 2);
  in.K = K ? K : std::max<uint64_t>(1, cover_witness(in.A2, A).size());
  return in;
}

// ---------------------------------------------------------------- affine helpers

AffineSubspace parabolic_space(const Flag &F)
{
  const Field &K = *F.field();
  int d = F.d();
  Mat Qi = inv_mat(K, F.basis());
  auto blk = block_of(F);
  Mat dirs(0, d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if (blk[r] <= blk[c])
        dirs.append_row(unit_back(K, F.basis(), Qi, r, c));
  return AffineSubspace(F.field(), d, Mat(d, d), dirs);
}

AffineSubspace vtr_slice(const Flag &F, const std::vector<Elt> &t)
{
  require(int(t.size()) == F.length(), ErrorCode::invalid_argument, "one trace per block");
  const Field &K = *F.field();
  int d = F.d();
  const Mat &Q = F.basis();
  Mat Qi = inv_mat(K, Q);
  auto blk = block_of(F);
  Mat base(d, d);
  for (int b = 0; b < F.length(); ++b) {
    int o = F.block_offset(b);
    base(o, o) = t[b];
  }
  base = mat_mul(K, mat_mul(K, Q, base), Qi);
  Mat dirs(0, d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      if (r != c && blk[r] <= blk[c])
        dirs.append_row(unit_back(K, Q, Qi, r, c));
      int o = F.block_offset(blk[r]);
      if (r == c && r != o) {
        auto v = unit_back(K, Q, Qi, r, r);
        auto w = unit_back(K, Q, Qi, o, o);
        for (size_t i = 0; i < v.size(); ++i)
          v[i] = K.sub(v[i], w[i]);
        dirs.append_row(v);
      }
    }
  return AffineSubspace(F.field(), d, base, dirs);
}

bool affine_leq(const AffineSubspace &X, const AffineSubspace &Y)
{
  require(X.field() == Y.field() && X.d() == Y.d(), ErrorCode::invalid_argument,
          "affine subspaces over different spaces");
  return Y.contains(X.base()) && space_leq(*X.field(), X.dirs(), Y.dirs());
}

long affine_fdim(const Flag &F, const AffineSubspace &V)
{
  std::vector<Mat> mats{V.base()};
  for (auto &m : V.direction_mats())
    mats.push_back(m);
  return F.fdim(mats);
}

AffineSubspace project_block(const Flag &F, const AffineSubspace &V, int b)
{
  int n = F.block_dim(b);
  Mat rows(0, n * n);
  for (auto &m : V.direction_mats())
    rows.append_row(flatten(F.block(m, b)));
  return AffineSubspace(F.field(), n, F.block(V.base(), b), span_rows(*F.field(), rows));
}

std::vector<Id> members_in(const GroupSubset &S, const Embedder &emb, const AffineSubspace &V)
{
  std::vector<Id> out;
  for (Id a : S.ids())
    if (V.contains(emb(a)))
      out.push_back(a);
  return out;
}

std::vector<Id> members_stabilizing(const GroupSubset &S, const Embedder &emb, const Flag &F)
{
  require(F.field() == emb.field(), ErrorCode::invalid_argument,
          "flag and embedder over different fields");
  std::vector<Id> out;
  for (Id a : S.ids())
    if (F.stabilizes(emb(a)))
      out.push_back(a);
  return out;
}

bool refines(const Flag &G, const Flag &F)
{
  Flag Fl = F.field() == G.field() ? F : F.lift(G.field());
  for (auto &s : Fl.chain())
    if (std::find(G.chain().begin(), G.chain().end(), s) == G.chain().end())
      return false;
  return true;
}

// ---------------------------------------------------------------- decrement

const char *decrement_mode_name(DecrementMode m)
{
  switch (m) {
  case DecrementMode::exhaustive: return "exhaustive";
  case DecrementMode::search: return "search";
  case DecrementMode::sampled: return "sampled";
  }
  return "?";
}

DecrementResult dimension_decrement(const ApproxInput &in, const Embedder &emb, const Flag &F,
                                    const AffineSubspace &V, int k, const DecrementOptions &opt)
{
  require(k >= 1, ErrorCode::invalid_argument, "k must be positive");
  require(F.field() == emb.field() && V.field() == F.field(), ErrorCode::invalid_argument,
          "flag, subspace and embedder over different fields");
  auto P = parabolic_space(F);
  require(affine_leq(V, P) && V.dim() < P.dim(), ErrorCode::precondition,
          "V must be a proper affine subspace of P_F");
  for (Id a : in.A2.ids())
    require(F.stabilizes(emb(a)), ErrorCode::precondition, "A^2 must stabilize the flag");

  DecrementResult res;
  res.k = k;
  res.n = in.A2.size();
  auto inv_ids = members_in(in.A2, emb, V);
  res.in_v = inv_ids.size();
  require(res.in_v > 0, ErrorCode::precondition, "V misses A^2");
  const size_t n = res.n;
  const uint64_t K = in.K;

  Lattice lat(in, emb, V);
  res.translates = lat.translates();

  uint64_t tuples = 1;
  bool exhaustive = true;
  for (int i = 0; i < k && exhaustive; ++i) {
    if (tuples > opt.tuple_cap / std::max<size_t>(n, 1))
      exhaustive = false;
    tuples *= n;
  }
  exhaustive = exhaustive && tuples <= opt.tuple_cap;

  std::optional<Cand> best;
  BigInt best_score = -1;
  int best_j = 0;
  auto consider = [&](const Cand &c, int j) {
    size_t w = lat.weight(c.node);
    BigInt ub = BigInt(w) * bpow(n, k - 1);
    if (best && ub <= best_score)
      return;
    size_t x = lat.xcount(c.node);
    BigInt s = score_of(w, x, k, j, n);
    if (!best || s > best_score) {
      best = c;
      best_score = s;
      best_j = j;
    }
  };
  auto j_of = [&](int node) {
    return std::min(k, V.dim() - lat.node(node).dim() + 1);
  };

  if (exhaustive) {
    res.mode = DecrementMode::exhaustive;
    res.tuples = tuples;
    TupleRun run(lat, k);
    run.run();
    res.tuple_sum = run.total;
    res.closed_form = closed_form_sum(in, emb, V, k);
    res.identity_holds = res.tuple_sum == res.closed_form;
    uint32_t best_mask = 0;
    uint64_t bm = 0;
    for (auto &[mask, s] : run.mask_sum)
      if (s > bm) {
        bm = s;
        best_mask = mask;
      }
    res.best_mask_sum = bm;
    BigInt lhs = bpow(res.in_v, k) * BigInt(n);
    res.averaging = check_le("(eta/K)^k n^(k+1) <= tuple sum", lhs, bpow(K, k), res.tuple_sum, 1);
    res.pigeonhole =
      check_le("(eta/2K)^k n^(k+1) <= best mask sum", lhs, bpow(2 * K, k), res.best_mask_sum, 1);
    int j = __builtin_popcount(best_mask);
    if (bm > 0)
      for (auto &[node, path] : run.mask_nodes[best_mask])
        consider(Cand{node, path}, j);
    res.certified = bm > 0;
  } else {
    // breadth-first over the intersection lattice
    std::vector<Cand> found;
    std::unordered_set<int> seen;
    std::deque<size_t> queue;
    bool complete = true;
    for (int t = 0; t < lat.translates(); ++t) {
      int n0 = lat.translate_node(t);
      if (seen.insert(n0).second) {
        found.push_back({n0, {t}});
        queue.push_back(found.size() - 1);
      }
    }
    while (!queue.empty() && complete) {
      Cand c = found[queue.front()];
      queue.pop_front();
      if (int(c.path.size()) >= k)
        continue;
      for (int t = 0; t < lat.translates(); ++t) {
        int nn = lat.meet(c.node, t);
        if (nn < 0 || nn == c.node || !seen.insert(nn).second)
          continue;
        auto p = c.path;
        p.push_back(t);
        found.push_back({nn, std::move(p)});
        queue.push_back(found.size() - 1);
        if (found.size() > opt.node_budget) {
          complete = false;
          break;
        }
      }
    }
    if (!complete) {
      Stream rng(opt.seed, 0x6464, uint64_t(k));
      for (uint64_t s = 0; s < opt.samples; ++s) {
        int t0 = int(rng.below(lat.translates()));
        Cand c{lat.translate_node(t0), {t0}};
        for (int i = 1; i < k; ++i) {
          int t = int(rng.below(lat.translates()));
          int nn = lat.meet(c.node, t);
          if (nn < 0)
            break;
          if (nn != c.node) {
            c.node = nn;
            c.path.push_back(t);
          }
        }
        if (seen.insert(c.node).second)
          found.push_back(c);
      }
    }
    res.mode = complete ? DecrementMode::search : DecrementMode::sampled;
    res.certified = complete;
    std::stable_sort(found.begin(), found.end(), [&](const Cand &a, const Cand &b) {
      return lat.weight(a.node) > lat.weight(b.node);
    });
    for (auto &c : found)
      consider(c, j_of(c.node));
  }
  res.nodes = lat.node_count();

  require(bool(best), ErrorCode::internal, "no intersection meets A^2");
  res.W = lat.node(best->node);
  res.j = best_j;
  for (int t : best->path)
    res.translators.push_back(lat.rep(t));
  while (int(res.translators.size()) < res.j)
    res.translators.push_back(res.translators.back());
  res.in_w = lat.weight(best->node);
  res.in_x = lat.xcount(best->node);
  res.product = check_le("(eta/2Kn)^k <= w x^(k-j) / n^(k-j+1)", bpow(res.in_v, k),
                         bpow(2 * K * n, k), BigInt(res.in_w) * bpow(res.in_x, k - res.j),
                         bpow(n, k - res.j + 1));
  res.dim_drop = check_le("j - 1 <= dim V - dim W", res.j - 1, V.dim() - res.W.dim());
  require(res.dim_drop.holds, ErrorCode::internal, "dimension drop violated");
  if (res.certified)
    require(res.product.holds, ErrorCode::internal, "certified decrement violates its bound");
  return res;
}

// ---------------------------------------------------------------- escape

SubgroupEscape subspace_to_subgroup(const ApproxInput &in, const Embedder &emb, const Flag &F,
                                    const AffineSubspace &V,
                                    const std::optional<std::vector<Elt>> &halve,
                                    const DecrementOptions &opt)
{
  const Field &K = *emb.field();
  const FiniteGroup &G = *in.A2.group();
  int d = emb.dim();
  SubgroupEscape out;
  out.n = in.A2.size();
  out.in_v = members_in(in.A2, emb, V).size();
  require(out.in_v > 0, ErrorCode::precondition, "V misses A^2");
  out.certified = true;

  AffineSubspace start = V;
  Mat sl = identity(d), sr = identity(d);
  auto degenerate = [&](const std::string &why) {
    out.degenerate = true;
    out.note = why;
    out.U = zero_algebra(emb.field(), d);
    out.left = out.right = identity(d);
    out.closed = true;
    out.contained = bitranslate_inside(K, V, out.left, out.U, out.right);
    out.in_group = 1;
    return out;
  };

  if (halve) {
    require(affine_leq(V, vtr_slice(F, *halve)), ErrorCode::precondition,
            "V must lie in the vtr slice");
    HalvingReport h;
    h.D = F.pdim();
    h.step = dimension_decrement(in, emb, F, V, d * d, opt);
    out.certified = h.step.certified;
    const auto &W = h.step.W;
    Id w = first_member(in.A2, emb, W);
    if (w == G.order()) {
      out.halving = h;
      return degenerate("no A^2 element in the halving intersection");
    }
    h.X = transporter_space(W, V, Side::left);
    h.fdim_w = affine_fdim(F, W);
    size_t in_x = 0;
    if (h.X) {
      in_x = members_in(in.A2, emb, *h.X).size();
      h.fdim_x = affine_fdim(F, *h.X);
      h.sum_bound = check_le("fdim W + fdim X <= D", h.fdim_w + h.fdim_x, h.D);
      for (int b = 0; b < F.length(); ++b) {
        auto fr = frobenius_orthogonality_check(project_block(F, *h.X, b),
                                                project_block(F, W, b), (*halve)[b]);
        h.frobenius_ok = h.frobenius_ok && fr.hypothesis && fr.bound.holds;
      }
      require(h.sum_bound.holds && h.frobenius_ok, ErrorCode::internal,
              "orthogonality bound violated");
    }
    h.chose_w = h.step.j == d * d || !h.X || h.fdim_w <= h.fdim_x;
    if (!h.chose_w && in_x == 0)
      h.chose_w = true;
    h.V_prime = h.chose_w ? W : *h.X;
    h.fdim_v_prime = h.chose_w ? h.fdim_w : h.fdim_x;
    h.in_v_prime = h.chose_w ? h.step.in_w : in_x;
    h.half_bound = check_le("2 fdim V' <= D", 2 * h.fdim_v_prime, h.D);
    h.ratio = check_le("(eta/2K)^(d^2) <= |A^2 n V'| / n", bpow(out.in_v, d * d),
                       bpow(2 * in.K * out.n, d * d), h.in_v_prime, out.n);
    if (h.chose_w) // W inside a1^-1 V
      sl = emb(G.inv(h.step.translators.front()));
    else // X inside V w^-1
      sr = emb(G.inv(w));
    start = h.V_prime;
    out.halving = h;
    if (h.X)
      require(h.half_bound.holds, ErrorCode::internal, "halving bound violated");
  }
  out.start = start;
  size_t in_start = members_in(in.A2, emb, start).size();

  long k = long(d) * d * d * d;
  AffineSubspace cur = start;
  Mat g = identity(d);
  AffineSubspace W_last;
  for (;;) {
    EscapeStep st;
    st.dim_v = cur.dim();
    if (cur.dim() == 0) { // a single point b: 1 + 0 = b^-1 {b}
      W_last = cur;
      break;
    }
    st.dd = dimension_decrement(in, emb, F, cur, int(k), opt);
    out.certified = out.certified && st.dd.certified;
    Id w = first_member(in.A2, emb, st.dd.W);
    if (w == G.order()) {
      out.steps.push_back(st);
      return degenerate("no A^2 element in W");
    }
    auto X = transporter_space(st.dd.W, cur, Side::left);
    if (!X) {
      out.steps.push_back(st);
      return degenerate("empty transporter");
    }
    Mat winv = emb(G.inv(w));
    st.dim_x = X->dim();
    st.in_x = members_in(in.A2, emb, *X).size();
    st.translate_ok = affine_leq(*X, cur.right_mul(winv));
    require(st.translate_ok, ErrorCode::internal, "transporter escapes V w^-1");
    out.steps.push_back(st);
    if (X->dim() == cur.dim()) {
      W_last = st.dd.W;
      break;
    }
    require(X->dim() < cur.dim(), ErrorCode::internal, "transporter grew");
    k -= st.dd.j;
    if (k <= 0 || st.in_x == 0)
      return degenerate(k <= 0 ? "decrement budget exhausted" : "transporter misses A^2");
    g = mat_mul(K, g, winv);
    cur = *X;
  }

  Id bid = first_member(in.A2, emb, cur);
  require(bid != G.order(), ErrorCode::internal, "lost A^2 along the escape");
  Mat b = emb(bid), binv = emb(G.inv(bid));
  if (cur.dim() == 0) {
    out.U = zero_algebra(emb.field(), d);
    out.closed = true;
  } else {
    auto tr = transporter(W_last, cur, Side::left, opt.seed);
    require(tr.equality && bool(tr.U), ErrorCode::internal, "escape ended without equality");
    out.U = *tr.U;
    out.closed = tr.closed;
  }
  // W_last inside w (1 + U)
  Id wl = first_member(in.A2, emb, W_last);
  out.w_inside = true;
  {
    Mat wi = emb(G.inv(wl));
    Mat one = identity(d);
    if (!out.U.contains(mat_sub(K, mat_mul(K, wi, W_last.base()), one)))
      out.w_inside = false;
    for (auto &m : W_last.direction_mats())
      if (!out.U.contains(mat_mul(K, wi, m)))
        out.w_inside = false;
  }
  out.in_w_last = members_in(in.A2, emb, W_last).size();
  out.left = mat_mul(K, binv, sl);
  out.right = mat_mul(K, sr, g);
  // 1 + U inside left V right, and b (1 + U) inside the last V
  out.contained = bitranslate_inside(K, V, inv_mat(K, out.left), out.U, inv_mat(K, out.right)) &&
                  bitranslate_inside(K, cur, b, out.U, identity(d));
  require(out.contained && out.w_inside, ErrorCode::internal, "escape containment failed");

  Mat one = identity(d);
  out.in_group = 0;
  for (Id a : in.A2.ids())
    out.in_group += out.U.contains(mat_sub(K, emb(a), one));
  out.coset_bound = check_le("|A^2 n W| <= K^3 |A^2 n (1+U)|", out.in_w_last,
                             bpow(in.K, 3) * out.in_group);
  require(out.coset_bound.holds, ErrorCode::internal, "coset bound violated");
  long d4 = long(d) * d * d * d, d6 = d4 * d * d;
  out.ratio = check_le("eta^(d^4) / (2K)^(d^6+3) <= |A^2 n (1+U)| / n", bpow(in_start, d4),
                       bpow(out.n, d4) * bpow(2 * in.K, d6 + 3), out.in_group, out.n);
  return out;
}

FlagEscape subspace_to_flag(const ApproxInput &in, Embedder &emb, const Flag &F,
                            const std::vector<Elt> &t, const DecrementOptions &opt)
{
  require(F.field() == emb.field(), ErrorCode::invalid_argument,
          "flag and embedder over different fields");
  const Field &K = *emb.field();
  int d = emb.dim();
  FlagEscape out;
  AffineSubspace V = vtr_slice(F, t);
  out.n = in.A2.size();
  out.in_v = members_in(in.A2, emb, V).size();
  out.D = F.pdim();
  out.escape = subspace_to_subgroup(in, emb, F, V, t, opt);
  std::vector<Id> grp;
  Mat one = identity(d);
  for (Id a : in.A2.ids())
    if (out.escape.U.contains(mat_sub(K, emb(a), one)))
      grp.push_back(a);
  out.in_group = grp.size();
  out.alg = subalg_to_flag(out.escape.U, F, 1, 2, opt.seed);
  out.G = out.alg.G;
  emb.extend(out.G.field());
  out.pdim_g = out.G.pdim();
  out.halving_pdim = check_le("2 pdim(G)^2 <= D^2", 2 * out.pdim_g * out.pdim_g, out.D * out.D);
  require(out.halving_pdim.holds, ErrorCode::internal, "flag halving failed");
  out.refines = refines(out.G, F);
  require(out.refines, ErrorCode::internal, "escape flag does not refine F");
  out.group_inside = true;
  for (Id a : grp)
    out.group_inside = out.group_inside && out.G.stabilizes(emb(a));
  out.in_hg = members_stabilizing(in.A2, emb, out.G).size();
  long double d6 = std::pow((long double)d, 6);
  long double eta = (long double)out.in_v / out.n;
  out.ratio = check_le_real("5 d^6 log(eta/2K) <= log(|A^2 n H_G| / n)",
                            5 * d6 * std::log(eta / (2.0L * in.K)),
                            std::log((long double)out.in_hg / out.n));
  return out;
}

// ---------------------------------------------------------------- regular elements

bool pair_member(const Field &F, const Mat &a, Elt lambda, const Subspace &V1, const Subspace &V2)
{
  Mat x = mat_sub(F, a, scalar_mat(a.rows, lambda));
  return space_leq(F, image_of(F, x, V2), V1);
}

RegResult reg_element_search(const GroupSubset &A, int s, const DecrementOptions &opt)
{
  require(A.centered(), ErrorCode::precondition, "the set must be centered");
  const MatrixGroup *G = as_matrix_group(A.group());
  FieldPtr Fp = G->field_ptr();
  const Field &Fd = *Fp;
  int d = G->dim();
  RegResult out;
  GroupSubset A2 = power(A, 2);
  Mat one = identity(d);

  if (s < 0) {
    for (Id a : A2.ids()) {
      auto es = eigen_stats(Fp, G->matrix(a));
      if (2 * es.m <= d) {
        out.outcome = RegOutcome::irregular_element;
        out.witness = a;
        out.witness_m = es.m;
        return out;
      }
    }
    out.normalized = true;
    std::vector<Mat> bgen;
    for (Id a : A.ids()) {
      auto es = eigen_stats(Fp, G->matrix(a));
      const auto &map = field_embedding(Fp, es.E);
      auto it = std::find(map.begin(), map.end(), es.lambda);
      require(it != map.end(), ErrorCode::internal, "dominant eigenvalue outside the base field");
      Elt lam = Elt(it - map.begin());
      out.lambdas.push_back(lam);
      bgen.push_back(mat_scale(Fd, Fd.inv(lam), G->matrix(a)));
    }
    auto Bg = std::make_shared<MatrixGroup>(A.group()->spec() + "/normalized", Fp, d, bgen,
                                            kDefaultOrderCap);
    std::vector<Id> ids;
    for (auto &m : bgen)
      ids.push_back(Bg->id_of(m));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    out.B_group = Bg;
    out.B = GroupSubset(Bg, ids);
  } else {
    out.B_group = A.group();
    out.B = A;
  }
  const FiniteGroup &BG = *out.B_group;
  const MatrixGroup *BM = as_matrix_group(out.B_group);
  out.B2 = power(out.B, 2);
  out.K = std::max<uint64_t>(1, cover_witness(out.B2, out.B).size());
  const auto &B2 = out.B2.ids();
  std::vector<Mat> bm(BG.order());
  for (Id b : B2)
    bm[b] = BM->matrix(b);

  int needed = 0;
  for (Id b : B2)
    needed = std::max(needed, rank(Fd, mat_sub(Fd, bm[b], one)));
  if (s >= 0)
    require(needed <= s, ErrorCode::precondition, "rk(a - 1) exceeds s on A^2");
  out.s = s >= 0 ? s : needed;

  Subspace U = full_space(d), N = zero_space(d);
  auto mat_of = [&](Id b) -> const Mat & {
    if (bm[b].rows == 0)
      bm[b] = BM->matrix(b);
    return bm[b];
  };
  auto fib = [&](const Mat &x, const Subspace &u, const Subspace &n) {
    return dim(space_sum(Fd, image_of(Fd, x, u), n)) - dim(n);
  };
  auto minus1 = [&](Id b) { return mat_sub(Fd, mat_of(b), one); };

  std::vector<Id> S(B2.begin(), B2.end());
  auto alpha = [](int k) { return std::pow(2.0L, 1 - std::pow(2.0L, k / 2.0L)); };
  const long double sd = out.s;
  for (int k = 0; alpha(k) * sd >= 1; ++k) {
    long double r = alpha(k) * sd, target = alpha(k + 1) * sd;
    while (r > target) {
      long double eta = target / (3 * r);
      RegStep st;
      st.stage = k;
      st.r_before = r;
      st.s_before = S.size();
      std::vector<Id> S0, S1;
      for (Id b : S)
        (fib(minus1(b), U, N) <= r * (1 - eta) ? S0 : S1).push_back(b);
      std::vector<Id> next;
      Subspace U2 = U, N2 = N;
      int m = 1;
      if (4 * S0.size() >= S.size()) {
        st.kind = '0';
        next = S0;
        st.r_after = (1 - eta) * r;
      } else {
        // pairs (b, c) in S1 with b c^-1 in B^2, split by rk(pi (b - c) iota)
        std::map<Id, size_t> t0c, t1a;
        std::vector<std::pair<Id, Id>> t0, t1;
        for (Id b : S1)
          for (Id c : S1) {
            Id bc = BG.mul(b, BG.inv(c));
            if (!std::binary_search(B2.begin(), B2.end(), bc))
              continue;
            int rk = fib(mat_sub(Fd, mat_of(b), mat_of(c)), U, N);
            if (rk <= r * (2 - 3 * eta)) {
              t0.push_back({b, c});
              t0c[c]++;
            } else {
              t1.push_back({b, c});
              t1a[BG.mul(c, BG.inv(b))]++;
            }
          }
        auto argmax = [](const std::map<Id, size_t> &cnt) {
          Id best = 0;
          size_t bc = 0;
          for (auto &[x, c] : cnt)
            if (c > bc) {
              bc = c;
              best = x;
            }
          return best;
        };
        if (t0.size() >= t1.size()) {
          st.kind = 'c';
          Id c = argmax(t0c);
          for (auto &[b, cc] : t0)
            if (cc == c)
              next.push_back(BG.mul(b, BG.inv(c)));
          Mat cm1 = minus1(c);
          Subspace ker = space_intersect(Fd, U, preimage_of(Fd, cm1, N));
          U2 = image_of(Fd, mat_of(c), ker);
          N2 = space_sum(Fd, N, image_of(Fd, cm1, U));
          st.r_after = (1 - eta) * r;
        } else {
          st.kind = 'a';
          m = 2;
          Id a = argmax(t1a);
          for (auto &[b, c] : t1)
            if (BG.mul(c, BG.inv(b)) == a)
              next.push_back(b);
          N2 = space_sum(Fd, N, image_of(Fd, minus1(a), full_space(d)));
          st.r_after = target;
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      st.s_after = next.size();
      st.dim_u = dim(U2);
      st.dim_n = dim(N2);
      long double ell = st.kind == 'a' ? 2 * sd : r;
      st.ranks_ok = dim(U) - dim(U2) <= ell + 1e-9L && dim(N2) - dim(N) <= ell + 1e-9L;
      for (Id b : next)
        st.ranks_ok = st.ranks_ok && fib(minus1(b), U2, N2) <= st.r_after + 1e-9L;
      st.size_bound = check_le("|S|^m <= 4K |S'| |B^2|^(m-1)", bpow(S.size(), m),
                               BigInt(4 * out.K) * st.s_after * bpow(B2.size(), m - 1));
      require(st.ranks_ok, ErrorCode::internal, "rank schedule violated");
      out.steps.push_back(st);
      S = next;
      U = U2;
      N = N2;
      r = st.r_after;
      require(!S.empty(), ErrorCode::internal, "regular-element search lost every element");
    }
  }
  out.U_img = U;
  out.N = N;
  for (Id b : S)
    if (fib(minus1(b), U, N) == 0)
      out.survivors.push_back(b);

  // V = {x : (x - 1) U inside N}
  Mat ann = annihilator(Fd, N);
  Mat sys(0, d * d);
  for (int i = 0; i < U.rows; ++i)
    for (int j = 0; j < ann.rows; ++j) {
      std::vector<Elt> row(size_t(d) * d);
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
          row[size_t(p) * d + q] = Fd.mul(ann(j, p), U(i, q));
      sys.append_row(row);
    }
  Subspace dirs = sys.rows ? kernel(Fd, sys) : full_space(d * d);
  out.V = AffineSubspace(Fp, d, one, dirs);

  if (out.V.dim() == d * d) {
    out.X = Subalgebra{Fp, d, full_space(d * d)};
    out.c1 = out.c2 = one;
  } else {
    ApproxInput in{out.B, out.B2, out.K};
    Embedder emb(out.B_group);
    out.escape = subspace_to_subgroup(in, emb, Flag::trivial(Fp, d), out.V, std::nullopt, opt);
    out.X = out.escape->U;
    out.c1 = out.escape->left;
    out.c2 = out.escape->right;
  }
  Mat c2i = inv_mat(Fd, out.c2);
  Subspace src = image_of(Fd, c2i, U), dst = image_of(Fd, out.c1, N);
  out.algebra_maps = true;
  Subspace V2 = full_space(d);
  for (auto &x : out.X.mats()) {
    out.algebra_maps = out.algebra_maps && space_leq(Fd, image_of(Fd, x, src), dst);
    V2 = space_intersect(Fd, V2, preimage_of(Fd, x, dst));
  }
  out.V2 = V2;
  out.V1 = space_intersect(Fd, dst, V2);
  out.pair_ok = space_leq(Fd, out.V1, out.V2) && space_leq(Fd, src, out.V2);
  for (auto &x : out.X.mats())
    out.pair_ok = out.pair_ok && space_leq(Fd, image_of(Fd, x, out.V2), out.V1);
  require(out.algebra_maps && out.pair_ok, ErrorCode::internal, "subspace pair check failed");

  for (Id a : A2.ids()) {
    Mat am = G->matrix(a);
    for (Elt lam = 0; lam < Fd.q(); ++lam)
      if (pair_member(Fd, am, lam, out.V1, out.V2)) {
        out.members.push_back(a);
        out.member_lambda.push_back(lam);
        break;
      }
  }
  out.count = out.members.size();
  return out;
}

// ---------------------------------------------------------------- iteration

IterationResult big_gl_iteration(const ApproxInput &in, Embedder &emb, const PipelineState &state,
                                 const GlOptions &opt, int index)
{
  const Flag &F = state.flag;
  require(F.field() == emb.field(), ErrorCode::invalid_argument,
          "flag and embedder over different fields");
  require(F.pdim() > 0, ErrorCode::precondition, "flag already complete");
  const FiniteGroup &G = *in.A.group();
  int d = emb.dim();
  const long double dd = d;
  IterationRecord rec;
  rec.index = index;
  rec.n = in.A2.size();
  rec.flag_before = F.signature();
  rec.pdim_before = F.pdim();
  GroupSubset A2F(in.A.group(), members_stabilizing(in.A2, emb, F));
  rec.a2f = A2F.size();
  BigInt delta_den = opt.delta_den ? BigInt(opt.delta_den) : BigInt(d) * bpow(in.K, 12);

  const Field &E = *F.field();
  int case2a = -1;
  for (int b = 0; b < F.length(); ++b) {
    BlockInfo bi;
    bi.dim = F.block_dim(b);
    require(bi.dim < 8000, ErrorCode::cap_exceeded, "block dimension beyond 8000");
    std::set<Mat> blocks;
    for (Id a : A2F.ids())
      blocks.insert(F.block(emb(a), b));
    bi.size = blocks.size();
    if (bi.dim == 1) {
      bi.label = "1";
    } else {
      std::set<Mat> sq;
      for (auto &x : blocks)
        for (auto &y : blocks)
          sq.insert(mat_mul(E, x, y));
      bi.square = sq.size();
      bi.scalars = std::count_if(sq.begin(), sq.end(), is_scalar);
      if (BigInt(bi.scalars) * delta_den >= BigInt(bi.square)) {
        bi.label = "2a";
        if (case2a < 0)
          case2a = b;
      } else {
        bi.label = "2b";
      }
    }
    rec.blocks.push_back(bi);
  }

  PipelineState next = state;
  Flag Gf;
  long Dn = 0;
  if (case2a >= 0) {
    rec.branch = "2a";
    rec.refined_block = case2a;
    int n = F.block_dim(case2a);
    Gf = F.refine(case2a, [&] {
      std::vector<Subspace> inner{zero_space(n)};
      Flag std_flag = Flag::standard_complete(F.field(), n);
      for (int i = 1; i <= n; ++i)
        inner.push_back(std_flag.V(i));
      return inner;
    }());
    Dn = state.D - 1;
    next.lambda = state.lambda + 85 * int64_t(std::pow(d, 7));
  } else {
    GroupSubset B = power(A2F, 2);
    rec.b = B.size();
    Id a0 = G.order();
    for (Id id : B.ids()) {
      bool ok = true;
      for (int b = 0; b < F.length() && ok; ++b)
        if (F.block_dim(b) > 1 && is_scalar(F.block(emb(id), b)))
          ok = false;
      if (ok) {
        a0 = id;
        break;
      }
    }
    require(a0 != G.order(), ErrorCode::internal, "no element with only non-scalar blocks");
    rec.a0 = a0;
    auto pv = pivot_split(B, a0);
    rec.centralized = pv.centralized.size();
    rec.conjugates = pv.conjugates.size();
    rec.pivot = pv.bound;
    long double eps = (long double)(state.eps_num) / (long double)(state.eps_den);
    rec.eta = opt.eta > 0 ? opt.eta
                          : std::max(std::pow((long double)in.A.size(),
                                              -eps / (10 * std::pow(dd, 6))),
                                     1.0L / in.A2.size());
    if (rec.conjugates >= rec.eta * rec.b) {
      rec.branch = "i";
      ApproxInput tin = approx_input(power(B, 2));
      auto t = F.vtr(emb(a0));
      rec.escape = subspace_to_flag(tin, emb, F, t, opt.dd);
      Gf = rec.escape->G;
      Dn = floor_div_sqrt2(state.D);
      next.lambda = state.lambda + 165 * int64_t(std::pow(d, 6));
      next.eps_den = state.eps_den * 2;
    } else {
      rec.branch = "ii";
      require(rec.centralized * rec.eta >= 1 - 1e-12L, ErrorCode::internal,
              "centralizer part too small");
      Mat a0m = emb(a0);
      int L = 1;
      for (int b = 0; b < F.length(); ++b)
        if (F.block_dim(b) > 1) {
          auto es = eigen_stats(F.field(), F.block(a0m, b));
          rec.blocks[b].m_a0 = es.m;
          L = std::lcm(L, es.degree);
        }
      Flag cur = F;
      if (L > 1) {
        FieldPtr big = Field::get(F.field()->p(), F.field()->k() * L);
        emb.extend(big);
        cur = F.lift(big);
      }
      Mat am = emb(a0);
      std::vector<std::pair<int, Flag>> inner;
      for (int b = 0; b < cur.length(); ++b)
        if (cur.block_dim(b) > 1) {
          auto cf = centralizer_flag(cur.field(), cur.block(am, b));
          require(cf.flag.field() == cur.field(), ErrorCode::internal,
                  "block eigenvalues outside the common field");
          require(cf.bound.holds && cf.centralizer_stabilizes, ErrorCode::internal,
                  "centralizer flag check failed");
          inner.emplace_back(b, cf.flag);
        }
      for (auto it = inner.rbegin(); it != inner.rend(); ++it)
        cur = cur.refine(it->first, it->second.chain());
      Gf = cur;
      long double gamma =
        d <= 2 ? 0.25L : std::min(1.0L / 8000, 1 / (1200 * std::log(std::log(dd))));
      Dn = long(std::floor((1 - gamma) * state.D));
      next.lambda = 7;
      next.eps_den = state.eps_den * 10 * BigInt(int64_t(std::pow(d, 6)));
      for (Id c : pv.centralized.ids())
        rec.centralizer_inside = rec.centralizer_inside && Gf.stabilizes(emb(c));
      require(rec.centralizer_inside, ErrorCode::internal, "centralizer escapes H_G");
    }
  }
  rec.flag_after = Gf.signature();
  rec.pdim_after = Gf.pdim();
  rec.D_next = Dn;
  rec.pdim_bound = check_le("pdim(G) <= D'", rec.pdim_after, Dn);
  require(rec.pdim_bound.holds && rec.pdim_after < rec.pdim_before, ErrorCode::internal,
          "parabolic dimension did not drop enough");
  require(refines(Gf, F), ErrorCode::internal, "new flag does not refine the old one");
  auto hg = members_stabilizing(in.A2, emb, Gf);
  rec.in_hg = hg.size();
  Flag Fl = F.field() == Gf.field() ? F : F.lift(Gf.field());
  rec.inherited = true;
  for (Id a : hg)
    rec.inherited = rec.inherited && Fl.stabilizes(emb(a));
  require(rec.inherited, ErrorCode::internal, "H_G n A^2 escapes H_F");
  next.flag = Gf;
  next.D = Dn;
  long double eps_n = (long double)(next.eps_num) / (long double)(next.eps_den);
  rec.lambda = next.lambda;
  rec.eps = rational_string(next.eps_num, next.eps_den);
  rec.declared = check_le_real("eps log|A^2| - lambda log 2K <= log |A^2 n H_G|",
                               eps_n * std::log((long double)in.A2.size()) -
                                 next.lambda * std::log(2.0L * in.K),
                               std::log((long double)rec.in_hg));
  return {next, rec};
}

// ---------------------------------------------------------------- endgame

BorelResult borel_abelian(const ApproxInput &in, const Embedder &emb, const Flag &F)
{
  require(F.complete(), ErrorCode::precondition, "flag must be complete");
  for (Id a : in.A.ids())
    require(F.stabilizes(emb(a)), ErrorCode::precondition, "A must stabilize the flag");
  const GroupPtr &Gp = in.A.group();
  int d = emb.dim();
  size_t t = size_t(d) * d - 1;
  BorelResult out;
  out.n = in.A2.size();
  out.G = closure(Gp, in.A.ids());
  out.commutator = commutator_subgroup(out.G, out.G);
  out.in_commutator = intersect(in.A2, out.commutator).size();
  BigInt K10 = bpow(in.K, 10);

  Subgroup H = out.G;
  for (;;) {
    Subgroup Z = centralizer_in(H, H.gens);
    Id h = Gp->order();
    for (Id a : in.A2.ids())
      if (H.contains(a) && !Z.contains(a)) {
        h = a;
        break;
      }
    if (h == Gp->order())
      break;
    std::array<Id, 1> hv{h};
    Subgroup nx = centralizer_in(H, hv);
    size_t here = intersect(in.A2, H).size(), there = intersect(in.A2, nx).size();
    out.steps1.push_back(check_le("|A^2 n H_k| <= K^10 |A^2 n [G,G]| |A^2 n H_k+1|", here,
                                  K10 * out.in_commutator * there));
    out.chain1.push_back(h);
    H = nx;
    require(out.chain1.size() <= t, ErrorCode::internal, "centralizer chain too long");
  }
  out.H1 = centralizer_in(H, H.gens);
  out.in_h1 = intersect(in.A2, out.H1).size();
  out.bound1 = check_le("|A^2| <= |A^2 n H1| (K^10 |A^2 n [G,G]|)^m", out.n,
                        BigInt(out.in_h1) * bpow(K10 * out.in_commutator, long(out.chain1.size())));

  // nilpotent part: A' = A^2 n [G,G]
  const Subgroup &N = out.commutator;
  std::vector<Subgroup> lcs{N};
  while (lcs.back().order() > 1) {
    auto nx = commutator_subgroup(lcs.back(), N);
    require(nx.order() < lcs.back().order(), ErrorCode::internal, "[G,G] is not nilpotent");
    lcs.push_back(nx);
  }
  out.lcs_length = int(lcs.size()) - 1;
  GroupSubset Ap = intersect(in.A2, N);
  GroupSubset App = power(Ap, 2);
  BigInt Kp10 = bpow(bpow(in.K, 3), 10);
  Subgroup Hk = N;
  size_t best_in = 0;
  Subgroup bestZ = trivial_subgroup(Gp);
  for (;;) {
    Subgroup Z = centralizer_in(Hk, Hk.gens);
    size_t zin = intersect(App, Z).size();
    if (zin > best_in) {
      best_in = zin;
      bestZ = Z;
    }
    Id h = Gp->order();
    for (int i = int(lcs.size()) - 2; i >= 0 && h == Gp->order(); --i)
      for (Id a : App.ids())
        if (lcs[i].contains(a) && Hk.contains(a) && !Z.contains(a)) {
          h = a;
          break;
        }
    if (h == Gp->order())
      break;
    std::array<Id, 1> hv{h};
    Subgroup nx = centralizer_in(Hk, hv);
    out.steps2.push_back(check_le("|A'^2 n H_k| <= K'^10 |A'^2 n H_k+1| |A'^2 n Z(H_k)|",
                                  intersect(App, Hk).size(),
                                  Kp10 * intersect(App, nx).size() * zin));
    out.chain2.push_back(h);
    Hk = nx;
    require(out.chain2.size() <= t, ErrorCode::internal, "nilpotent chain too long");
  }
  out.H2 = bestZ;
  out.bound2 = check_le("|A'^2| <= (K'^10 |A'^2 n H2|)^(d^2)", App.size(),
                        bpow(Kp10 * best_in, long(d) * d));
  out.in_h2 = intersect(in.A2, out.H2).size();
  bool first = out.in_h1 >= out.in_h2;
  out.H = first ? out.H1 : out.H2;
  out.chosen = first ? "H1" : "H2";
  out.in_h = first ? out.in_h1 : out.in_h2;
  const FiniteGroup &Gr = *Gp;
  out.abelian = true;
  for (Id x : out.H.gens)
    for (Id y : out.H.gens)
      out.abelian = out.abelian && Gr.commute(x, y);
  require(out.abelian, ErrorCode::internal, "chosen subgroup is not abelian");
  long d4 = long(d) * d * d * d;
  out.hard = check_le("|A^2| <= (K^33 |A^2 n H|)^(d^4)", out.n,
                      bpow(bpow(in.K, 33) * out.in_h, d4));
  require(out.hard.holds, ErrorCode::internal, "abelian endgame bound violated");
  return out;
}

GlResult gl_abelian_substruct(const GroupSubset &A, const GlOptions &opt)
{
  ApproxInput in = approx_input(A);
  Embedder emb(A.group());
  GlResult out;
  int d = emb.dim();
  out.d = d;
  out.K = in.K;
  out.a = A.size();
  out.a2 = in.A2.size();
  PipelineState st;
  st.flag = Flag::trivial(emb.field(), d);
  st.D = long(d) * d - 1;
  out.states.push_back(st);
  long double lambda_total = 0, eps = 1;
  if (d == 1) {
    out.short_circuit = true;
    out.final_flag = st.flag;
    out.H = closure(A.group(), A.ids());
  } else {
    GlOptions o = opt;
    o.dd.seed = opt.seed;
    int idx = 0;
    while (st.flag.pdim() > 0) {
      auto r = big_gl_iteration(in, emb, st, o, idx++);
      out.iterations.push_back(r.record);
      st = r.next;
      out.states.push_back(st);
      require(out.iterations.size() < size_t(d) * d, ErrorCode::internal, "too many iterations");
    }
    out.final_flag = st.flag;
    GroupSubset Al(A.group(), members_stabilizing(in.A2, emb, st.flag));
    out.a2_borel = Al.size();
    out.borel = borel_abelian(approx_input(Al), emb, st.flag);
    out.H = out.borel->H;
    lambda_total = (long double)st.lambda;
    eps = (long double)st.eps_num / (long double)st.eps_den;
  }
  out.in_h = intersect(in.A2, out.H).size();
  const FiniteGroup &G = *A.group();
  out.abelian = true;
  for (Id x : out.H.gens)
    for (Id y : out.H.gens)
      out.abelian = out.abelian && G.commute(x, y);
  long d4 = long(d) * d * d * d;
  out.hard = check_le("|A^2| <= (K^33 |A^2 n H|)^(d^4)", out.a2,
                      bpow(bpow(in.K, 33) * out.in_h, d4));
  out.theorem = check_le_real(
    "(eps/d^4) log|A^2| - (lambda+102) log 2K <= log |A^2 n H|",
    eps / d4 * std::log((long double)out.a2) - (lambda_total + 102) * std::log(2.0L * in.K),
    std::log((long double)out.in_h));
  return out;
}

} // namespace grpcomb
