#include "grpcomb/ramsey.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "grpcomb/error.hpp"
#include "grpcomb/parallel.hpp"
#include "grpcomb/rng.hpp"

namespace grpcomb {

namespace {

// stream labels, kept apart so the two samplers never share coins
constexpr uint64_t kVertexCoin = 1, kEdgeCoin = 2, kUniformCoin = 3, kTrialKey = 0x52414d;

bool vertex_chosen(const PairingGraph &P, uint64_t seed, int v)
{
  int e = P.match_edge[v];
  if (e < 0)
    return Stream(seed, kVertexCoin, uint64_t(v)).coin();
  bool second = Stream(seed, kEdgeCoin, uint64_t(e)).coin();
  auto [a, b] = P.matching[e];
  return (second ? b : a) == v;
}

std::vector<Id> members_of(const PairingGraph &P, const std::vector<char> &chosen)
{
  std::vector<Id> S;
  for (size_t v = 0; v < chosen.size(); ++v)
    if (chosen[v])
      S.insert(S.end(), P.classes[v].begin(), P.classes[v].end());
  std::sort(S.begin(), S.end());
  return S;
}

// A A^-1 for an explicit list
GroupSubset quotient_set(const GroupPtr &G, const std::vector<Id> &A)
{
  std::vector<Id> out;
  out.reserve(A.size() * A.size());
  for (Id a : A)
    for (Id b : A)
      out.push_back(G->mul(a, G->inv(b)));
  return GroupSubset(G, std::move(out));
}

// ---------------------------------------------------------------- max clique

class Bits {
public:
  explicit Bits(size_t n = 0) : w_((n + 63) / 64, 0) {}
  void set(size_t i) { w_[i >> 6] |= 1ull << (i & 63); }
  void reset(size_t i) { w_[i >> 6] &= ~(1ull << (i & 63)); }
  bool test(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  bool none() const
  {
    for (auto x : w_)
      if (x)
        return false;
    return true;
  }
  size_t count() const
  {
    size_t c = 0;
    for (auto x : w_)
      c += std::popcount(x);
    return c;
  }
  long first() const
  {
    for (size_t i = 0; i < w_.size(); ++i)
      if (w_[i])
        return long(i * 64 + std::countr_zero(w_[i]));
    return -1;
  }
  void and_with(const Bits &o)
  {
    for (size_t i = 0; i < w_.size(); ++i)
      w_[i] &= o.w_[i];
  }
  void and_not(const Bits &o)
  {
    for (size_t i = 0; i < w_.size(); ++i)
      w_[i] &= ~o.w_[i];
  }

private:
  std::vector<uint64_t> w_;
};

// maximum clique of the graph induced on `verts` (ids in G), adjacency x~y iff
// x^-1 y in the marked set
class CliqueSearch {
public:
  CliqueSearch(const FiniteGroup &G, const std::vector<char> &mark, std::vector<Id> verts)
    : n_(verts.size()), adj_(n_, Bits(n_))
  {
    // high degree first tends to find large cliques early
    std::vector<size_t> deg(n_, 0);
    std::vector<std::vector<char>> raw(n_, std::vector<char>(n_, 0));
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = i + 1; j < n_; ++j)
        if (mark[G.mul(G.inv(verts[i]), verts[j])]) {
          raw[i][j] = raw[j][i] = 1;
          ++deg[i];
          ++deg[j];
        }
    std::vector<size_t> order(n_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return deg[a] > deg[b]; });
    verts_.resize(n_);
    for (size_t i = 0; i < n_; ++i)
      verts_[i] = verts[order[i]];
    for (size_t i = 0; i < n_; ++i)
      for (size_t j = 0; j < n_; ++j)
        if (raw[order[i]][order[j]])
          adj_[i].set(j);
  }

  std::vector<Id> run()
  {
    Bits P(n_);
    for (size_t i = 0; i < n_; ++i)
      P.set(i);
    std::vector<size_t> cur;
    expand(cur, P);
    std::vector<Id> out;
    for (size_t i : best_)
      out.push_back(verts_[i]);
    std::sort(out.begin(), out.end());
    return out;
  }
  uint64_t nodes() const { return nodes_; }

private:
  void colour(const Bits &P, std::vector<size_t> &order, std::vector<int> &col) const
  {
    Bits rest = P;
    int k = 0;
    while (!rest.none()) {
      ++k;
      Bits q = rest;
      for (long v = q.first(); v >= 0; v = q.first()) {
        q.reset(size_t(v));
        rest.reset(size_t(v));
        q.and_not(adj_[size_t(v)]);
        order.push_back(size_t(v));
        col.push_back(k);
      }
    }
  }

  void expand(std::vector<size_t> &cur, Bits P)
  {
    ++nodes_;
    std::vector<size_t> order;
    std::vector<int> col;
    colour(P, order, col);
    for (size_t i = order.size(); i-- > 0;) {
      if (cur.size() + size_t(col[i]) <= best_.size())
        return;
      size_t v = order[i];
      cur.push_back(v);
      Bits np = P;
      np.and_with(adj_[v]);
      if (np.none()) {
        if (cur.size() > best_.size())
          best_ = cur;
      } else {
        expand(cur, np);
      }
      cur.pop_back();
      P.reset(v);
    }
  }

  size_t n_;
  std::vector<Bits> adj_;
  std::vector<Id> verts_;
  std::vector<size_t> best_;
  uint64_t nodes_ = 0;
};

} // namespace

const char *pairing_mode_name(PairingMode m)
{
  return m == PairingMode::squaring ? "squaring" : "prime";
}

PairingMode parse_pairing_mode(const std::string &s)
{
  if (s == "squaring")
    return PairingMode::squaring;
  if (s == "prime" || s == "smallest-prime")
    return PairingMode::smallest_prime;
  fail(ErrorCode::invalid_argument, "unknown pairing mode " + s);
}

uint64_t smallest_prime_not_dividing(uint64_t m)
{
  require(m >= 1, ErrorCode::invalid_argument, "m must be positive");
  for (uint64_t q = 2;; ++q)
    if (is_prime(q) && m % q != 0)
      return q;
}

PairingGraph build_pairing(const GroupPtr &G, PairingMode mode)
{
  require(G && G->order() >= 2, ErrorCode::invalid_argument, "pairing graph needs |G| >= 2");
  PairingGraph P;
  P.G = G;
  P.mode = mode;
  Id n = G->order();
  P.class_of.assign(n, -1);
  for (Id g = 1; g < n; ++g) {
    if (P.class_of[g] >= 0)
      continue;
    Id h = G->inv(g);
    int v = int(P.classes.size());
    P.classes.push_back(h == g ? std::vector<Id>{g} : std::vector<Id>{g, h});
    P.class_of[g] = P.class_of[h] = v;
  }
  size_t V = P.classes.size();
  P.next.assign(V, -1);
  P.q.assign(V, 0);
  for (size_t v = 0; v < V; ++v) {
    Id x = P.classes[v][0];
    uint64_t ord = G->element_order(x);
    uint64_t q = 0;
    if (mode == PairingMode::squaring) {
      if (ord % 2 == 1)
        q = 2;
    } else {
      q = smallest_prime_not_dividing(ord);
    }
    if (q == 0)
      continue;
    P.q[v] = uint32_t(q);
    P.next[v] = P.class_of[G->pow(x, int64_t(q % ord))];
  }

  // the power map permutes its domain, so components are its orbits
  std::string &err = P.structure_error;
  std::vector<int> indeg(V, 0);
  for (size_t v = 0; v < V; ++v)
    if (P.next[v] >= 0)
      ++indeg[P.next[v]];
  for (size_t v = 0; v < V && err.empty(); ++v) {
    bool dom = P.next[v] >= 0;
    if (indeg[v] != (dom ? 1 : 0))
      err = "power map is not a permutation at class of " + G->label(P.classes[v][0]);
  }
  std::vector<char> seen(V, 0);
  for (size_t v = 0; v < V && err.empty(); ++v) {
    if (seen[v])
      continue;
    if (P.next[v] < 0) {
      seen[v] = 1;
      ++P.isolated;
      continue;
    }
    size_t len = 0;
    for (int u = int(v); !seen[u]; u = P.next[u]) {
      seen[u] = 1;
      ++len;
    }
    if (len == 1)
      P.loops.push_back(int(v));
    else
      ++P.cycles;
  }
  for (size_t v = 0; v < V; ++v) {
    int w = P.next[v];
    if (w >= 0 && w != int(v))
      P.edges.emplace_back(std::min(int(v), w), std::max(int(v), w));
  }
  std::sort(P.edges.begin(), P.edges.end());
  P.edges.erase(std::unique(P.edges.begin(), P.edges.end()), P.edges.end());

  // per-class claims of the two constructions
  std::vector<int> degree(V, 0);
  for (auto [a, b] : P.edges) {
    ++degree[a];
    ++degree[b];
  }
  for (size_t v = 0; v < V && err.empty(); ++v) {
    Id x = P.classes[v][0];
    uint64_t ord = G->element_order(x);
    bool loop = P.next[v] == int(v);
    bool iso = P.next[v] < 0;
    if (degree[v] > 2 || (loop && degree[v] != 0))
      err = "class of " + G->label(x) + " has the wrong degree";
    else if (mode == PairingMode::squaring && iso != (ord % 2 == 0))
      err = "isolated class of " + G->label(x) + " does not match even order";
    else if (mode == PairingMode::squaring && loop != (ord == 3))
      err = "self-loop at " + G->label(x) + " does not match order 3";
    else if (mode == PairingMode::smallest_prime && iso)
      err = "isolated class of " + G->label(x) + " in prime mode";
  }

  P.mate.assign(V, -1);
  P.match_edge.assign(V, -1);
  for (auto [a, b] : P.edges)
    if (P.mate[a] < 0 && P.mate[b] < 0) {
      P.mate[a] = b;
      P.mate[b] = a;
      P.match_edge[a] = P.match_edge[b] = int(P.matching.size());
      P.matching.emplace_back(a, b);
    }
  P.maximal = true;
  for (auto [a, b] : P.edges)
    if (P.mate[a] < 0 && P.mate[b] < 0)
      P.maximal = false;
  return P;
}

ConnectionSample sample_connection(const PairingGraph &P, uint64_t seed)
{
  ConnectionSample s;
  s.seed = seed;
  s.chosen.assign(P.vertices(), 0);
  for (size_t v = 0; v < P.vertices(); ++v)
    s.chosen[v] = vertex_chosen(P, seed, int(v));
  s.S = members_of(P, s.chosen);
  return s;
}

ConnectionSample sample_uniform(const PairingGraph &P, uint64_t seed)
{
  ConnectionSample s;
  s.seed = seed;
  s.chosen.assign(P.vertices(), 0);
  for (size_t v = 0; v < P.vertices(); ++v)
    s.chosen[v] = Stream(seed, kUniformCoin, v).coin();
  s.S = members_of(P, s.chosen);
  return s;
}

std::string check_sample(const PairingGraph &P, const ConnectionSample &s)
{
  const auto &G = *P.G;
  std::vector<char> in(G.order(), 0);
  for (Id x : s.S)
    in[x] = 1;
  if (in[0])
    return "identity in S";
  for (Id x : s.S)
    if (!in[G.inv(x)])
      return "S not symmetric at " + G.label(x);
  for (size_t v = 0; v < P.vertices(); ++v)
    for (Id x : P.classes[v])
      if (bool(in[x]) != bool(s.chosen[v]))
        return "class of " + G.label(P.classes[v][0]) + " split";
  for (auto [a, b] : P.matching)
    if (bool(s.chosen[a]) == bool(s.chosen[b]))
      return "matched edge at " + G.label(P.classes[a][0]) + " not exclusive";
  return {};
}

CayleyGraph::CayleyGraph(GroupPtr G, const std::vector<Id> &S) : G_(std::move(G))
{
  require(G_ != nullptr, ErrorCode::invalid_argument, "Cayley graph without a group");
  mark_.assign(G_->order(), 0);
  for (Id s : S) {
    require(s < G_->order(), ErrorCode::invalid_argument, "connection element out of range");
    mark_[s] = 1;
  }
  require(!mark_[0], ErrorCode::invalid_argument, "connection set contains the identity");
  for (Id s : S)
    require(mark_[G_->inv(s)], ErrorCode::invalid_argument, "connection set not symmetric");
  for (Id x = 0; x < G_->order(); ++x)
    if (mark_[x])
      S_.push_back(x);
}

SetCheck check_set(const CayleyGraph &g, const GroupSubset &A)
{
  require(A.group() == g.group(), ErrorCode::invalid_argument, "set lives in another group");
  GroupSubset D = quotient_set(g.group(), A.ids());
  SetCheck c;
  c.quotient_size = D.size();
  c.clique = c.independent = true;
  for (Id x : D.ids()) {
    if (x == 0)
      continue;
    if (g.in_s(x))
      c.independent = false;
    else
      c.clique = false;
  }
  return c;
}

CliqueNumbers clique_numbers(const CayleyGraph &g, size_t cap)
{
  const auto &G = *g.group();
  require(G.order() <= cap, ErrorCode::cap_exceeded,
          "exact clique numbers limited to |G| <= " + std::to_string(cap));
  CliqueNumbers out;
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<char> mark(G.order(), 0);
    std::vector<Id> nbrs;
    for (Id x = 1; x < G.order(); ++x) {
      mark[x] = pass == 0 ? g.in_s(x) : !g.in_s(x);
      if (mark[x])
        nbrs.push_back(x);
    }
    CliqueSearch search(G, mark, nbrs);
    std::vector<Id> best = search.run();
    best.insert(best.begin(), 0);
    out.nodes += search.nodes();
    if (pass == 0) {
      out.clique = int(best.size());
      out.clique_set = std::move(best);
    } else {
      out.independence = int(best.size());
      out.independent_set = std::move(best);
    }
  }
  return out;
}

const char *chain_mode_name(ChainMode m) { return m == ChainMode::doubling ? "doubling" : "prime"; }

ChainMode chain_for(PairingMode m)
{
  return m == PairingMode::squaring ? ChainMode::doubling : ChainMode::prime;
}

bool prime_square_check(uint64_t m)
{
  require(m >= 1, ErrorCode::invalid_argument, "m must be positive");
  if (24 % m == 0)
    return true;
  uint64_t q = smallest_prime_not_dividing(m);
  return (q * q - 1) % m != 0;
}

std::vector<ChainWitness> pattern_detect(const GroupSubset &D, ChainMode mode)
{
  require(D.symmetric(), ErrorCode::precondition, "pattern scan needs a symmetric set");
  const auto &G = *D.group();
  std::vector<ChainWitness> out;
  for (Id x : D.ids()) {
    if (x == 0)
      continue;
    uint64_t ord = G.element_order(x);
    uint64_t q;
    if (mode == ChainMode::doubling) {
      if (std::gcd(ord, uint64_t(6)) != 1)
        continue;
      q = 2;
    } else {
      if (24 % ord == 0)
        continue;
      q = smallest_prime_not_dividing(ord);
    }
    ChainWitness w;
    w.x = x;
    w.order = uint32_t(ord);
    w.q = uint32_t(q);
    uint64_t e = 1;
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      w.chain[i] = G.pow(x, int64_t(e));
      ok = D.contains(w.chain[i]);
      e = e * q % ord;
    }
    if (ok)
      out.push_back(w);
  }
  return out;
}

MonochromeEstimate monochrome_estimate(const PairingGraph &P, const GroupSubset &A,
                                       uint64_t samples, uint64_t base_seed, int threads)
{
  require(A.group() == P.G, ErrorCode::invalid_argument, "set lives in another group");
  require(samples > 0, ErrorCode::invalid_argument, "no samples");
  GroupSubset D = quotient_set(P.G, A.ids());
  std::vector<int> cls;
  for (Id x : D.ids())
    if (x != 0)
      cls.push_back(P.class_of[x]);
  std::sort(cls.begin(), cls.end());
  cls.erase(std::unique(cls.begin(), cls.end()), cls.end());
  MonochromeEstimate m;
  m.classes = cls.size();
  m.edge_free = true;
  for (auto [a, b] : P.matching)
    if (std::binary_search(cls.begin(), cls.end(), a) &&
        std::binary_search(cls.begin(), cls.end(), b))
      m.edge_free = false;
  require(m.edge_free, ErrorCode::precondition, "A A^-1 contains a matched edge");

  size_t chunks = size_t(std::max(threads, 1)) * 4;
  std::vector<uint64_t> cl(chunks, 0), in(chunks, 0);
  parallel_for(chunks, threads, [&](size_t c) {
    for (uint64_t s = c; s < samples; s += chunks) {
      size_t on = 0;
      for (int v : cls)
        on += vertex_chosen(P, base_seed + s, v);
      if (on == cls.size())
        ++cl[c];
      if (on == 0)
        ++in[c];
    }
  });
  m.samples = samples;
  for (size_t c = 0; c < chunks; ++c) {
    m.cliques += cl[c];
    m.independents += in[c];
  }
  // with no classes the set is both; otherwise the two events are disjoint
  uint64_t hits = m.classes == 0 ? m.cliques : m.cliques + m.independents;
  m.predicted = m.classes == 0 ? 1.0L : std::ldexp(1.0L, 1 - int(m.classes));
  m.observed = (long double)hits / (long double)samples;
  m.sigma = std::sqrt(m.predicted * (1 - m.predicted) / (long double)samples);
  m.z = m.sigma > 0 ? (m.observed - m.predicted) / m.sigma : 0;
  return m;
}

RamseyReport ramsey_experiment(const GroupPtr &G, const RamseyOptions &opt)
{
  require(opt.trials > 0, ErrorCode::invalid_argument, "trial budget is 0");
  require(G->order() <= opt.cap, ErrorCode::cap_exceeded,
          "exact clique numbers limited to |G| <= " + std::to_string(opt.cap));
  PairingGraph P = build_pairing(G, opt.mode);
  RamseyReport r;
  r.group = G->spec();
  r.N = G->order();
  r.mode = opt.mode;
  r.vertices = P.vertices();
  r.edges = P.edges.size();
  r.loops = P.loops.size();
  r.matched = P.matching.size();
  const double lg = std::log2(double(r.N));
  const ChainMode chain = chain_for(opt.mode);

  r.trials.resize(size_t(opt.trials));
  parallel_for(r.trials.size(), opt.threads, [&](size_t t) {
    TrialRecord &rec = r.trials[t];
    rec.trial = int(t);
    rec.seed = derive_key(derive_key(opt.seed, kTrialKey), t);
    ConnectionSample s = sample_connection(P, rec.seed);
    rec.sample_error = check_sample(P, s);
    rec.s = s.S.size();
    CayleyGraph g(G, s.S);
    CliqueNumbers cn = clique_numbers(g, opt.cap);
    rec.clique = cn.clique;
    rec.independence = cn.independence;
    rec.max = std::max(cn.clique, cn.independence);
    rec.ratio = lg > 0 ? rec.max / lg : 0;
    rec.within_threshold = rec.max <= opt.threshold * lg;
    for (const auto *A : {&cn.clique_set, &cn.independent_set}) {
      auto w = pattern_detect(quotient_set(G, *A), chain);
      rec.offending.insert(rec.offending.end(), w.begin(), w.end());
    }
    rec.avoidance_ok = rec.offending.empty();
    if (opt.baseline) {
      ConnectionSample u = sample_uniform(P, rec.seed);
      CliqueNumbers bn = clique_numbers(CayleyGraph(G, u.S), opt.cap);
      rec.base_clique = bn.clique;
      rec.base_independence = bn.independence;
      rec.base_max = std::max(bn.clique, bn.independence);
    }
  });
  for (const auto &t : r.trials) {
    r.worst = std::max(r.worst, t.max);
    r.worst_ratio = std::max(r.worst_ratio, t.ratio);
    r.mean_max += t.max;
    r.mean_base_max += t.base_max;
    r.avoidance_failures += !t.avoidance_ok;
    r.threshold_failures += !t.within_threshold;
    r.sample_failures += !t.sample_error.empty();
  }
  r.mean_max /= double(r.trials.size());
  r.mean_base_max /= double(r.trials.size());

  // small-quotient n-sets through the identity; translating by each member
  // gives |G| / n sets per orbit point
  SmallSetCount &c = r.count;
  c.n = opt.count_n;
  c.K = opt.count_k;
  if (c.n >= 1 && size_t(c.n) <= r.N) {
    long double sets = 1;
    for (int i = 0; i < c.n - 1; ++i)
      sets = sets * (long double)(r.N - 1 - i) / (long double)(i + 1);
    if (sets <= (long double)opt.count_budget) {
      c.ran = true;
      const double limit = opt.count_k * c.n;
      std::vector<Id> pick(size_t(c.n - 1));
      std::vector<Id> A(size_t(c.n));
      std::vector<char> mark(r.N, 0);
      std::vector<Id> touched;
      auto visit = [&] {
        A[0] = 0;
        std::copy(pick.begin(), pick.end(), A.begin() + 1);
        size_t cnt = 0;
        for (Id a : A)
          for (Id b : A) {
            Id x = G->mul(a, G->inv(b));
            if (!mark[x]) {
              mark[x] = 1;
              touched.push_back(x);
              ++cnt;
            }
          }
        for (Id x : touched)
          mark[x] = 0;
        touched.clear();
        if (double(cnt) <= limit)
          ++c.with_identity;
      };
      // lexicographic (n-1)-subsets of 1..N-1
      int k = c.n - 1;
      for (int i = 0; i < k; ++i)
        pick[size_t(i)] = Id(i + 1);
      for (;;) {
        visit();
        int i = k - 1;
        while (i >= 0 && pick[size_t(i)] == Id(r.N - k + i))
          --i;
        if (i < 0)
          break;
        ++pick[size_t(i)];
        for (int j = i + 1; j < k; ++j)
          pick[size_t(j)] = pick[size_t(j - 1)] + 1;
      }
      c.total = BigInt(r.N) * c.with_identity / c.n;
      const long double C = 6000, n = c.n, K = c.K;
      c.log_bound = C * (K + std::log(n)) * std::log((long double)r.N) +
                    n * (C * std::log(2.0L) + std::log(K));
      c.within_bound = c.total == 0 || std::log((long double)c.total) <= c.log_bound;
    }
  }
  return r;
}

std::string ramsey_csv(const RamseyReport &r)
{
  std::ostringstream os;
  os << "trial,s,clique,independence,max,max_over_log2n\n";
  for (const auto &t : r.trials)
    os << t.trial << ',' << t.s << ',' << t.clique << ',' << t.independence << ',' << t.max
       << ',' << t.ratio << '\n';
  return os.str();
}

} // namespace grpcomb
