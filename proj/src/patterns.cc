#include "grpcomb/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "grpcomb/error.hpp"
#include "grpcomb/field.hpp"
#include "grpcomb/structure.hpp"

namespace grpcomb {

namespace {

void require_abelian(const FiniteGroup &G)
{
  require(G.is_abelian(), ErrorCode::precondition, G.spec() + " is not abelian");
}

std::vector<uint64_t> primes_below(uint64_t Q)
{
  std::vector<uint64_t> out;
  for (uint64_t p = 2; p < Q; ++p)
    if (is_prime(p))
      out.push_back(p);
  return out;
}

// q^s saturated at `sat`
uint64_t sat_pow(uint64_t q, int s, uint64_t sat)
{
  uint64_t r = 1;
  for (int i = 0; i < s; ++i) {
    if (r > sat / q)
      return sat;
    r *= q;
  }
  return r;
}

bool divides(uint64_t M, int64_t t)
{
  uint64_t a = uint64_t(t < 0 ? -t : t);
  return a % M == 0;
}

int s_of(const std::map<uint64_t, int> &s, uint64_t q)
{
  auto it = s.find(q);
  return it == s.end() ? 0 : it->second;
}

// A - A as a mark vector over group ids
std::vector<char> difference_marks(const GroupSubset &A)
{
  const auto &G = *A.group();
  std::vector<char> d(G.order(), 0);
  for (Id a : A.ids())
    for (Id b : A.ids())
      d[G.mul(a, G.inv(b))] = 1;
  return d;
}

// x, 2x, 4x, 8x (multiplicatively x, x^2, x^4, x^8) all marked; smallest x != 0
std::optional<Id> doubling_chain(const FiniteGroup &G, const std::vector<char> &D)
{
  for (Id x = 1; x < G.order(); ++x) {
    if (!D[x])
      continue;
    Id y = x;
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      y = G.mul(y, y);
      ok = D[y];
    }
    if (ok)
      return x;
  }
  return std::nullopt;
}

// Largest subset of 0..k-1 containing no forbidden triple and no forbidden
// pair. Branch and bound over the index order with the count of still
// admissible points as bound.
class FreeSetSearch {
public:
  FreeSetSearch(size_t k, const std::vector<std::array<int, 3>> &triples,
                const std::vector<std::pair<int, int>> &pairs, uint64_t budget)
    : k_(k), inc_(k), pair_inc_(k), forbid_(k, 0), budget_(budget)
  {
    for (size_t i = 0; i < triples.size(); ++i)
      for (int v : triples[i])
        inc_[size_t(v)].push_back(triples[i]);
    for (auto [a, b] : pairs) {
      pair_inc_[size_t(a)].push_back(b);
      pair_inc_[size_t(b)].push_back(a);
    }
  }

  ExtremalSize run()
  {
    ExtremalSize out;
    out.ran = true;
    out.points = k_;
    chosen_.assign(k_, 0);
    go(0);
    out.best = best_;
    out.nodes = nodes_;
    out.exact = nodes_ <= budget_;
    return out;
  }

private:
  void go(size_t i)
  {
    if (++nodes_ > budget_)
      return;
    if (cur_ > best_)
      best_ = cur_;
    size_t room = 0;
    for (size_t j = i; j < k_; ++j)
      room += forbid_[j] == 0;
    if (cur_ + room <= best_)
      return;
    size_t v = i;
    while (v < k_ && forbid_[v])
      ++v;
    if (v == k_)
      return;
    // include v
    std::vector<int> hit;
    for (int w : pair_inc_[v])
      hit.push_back(w);
    for (const auto &t : inc_[v]) {
      int a = -1, b = -1;
      for (int x : t)
        if (size_t(x) != v)
          (a < 0 ? a : b) = x;
      if (chosen_[size_t(a)])
        hit.push_back(b);
      else if (chosen_[size_t(b)])
        hit.push_back(a);
    }
    for (int w : hit)
      ++forbid_[size_t(w)];
    chosen_[v] = 1;
    ++cur_;
    go(v + 1);
    --cur_;
    chosen_[v] = 0;
    for (int w : hit)
      --forbid_[size_t(w)];
    if (nodes_ > budget_)
      return;
    // exclude v
    ++forbid_[v];
    go(v + 1);
    --forbid_[v];
  }

  size_t k_;
  std::vector<std::vector<std::array<int, 3>>> inc_;
  std::vector<std::vector<int>> pair_inc_;
  std::vector<int> forbid_;
  std::vector<char> chosen_;
  size_t cur_ = 0, best_ = 0;
  uint64_t nodes_ = 0, budget_;
};

// fewest arcs of length m covering the given positions on a cycle of length n
size_t arc_cover(std::vector<uint32_t> pos, uint32_t m, uint32_t n)
{
  if (pos.empty())
    return 0;
  if (m >= n)
    return 1;
  std::sort(pos.begin(), pos.end());
  size_t k = pos.size(), best = k;
  for (size_t s = 0; s < k; ++s) {
    size_t arcs = 0, i = 0;
    while (i < k) {
      uint32_t start = (pos[(s + i) % k] + n - pos[s]) % n;
      ++arcs;
      while (i < k && (pos[(s + i) % k] + n - pos[s]) % n < start + m)
        ++i;
    }
    best = std::min(best, arcs);
  }
  return best;
}

} // namespace

// ---------------------------------------------------------------- pattern-freeness

const char *ap_mode_name(ApMode m) { return m == ApMode::translational ? "translational" : "averaging"; }

ApMode parse_ap_mode(const std::string &s)
{
  if (s == "translational" || s == "translational-3ap")
    return ApMode::translational;
  if (s == "averaging" || s == "averaging-3ap")
    return ApMode::averaging;
  fail(ErrorCode::invalid_argument, "unknown 3-AP mode " + s);
}

ApCheck three_ap_check(const GroupSubset &A, ApMode mode)
{
  const auto &G = *A.group();
  ApCheck c;
  for (Id x : A.ids())
    for (Id z : A.ids()) {
      if (x == z)
        continue;
      if (mode == ApMode::translational) {
        Id y = G.mul(G.inv(x), z);
        Id w = G.mul(z, y);
        if (A.contains(w)) {
          c.free = false;
          c.witness = {x, z, w};
          return c;
        }
      } else {
        Id w = G.mul(G.inv(x), G.mul(z, z));
        if (A.contains(w)) {
          c.free = false;
          c.witness = {x, z, w};
          return c;
        }
      }
    }
  return c;
}

CornerCheck corner_check(const GroupPtr &G, const std::vector<Cell> &cells, const GroupSubset &B)
{
  require(B.group() == G, ErrorCode::invalid_argument, "B lives in another group");
  for (Id a : B.ids())
    for (Id b : B.ids())
      require(G->commute(a, b), ErrorCode::precondition, "B does not commute");
  const uint64_t n = G->order();
  std::unordered_set<uint64_t> in;
  std::map<Id, std::vector<Id>> rows; // y -> xs
  for (auto [x, y] : cells) {
    require(B.contains(x) && B.contains(y), ErrorCode::precondition, "cell outside B x B");
    if (in.insert(uint64_t(x) * n + y).second)
      rows[y].push_back(x);
  }
  CornerCheck c;
  for (auto &[y, xs] : rows) {
    std::sort(xs.begin(), xs.end());
    for (Id x : xs)
      for (Id x2 : xs) {
        if (x == x2)
          continue;
        Id d = G->mul(G->inv(x), x2);
        Id yd = G->mul(y, d);
        if (in.count(uint64_t(x) * n + yd)) {
          c.free = false;
          c.corner = {x, y};
          c.d = d;
          return c;
        }
      }
  }
  return c;
}

std::vector<Cell> corner_transfer(const GroupSubset &A, Id g, const GroupSubset &B0)
{
  const auto &G = *A.group();
  require(B0.group() == A.group(), ErrorCode::invalid_argument, "B0 lives in another group");
  std::vector<Cell> S;
  for (Id x : B0.ids())
    for (Id y : B0.ids())
      if (A.contains(G.mul(G.mul(x, g), G.inv(y))))
        S.emplace_back(x, y);
  return S;
}

// ---------------------------------------------------------------- progressions

ProgressionReport check_progression(const CosetProgression &M, uint64_t cap)
{
  const auto &G = *M.G;
  require_abelian(G);
  require(M.gens.size() == M.bounds.size(), ErrorCode::invalid_argument,
          "one bound per generator");
  ProgressionReport r;
  long double params = (long double)M.H.order();
  for (auto b : M.bounds)
    params *= 2.0L * b + 1;
  require(params <= (long double)cap, ErrorCode::cap_exceeded,
          "progression has more than " + std::to_string(cap) + " parameters");
  r.params = uint64_t(params);
  size_t rank = M.gens.size();
  std::vector<int64_t> a(rank);
  for (size_t i = 0; i < rank; ++i)
    a[i] = -int64_t(M.bounds[i]);
  std::unordered_map<Id, std::vector<int64_t>> first;
  r.proper = true;
  for (;;) {
    Id base = 0;
    for (size_t i = 0; i < rank; ++i)
      base = G.mul(base, G.pow(M.gens[i], a[i]));
    for (size_t hi = 0; hi < M.H.members.size(); ++hi) {
      Id x = G.mul(M.H.members[hi], base);
      std::vector<int64_t> tuple{int64_t(hi)};
      tuple.insert(tuple.end(), a.begin(), a.end());
      auto [it, fresh] = first.emplace(x, tuple);
      if (!fresh && r.proper) {
        r.proper = false;
        r.clash_a = it->second;
        r.clash_b = tuple;
      }
    }
    size_t i = 0;
    while (i < rank && a[i] == int64_t(M.bounds[i])) {
      a[i] = -int64_t(M.bounds[i]);
      ++i;
    }
    if (i == rank)
      break;
    ++a[i];
  }
  for (auto &kv : first)
    r.members.push_back(kv.first);
  std::sort(r.members.begin(), r.members.end());
  return r;
}

std::vector<Id> IntervalSet::members() const
{
  std::vector<Id> out;
  Id x = g1;
  for (uint32_t i = 0; i < m; ++i) {
    x = G->mul(x, g2);
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool IntervalSet::covers_period() const { return m >= G->element_order(g2); }

// ---------------------------------------------------------------- dense nice sets

const char *nice_kind_name(NiceKind k) { return k == NiceKind::elementary ? "elementary" : "interval"; }

NiceSetResult dense_nice_set(const GroupSubset &A, const NiceSetOptions &opt)
{
  const GroupPtr &Gp = A.group();
  const auto &G = *Gp;
  require_abelian(G);
  require(!A.empty(), ErrorCode::invalid_argument, "A must be nonempty");
  require(G.order() >= 2, ErrorCode::invalid_argument, "trivial ambient group");
  const Id n = G.order();
  size_t T = opt.threshold;
  if (T == 0)
    T = std::max<size_t>(2, size_t(std::ceil(std::sqrt(double(A.size())))));

  std::vector<char> inA(n, 0);
  for (Id a : A.ids())
    inA[a] = 1;

  for (int round = 0; round < 2; ++round) {
    NiceSetResult best;
    best.threshold = T;
    bool have = false;
    // density comparison hits/size, ties to the larger set
    auto better = [&](size_t hits, size_t size) {
      if (!have)
        return true;
      uint64_t l = uint64_t(hits) * best.size, r = uint64_t(best.hits) * size;
      return l > r || (l == r && size > best.size);
    };

    // elementary p-subgroups, breadth first from the trivial group
    for (uint64_t p = 2; p <= n; ++p) {
      if (n % p != 0 || !is_prime(p))
        continue;
      if (std::find(opt.exclude_primes.begin(), opt.exclude_primes.end(), p) !=
          opt.exclude_primes.end())
        continue;
      std::vector<Id> omega;
      for (Id x = 0; x < n; ++x)
        if (G.pow(x, int64_t(p)) == 0)
          omega.push_back(x);
      std::vector<std::vector<Id>> subs{{0}};
      std::set<std::vector<Id>> seen{{0}};
      std::vector<char> mark(n, 0);
      for (size_t qi = 0; qi < subs.size(); ++qi) {
        const std::vector<Id> J = subs[qi];
        for (Id x : omega)
          mark[x] = 0;
        for (Id j : J)
          mark[j] = 1;
        for (Id x : omega) {
          if (mark[x])
            continue;
          std::vector<Id> K;
          Id step = 0;
          for (uint64_t k = 0; k < p; ++k) {
            for (Id j : J)
              K.push_back(G.mul(j, step));
            step = G.mul(step, x);
          }
          std::sort(K.begin(), K.end());
          for (Id y : K)
            mark[y] = 1;
          if (seen.insert(K).second) {
            if (subs.size() >= opt.subgroup_cap) {
              best.exhaustive = false;
              continue;
            }
            subs.push_back(std::move(K));
          }
        }
      }
      for (const auto &J : subs) {
        if (J.size() < T)
          continue;
        ++best.candidates;
        std::map<Id, size_t> cosets; // smallest member -> hits
        for (Id a : A.ids()) {
          Id key = n;
          for (Id j : J)
            key = std::min(key, G.mul(a, j));
          ++cosets[key];
        }
        Id top = 0;
        size_t hits = 0;
        for (auto [k, c] : cosets)
          if (c > hits) {
            hits = c;
            top = k;
          }
        if (better(hits, J.size())) {
          have = true;
          best.kind = NiceKind::elementary;
          best.p = p;
          best.J = Subgroup{Gp, J, generating_set(Gp, J)};
          best.shift = top;
          best.size = J.size();
          best.hits = hits;
          best.cover = cosets.size();
        }
      }
    }

    // intervals x, x + g2, ..., x + (m-1) g2 along cycles of <g2>
    struct Window {
      Id g2 = 0, start = 0;
      uint32_t m = 0;
    };
    std::optional<Window> win;
    size_t win_hits = 0, win_size = 0;
    auto take = [&](Id g2, Id start, uint32_t m, size_t hits) {
      bool wins = !win || uint64_t(hits) * win_size > uint64_t(win_hits) * m ||
                  (uint64_t(hits) * win_size == uint64_t(win_hits) * m && m > win_size);
      if (wins) {
        win = Window{g2, start, m};
        win_hits = hits;
        win_size = m;
      }
    };
    std::vector<char> seen(n, 0);
    std::vector<Id> cyc;
    std::vector<uint32_t> pre;
    auto cycles = [&](Id g2, const std::function<void()> &body) {
      std::fill(seen.begin(), seen.end(), 0);
      for (Id c = 0; c < n; ++c) {
        if (seen[c])
          continue;
        cyc.clear();
        for (Id x = c; !seen[x]; x = G.mul(x, g2)) {
          seen[x] = 1;
          cyc.push_back(x);
        }
        size_t L = cyc.size();
        pre.assign(2 * L + 1, 0);
        for (size_t i = 0; i < 2 * L; ++i)
          pre[i + 1] = pre[i] + inA[cyc[i % L]];
        body();
      }
    };
    for (Id g2 = 1; g2 < n; ++g2) {
      if (G.inv(g2) < g2)
        continue;
      uint32_t N2 = G.element_order(g2);
      if (N2 < T)
        continue;
      std::vector<uint32_t> lens;
      for (size_t m = T; m <= std::min<size_t>(2 * T - 1, N2); ++m)
        lens.push_back(uint32_t(m));
      if (lens.back() != N2)
        lens.push_back(N2);
      cycles(g2, [&] {
        for (uint32_t m : lens) {
          size_t starts = m == N2 ? 1 : N2;
          for (size_t j = 0; j < starts; ++j) {
            ++best.candidates;
            take(g2, cyc[j], m, pre[j + m] - pre[j]);
          }
        }
      });
    }
    // longest window at the best interval density
    if (win) {
      uint64_t g = std::gcd(uint64_t(win_hits), uint64_t(win_size));
      int64_t num = int64_t(win_hits / g), den = int64_t(win_size / g);
      for (Id g2 = 1; g2 < n; ++g2) {
        if (G.inv(g2) < g2)
          continue;
        uint32_t N2 = G.element_order(g2);
        if (N2 < T || N2 <= win_size)
          continue;
        cycles(g2, [&] {
          // zero-sum windows of den * bit - num, starting in the first lap
          std::unordered_map<int64_t, std::vector<uint32_t>> at;
          auto z = [&](size_t i) { return den * int64_t(pre[i]) - num * int64_t(i); };
          for (uint32_t i = 0; i < N2; ++i)
            at[z(i)].push_back(i);
          for (size_t j = T; j <= 2 * size_t(N2); ++j) {
            auto it = at.find(z(j));
            if (it == at.end())
              continue;
            size_t lo = j > N2 ? j - N2 : 0;
            auto pos = std::lower_bound(it->second.begin(), it->second.end(), uint32_t(lo));
            if (pos == it->second.end() || *pos + T > j)
              continue;
            size_t m = j - *pos;
            if (m > win_size)
              take(g2, cyc[*pos], uint32_t(m), pre[j] - pre[*pos]);
          }
        });
      }
      if (better(win_hits, win_size)) {
        have = true;
        best.kind = NiceKind::interval;
        best.p = 0;
        best.J = Subgroup{};
        best.I = IntervalSet{Gp, 0, win->g2, win->m};
        best.shift = G.mul(win->start, G.inv(win->g2));
        best.size = win_size;
        best.hits = win_hits;
        // per cycle arc cover
        size_t cover = 0;
        cycles(win->g2, [&] {
          std::vector<uint32_t> pos;
          for (uint32_t i = 0; i < cyc.size(); ++i)
            if (inA[cyc[i]])
              pos.push_back(i);
          cover += arc_cover(pos, win->m, uint32_t(cyc.size()));
        });
        best.cover = cover;
      }
    }
    if (!have) {
      // nothing reaches the threshold: take the best set of any size
      T = 1;
      continue;
    }
    if (best.kind == NiceKind::elementary) {
      for (Id j : best.J.members)
        best.S.push_back(G.mul(best.shift, j));
      best.I = IntervalSet{Gp, 0, 0, 0};
    } else {
      IntervalSet shifted = best.I;
      shifted.g1 = best.shift;
      best.S = shifted.members();
    }
    std::sort(best.S.begin(), best.S.end());
    best.density = (long double)best.hits / (long double)best.size;
    best.capture = (long double)best.hits / (long double)A.size();
    best.certified = round == 0 && best.size >= best.threshold;
    best.threshold = opt.threshold == 0 && round == 0 ? T : best.threshold;
    return best;
  }
  fail(ErrorCode::internal, "no candidate set in a group of order >= 2");
}

// ---------------------------------------------------------------- multiples in Z

std::string verify_multiple_Z(const std::vector<int64_t> &A, const std::map<uint64_t, int> &s,
                              uint64_t q, int64_t t)
{
  if (t == 0)
    return "t = 0";
  if (!is_prime(q))
    return "q is not prime";
  uint64_t lim = uint64_t(1) << 62;
  if (!divides(sat_pow(q, s_of(s, q), lim), t) || sat_pow(q, s_of(s, q), lim) == lim)
    return "q^s_q does not divide t";
  for (uint64_t p = 2; p < q; ++p) {
    if (!is_prime(p))
      continue;
    uint64_t M = sat_pow(p, s_of(s, p), lim);
    if (M < lim && divides(M, t))
      return "smaller prime power " + std::to_string(M) + " divides t";
  }
  std::unordered_set<int64_t> in(A.begin(), A.end());
  int64_t x = t;
  for (int i = 0; i < 4; ++i) {
    bool found = false;
    for (int64_t a : A)
      if (in.count(a + x)) {
        found = true;
        break;
      }
    if (!found)
      return "q^" + std::to_string(i) + " t not in A - A";
    if (i < 3)
      x *= int64_t(q);
  }
  return {};
}

MultiplesZResult find_multiples_Z(const std::vector<int64_t> &Ain, int64_t N,
                                  const std::map<uint64_t, int> &s, uint64_t Q, size_t R)
{
  std::vector<int64_t> A = Ain;
  std::sort(A.begin(), A.end());
  A.erase(std::unique(A.begin(), A.end()), A.end());
  require(!A.empty(), ErrorCode::invalid_argument, "A must be nonempty");
  require(N >= 1 && A.front() >= 1 && A.back() <= N, ErrorCode::invalid_argument,
          "A must lie in [1, N]");
  require(Q >= 3, ErrorCode::invalid_argument, "Q must exceed 2");
  auto primes = primes_below(Q);
  const uint64_t lim = uint64_t(1) << 62;
  bool some_small = false;
  for (auto p : primes)
    some_small = some_small || sat_pow(p, s_of(s, p), lim) <= Q;
  require(some_small, ErrorCode::precondition, "every q^s_q exceeds Q");

  MultiplesZResult r;
  const BigInt n = A.size(), BN = N, BQ = Q;
  r.delta_num = 2 * big_pow(BQ, 7) * big_pow(BN, 8);
  r.delta_den = big_pow(n, 8);
  r.threshold_met = BN * big_pow(n, 12) > 8 * big_pow(BN, 12) * big_pow(BQ, 10) * BigInt(R);
  for (auto p : primes)
    if (big_pow(BigInt(p), unsigned(s_of(s, p))) * r.delta_den <= r.delta_num) {
      r.q = p;
      break;
    }
  const int64_t q = int64_t(r.q);

  // heaviest fiber of (a0..a3) -> (q a0 + a1, q a1 + a2, q a2 + a3)
  std::vector<char> inA(size_t(N) + 1, 0);
  for (int64_t a : A)
    inA[size_t(a)] = 1;
  auto member = [&](int64_t v) { return v >= 1 && v <= N && inA[size_t(v)]; };
  const size_t span = size_t((q + 1) * N) + 1;
  std::vector<std::vector<int64_t>> by_u1(span);
  for (int64_t a0 : A)
    for (int64_t a1 : A)
      by_u1[size_t(q * a0 + a1)].push_back(a0);
  std::vector<uint32_t> cnt(span, 0);
  std::vector<size_t> touched;
  // largest fibers first so the bound prunes early; ties go to the smallest key
  std::vector<size_t> order;
  for (size_t u1 = 0; u1 < span; ++u1)
    if (!by_u1[u1].empty())
      order.push_back(u1);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return by_u1[x].size() > by_u1[y].size(); });
  size_t best = 0;
  auto better = [&](size_t c, const std::array<int64_t, 3> &key) {
    return c > best || (c == best && key < r.u);
  };
  for (size_t u1 : order) {
    const auto &B1 = by_u1[u1];
    if (B1.size() < best)
      break;
    for (int64_t a0 : B1) {
      int64_t a1 = int64_t(u1) - q * a0;
      for (int64_t a2 : A) {
        size_t v = size_t(q * a1 + a2);
        if (cnt[v]++ == 0)
          touched.push_back(v);
      }
    }
    std::vector<std::pair<size_t, size_t>> heavy; // (count, u2)
    for (size_t v : touched)
      if (cnt[v] >= best)
        heavy.emplace_back(cnt[v], v);
    for (size_t v : touched)
      cnt[v] = 0;
    touched.clear();
    std::sort(heavy.begin(), heavy.end(),
              [](auto x, auto y) { return x.first != y.first ? x.first > y.first : x.second < y.second; });
    for (auto [c2, u2] : heavy) {
      if (c2 < best)
        break;
      std::vector<int64_t> B2;
      for (int64_t a0 : B1) {
        int64_t a1 = int64_t(u1) - q * a0;
        if (member(int64_t(u2) - q * a1))
          B2.push_back(a0);
      }
      for (int64_t a0 : B2) {
        int64_t a2 = int64_t(u2) - q * (int64_t(u1) - q * a0);
        for (int64_t a3 : A) {
          size_t w = size_t(q * a2 + a3);
          if (cnt[w]++ == 0)
            touched.push_back(w);
        }
      }
      std::sort(touched.begin(), touched.end());
      for (size_t w : touched) {
        std::array<int64_t, 3> key{int64_t(u1), int64_t(u2), int64_t(w)};
        if (best == 0 || better(cnt[w], key)) {
          best = cnt[w];
          r.u = key;
        }
      }
      for (size_t w : touched)
        cnt[w] = 0;
      touched.clear();
    }
  }
  for (int64_t a0 : A) {
    int64_t a1 = r.u[0] - q * a0, a2 = r.u[1] - q * a1, a3 = r.u[2] - q * a2;
    if (member(a1) && member(a2) && member(a3))
      r.A0.push_back(a0);
  }
  const BigInt k0 = r.A0.size();
  r.fiber_bound = check_le("eps^4 Q^-3 N <= |A0|", big_pow(n, 4), big_pow(BN, 3) * big_pow(BQ, 3),
                           k0, 1);

  // every difference inside A0 has its first three q-multiples in A - A
  std::vector<char> diff(size_t(2 * N) + 1, 0);
  for (int64_t a : A)
    for (int64_t b : A)
      diff[size_t(a - b + N)] = 1;
  auto in_diff = [&](int64_t x) { return x > -N && x < N && diff[size_t(x + N)]; };
  for (int64_t a : r.A0)
    for (int64_t b : r.A0) {
      int64_t t = a - b;
      if (!in_diff(q * t) || !in_diff(q * q * t) || !in_diff(q * q * q * t))
        r.verify_error = "fiber difference " + std::to_string(t) + " misses a multiple";
    }

  // congruence filter
  const uint64_t Mq = sat_pow(r.q, s_of(s, r.q), lim);
  std::vector<uint64_t> lower;
  for (auto p : primes)
    if (p < r.q)
      lower.push_back(sat_pow(p, s_of(s, p), lim));
  auto good = [&](int64_t t) {
    if (!divides(Mq, t))
      return false;
    for (uint64_t M : lower)
      if (divides(M, t))
        return false;
    return true;
  };
  size_t top = 0;
  for (int64_t a : r.A0) {
    size_t c = 0;
    for (int64_t b : r.A0)
      if (a != b && good(a - b))
        ++c;
    r.good_pairs += c;
    if (c > top || r.t.empty()) {
      if (c > top || (c == top && r.t.empty())) {
        top = c;
        r.anchor = a;
      }
    }
  }
  r.good_pairs += r.A0.size();
  r.pair_bound = check_le("Q^-10 eps^12 |A0| N / 4 <= pairs", big_pow(n, 12) * k0 * BN,
                          4 * big_pow(BQ, 10) * big_pow(BN, 12), BigInt(r.good_pairs), 1);
  if (top > 0)
    for (int64_t b : r.A0)
      if (b != r.anchor && good(r.anchor - b))
        r.t.push_back(r.anchor - b);
  for (int64_t t : r.t) {
    std::string e = verify_multiple_Z(A, s, r.q, t);
    if (!e.empty() && r.verify_error.empty())
      r.verify_error = "t = " + std::to_string(t) + ": " + e;
  }
  r.found = !r.t.empty();
  r.certified = r.threshold_met && r.fiber_bound.holds && r.pair_bound.holds &&
                r.verify_error.empty() && r.t.size() >= R;
  return r;
}

// ---------------------------------------------------------------- multiples in abelian groups

std::string verify_multiple(const GroupSubset &A, uint64_t q, Id t)
{
  const auto &G = *A.group();
  if (t == 0)
    return "t is the identity";
  if (!is_prime(q))
    return "q is not prime";
  uint64_t ord = G.element_order(t);
  if (24 % ord == 0)
    return "order of t divides 24";
  if (ord % q == 0)
    return "q divides the order of t";
  for (uint64_t p = 2; p < q; ++p)
    if (is_prime(p) && ord % p != 0)
      return "prime " + std::to_string(p) + " below q does not divide the order";
  auto D = difference_marks(A);
  Id x = t;
  for (int i = 0; i < 4; ++i) {
    if (!D[x])
      return "q^" + std::to_string(i) + " t not in A - A";
    x = G.pow(x, int64_t(q));
  }
  return {};
}

MultiplesResult find_multiples_general(const GroupSubset &A, const MultiplesOptions &opt)
{
  const GroupPtr &Gp = A.group();
  const auto &G = *Gp;
  require_abelian(G);
  MultiplesResult r;
  r.branch = "none";
  if (A.size() < 2 || G.order() < 2) {
    r.diagnostics = "A - A has no nonzero element";
    return r;
  }
  NiceSetOptions nopt = opt.nice;
  for (uint64_t p : {2u, 3u})
    if (std::find(nopt.exclude_primes.begin(), nopt.exclude_primes.end(), p) ==
        nopt.exclude_primes.end())
      nopt.exclude_primes.push_back(p);
  r.nice = dense_nice_set(A, nopt);
  std::vector<Id> piece;
  for (Id x : r.nice.S)
    if (A.contains(x))
      piece.push_back(x);

  if (r.nice.kind == NiceKind::elementary) {
    r.branch = "elementary";
    r.q = 2;
    GroupSubset Ap(Gp, piece);
    BigInt h = Ap.size(), sz = r.nice.size;
    r.pigeonhole = big_pow(h, 4) > big_pow(sz, 3);
    // a collision of (2a0 + a1, 2a1 + a2, 2a2 + a3) is the same thing as
    // t != 0 with t, 2t, 4t, 8t in A' - A'
    auto D = difference_marks(Ap);
    for (Id t = 1; t < G.order(); ++t) {
      if (!D[t])
        continue;
      Id y = t;
      bool ok = true;
      for (int i = 0; i < 3 && ok; ++i) {
        y = G.mul(y, y);
        ok = D[y];
      }
      if (!ok)
        continue;
      std::string e = verify_multiple(A, 2, t);
      if (e.empty())
        r.all.push_back(t);
      else
        r.diagnostics = "rejected " + G.label(t) + ": " + e;
    }
    r.found = !r.all.empty();
    if (r.found)
      r.t = r.all.front();
    else if (r.diagnostics.empty())
      r.diagnostics = "the doubling map is injective on the dense piece";
    r.certified = r.found && r.pigeonhole && r.nice.certified;
    return r;
  }

  r.branch = "interval";
  const Id g2 = r.nice.I.g2;
  const uint32_t m = r.nice.I.m;
  const uint64_t NH = G.element_order(g2);
  std::vector<int64_t> Ap;
  Id x = r.nice.shift;
  for (uint32_t i = 1; i <= m; ++i) {
    x = G.mul(x, g2);
    if (A.contains(x))
      Ap.push_back(int64_t(i));
  }
  if (Ap.size() < 2) {
    r.diagnostics = "interval holds fewer than two points of A";
    return r;
  }
  uint64_t Q = opt.Q ? opt.Q : std::max<uint64_t>(3, [&] {
    for (uint64_t p = 2;; ++p)
      if (is_prime(p) && NH % p != 0)
        return p + 1;
  }());
  std::map<uint64_t, int> s;
  for (auto p : primes_below(Q)) {
    int v = 0;
    for (uint64_t h = NH; h % p == 0; h /= p)
      ++v;
    s[p] = v;
  }
  try {
    r.inner = find_multiples_Z(Ap, int64_t(m), s, Q, opt.R);
  } catch (const Error &e) {
    r.diagnostics = e.what();
    return r;
  }
  r.q = r.inner->q;
  std::set<Id> seen;
  for (int64_t t : r.inner->t) {
    int64_t e = ((t % int64_t(NH)) + int64_t(NH)) % int64_t(NH);
    Id u = G.pow(g2, e);
    ++r.pushed;
    if (u == 0 || 24 % G.element_order(u) == 0) {
      ++r.dropped_24;
      continue;
    }
    if (!seen.insert(u).second)
      continue;
    std::string err = verify_multiple(A, r.q, u);
    if (err.empty())
      r.all.push_back(u);
    else
      r.diagnostics = "rejected " + G.label(u) + ": " + err;
  }
  std::sort(r.all.begin(), r.all.end());
  r.found = !r.all.empty();
  if (r.found)
    r.t = r.all.front();
  else if (r.diagnostics.empty())
    r.diagnostics = "no multiple survived the push-forward";
  r.certified = r.found && r.inner->certified && r.nice.certified;
  return r;
}

// ---------------------------------------------------------------- doubling

DoublingReport cfpy_doubling_check(const GroupSubset &A)
{
  const auto &G = *A.group();
  require_abelian(G);
  require(!A.empty(), ErrorCode::invalid_argument, "A must be nonempty");
  DoublingReport r;
  auto D = difference_marks(A);
  r.a = A.size();
  r.diff = size_t(std::count(D.begin(), D.end(), 1));
  if (auto w = doubling_chain(G, D)) {
    r.avoids = false;
    r.witness = *w;
  }
  r.bound = check_le("|A|^145 <= |A - A|^144", big_pow(BigInt(r.a), 145),
                     big_pow(BigInt(r.diff), 144));
  return r;
}

GroupSubset grow_chain_free(const GroupPtr &G, size_t target, Stream &rng)
{
  std::vector<Id> order(G->order());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<Id> A;
  std::vector<char> D(G->order(), 0);
  std::vector<Id> touched;
  for (Id x : order) {
    if (A.size() >= target)
      break;
    A.push_back(x);
    for (Id a : A)
      for (Id b : A) {
        Id d = G->mul(a, G->inv(b));
        if (!D[d]) {
          D[d] = 1;
          touched.push_back(d);
        }
      }
    bool bad = doubling_chain(*G, D).has_value();
    for (Id d : touched)
      D[d] = 0;
    touched.clear();
    if (bad)
      A.pop_back();
  }
  return GroupSubset(G, A);
}

GroupSubset grow_ap_free(const GroupPtr &G, size_t target, ApMode mode, Stream &rng)
{
  std::vector<Id> order(G->order());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<Id> A;
  for (Id x : order) {
    if (A.size() >= target)
      break;
    A.push_back(x);
    if (!three_ap_check(GroupSubset(G, A), mode).free)
      A.pop_back();
  }
  return GroupSubset(G, A);
}

// ---------------------------------------------------------------- extremal sizes

ExtremalSize max_ap_free(const GroupPtr &G, const std::vector<Id> &points, uint64_t budget)
{
  std::unordered_map<Id, int> idx;
  for (size_t i = 0; i < points.size(); ++i)
    idx[points[i]] = int(i);
  std::set<std::array<int, 3>> triples;
  std::set<std::pair<int, int>> pairs;
  for (Id x : points)
    for (Id mid : points) {
      if (x == mid)
        continue;
      Id z = G->mul(mid, G->mul(G->inv(x), mid));
      auto it = idx.find(z);
      if (it == idx.end())
        continue;
      int a = idx[x], b = idx[mid], c = it->second;
      if (c == a) {
        pairs.emplace(std::min(a, b), std::max(a, b));
        continue;
      }
      std::array<int, 3> t{a, b, c};
      std::sort(t.begin(), t.end());
      triples.insert(t);
    }
  std::vector<std::array<int, 3>> tv(triples.begin(), triples.end());
  std::vector<std::pair<int, int>> pv(pairs.begin(), pairs.end());
  return FreeSetSearch(points.size(), tv, pv, budget).run();
}

ExtremalSize max_corner_free(const GroupPtr &G, const std::vector<Id> &B, uint64_t budget)
{
  size_t b = B.size();
  std::unordered_map<Id, int> idx;
  for (size_t i = 0; i < b; ++i)
    idx[B[i]] = int(i);
  auto cell = [&](int x, int y) { return int(size_t(x) * b + size_t(y)); };
  std::set<std::array<int, 3>> triples;
  for (size_t y = 0; y < b; ++y)
    for (size_t x = 0; x < b; ++x)
      for (size_t x2 = 0; x2 < b; ++x2) {
        if (x == x2)
          continue;
        Id d = G->mul(G->inv(B[x]), B[x2]);
        auto it = idx.find(G->mul(B[y], d));
        if (it == idx.end())
          continue;
        std::array<int, 3> t{cell(int(x), int(y)), cell(int(x2), int(y)), cell(int(x), it->second)};
        std::sort(t.begin(), t.end());
        triples.insert(t);
      }
  std::vector<std::array<int, 3>> tv(triples.begin(), triples.end());
  return FreeSetSearch(b * b, tv, {}, budget).run();
}

// ---------------------------------------------------------------- local Roth

RothReport local_roth_experiment(const GroupSubset &A, ApMode mode, const RothOptions &opt)
{
  require(!A.empty(), ErrorCode::invalid_argument, "A must be nonempty");
  const GroupPtr &Gp = A.group();
  RothReport r;
  r.mode = mode;
  r.pattern = three_ap_check(A, mode);
  require(r.pattern.free, ErrorCode::precondition,
          std::string("A contains a ") + ap_mode_name(mode) + " 3-AP");
  r.a = A.size();
  r.quotient = product(A, inverse(A)).size();
  r.square = power(A, 2).size();
  r.doubling = double(mode == ApMode::translational ? r.quotient : r.square) / double(r.a);
  r.near = abelian_struct_near(A, mode == ApMode::translational ? NearMode::translate
                                                               : NearMode::two_sided,
                               opt.near);
  if (mode == ApMode::translational) {
    r.h_order = r.near.H.order();
    r.piece = r.near.piece.size();
    r.density = (long double)r.piece / (long double)r.h_order;
    r.piece_free = r.near.piece.empty() || three_ap_check(r.near.piece, mode).free;
    if (r.h_order <= opt.exact_h)
      r.ap_free_max = max_ap_free(Gp, r.near.H.members, opt.node_budget);
  } else {
    const GroupSubset &B0 = r.near.piece;
    r.b0 = B0.size();
    r.S = corner_transfer(A, r.near.g, B0);
    r.corner = corner_check(Gp, r.S, B0);
    r.corner_density = r.b0 ? (long double)r.S.size() / ((long double)r.b0 * r.b0) : 0;
    if (r.b0 <= opt.exact_b0)
      r.corner_free_max = max_corner_free(Gp, B0.ids(), opt.node_budget);
  }
  return r;
}

} // namespace grpcomb
