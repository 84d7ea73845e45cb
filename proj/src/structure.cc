#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_set>

#include "grpcomb/error.hpp"
#include "grpcomb/structure.hpp"

namespace grpcomb {

namespace {

struct VecHash {
  size_t operator()(const std::vector<Id> &v) const
  {
    uint64_t h = 1469598103934665603ull;
    for (Id x : v) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return size_t(h);
  }
};

// BFS closure from `seed` members under right multiplication by gens
std::vector<Id> close_up(const FiniteGroup &G, std::vector<Id> seed,
                         std::span<const Id> gens)
{
  std::vector<char> in(G.order(), 0);
  for (Id x : seed)
    in[x] = 1;
  if (!in[0]) {
    in[0] = 1;
    seed.push_back(0);
  }
  for (size_t i = 0; i < seed.size(); ++i)
    for (Id g : gens) {
      Id y = G.mul(seed[i], g);
      if (!in[y]) {
        in[y] = 1;
        seed.push_back(y);
      }
    }
  std::sort(seed.begin(), seed.end());
  return seed;
}

int log_p(uint64_t n, uint64_t p)
{
  int r = 0;
  while (n > 1 && n % p == 0) {
    n /= p;
    ++r;
  }
  return r;
}

std::vector<Id> group_gens(const GroupPtr &G)
{
  std::vector<Id> all(G->order());
  for (Id i = 0; i < G->order(); ++i)
    all[i] = i;
  return generating_set(G, all);
}

// normal closure of seeds inside the subgroup generated by ambient_gens
Subgroup normal_closure_within(const GroupPtr &G, std::span<const Id> ambient_gens,
                               std::span<const Id> seeds)
{
  std::vector<Id> gens;
  for (Id s : seeds)
    if (s != 0)
      gens.push_back(s);
  Subgroup N = closure(G, gens);
  for (;;) {
    std::vector<Id> extra;
    for (Id y : ambient_gens)
      for (Id x : N.gens) {
        Id c = G->conj(y, x);
        if (!N.contains(c) && std::find(extra.begin(), extra.end(), c) == extra.end())
          extra.push_back(c);
        Id c2 = G->conj(G->inv(y), x);
        if (!N.contains(c2) && std::find(extra.begin(), extra.end(), c2) == extra.end())
          extra.push_back(c2);
      }
    if (extra.empty())
      return N;
    N = closure_with(N, extra);
  }
}

} // namespace

bool Subgroup::contains(Id g) const
{
  return std::binary_search(members.begin(), members.end(), g);
}

Subgroup trivial_subgroup(const GroupPtr &G) { return Subgroup{G, {0}, {}}; }

Subgroup whole_group(const GroupPtr &G)
{
  Subgroup H{G, {}, {}};
  H.members.resize(G->order());
  for (Id i = 0; i < G->order(); ++i)
    H.members[i] = i;
  H.gens = generating_set(G, H.members);
  return H;
}

Subgroup closure(const GroupPtr &G, std::span<const Id> gens)
{
  Subgroup H{G, {}, {}};
  for (Id g : gens) {
    require(g < G->order(), ErrorCode::invalid_argument, "element id out of range");
    if (g != 0 && std::find(H.gens.begin(), H.gens.end(), g) == H.gens.end())
      H.gens.push_back(g);
  }
  H.members = close_up(*G, {0}, H.gens);
  return H;
}

Subgroup closure_with(const Subgroup &H, std::span<const Id> extra)
{
  Subgroup K = H;
  bool grew = false;
  for (Id g : extra)
    if (!K.contains(g)) {
      K.gens.push_back(g);
      grew = true;
    }
  if (!grew)
    return K;
  K.members = close_up(*H.parent, H.members, K.gens);
  return K;
}

std::vector<Id> generating_set(const GroupPtr &G, const std::vector<Id> &members)
{
  std::vector<char> in(G->order(), 0);
  std::vector<Id> cur{0}, gens;
  in[0] = 1;
  for (Id m : members) {
    if (in[m])
      continue;
    gens.push_back(m);
    size_t start = 0;
    // every old element times the new generator, then saturate
    std::vector<Id> frontier = cur;
    for (size_t i = start; i < frontier.size(); ++i)
      for (Id g : gens) {
        Id y = G->mul(frontier[i], g);
        if (!in[y]) {
          in[y] = 1;
          frontier.push_back(y);
        }
      }
    cur = std::move(frontier);
  }
  return gens;
}

std::shared_ptr<const SubgroupGroup> as_group(const Subgroup &H)
{
  return std::make_shared<SubgroupGroup>(
    H.parent->spec() + "<" + std::to_string(H.order()) + ">", H.parent, H.members);
}

Subgroup lift(const Subgroup &K, const SubgroupGroup &H)
{
  Subgroup out{H.parent(), {}, {}};
  for (Id x : K.members)
    out.members.push_back(H.to_parent(x));
  for (Id x : K.gens)
    out.gens.push_back(H.to_parent(x));
  std::sort(out.members.begin(), out.members.end());
  return out;
}

bool is_subgroup_of(const Subgroup &K, const Subgroup &H)
{
  return std::includes(H.members.begin(), H.members.end(), K.members.begin(),
                       K.members.end());
}

Subgroup centralizer(const GroupPtr &G, std::span<const Id> target)
{
  return centralizer_in(whole_group(G), target);
}

Subgroup centralizer_in(const Subgroup &H, std::span<const Id> target)
{
  const GroupPtr &G = H.parent;
  std::vector<Id> t(target.begin(), target.end());
  if (t.size() > 8) {
    // centralizing a generating set is enough
    std::vector<Id> sorted = close_up(*G, {0}, t);
    t = generating_set(G, sorted);
  }
  Subgroup C{G, {}, {}};
  for (Id h : H.members) {
    bool ok = true;
    for (Id x : t)
      if (!G->commute(h, x)) {
        ok = false;
        break;
      }
    if (ok)
      C.members.push_back(h);
  }
  C.gens = generating_set(G, C.members);
  return C;
}

Subgroup center(const GroupPtr &G)
{
  auto gens = group_gens(G);
  return centralizer(G, gens);
}

std::vector<Id> conjugacy_class(const GroupPtr &G, Id a)
{
  auto gens = group_gens(G);
  std::vector<char> in(G->order(), 0);
  std::vector<Id> cls{a};
  in[a] = 1;
  for (size_t i = 0; i < cls.size(); ++i)
    for (Id g : gens) {
      Id c = G->conj(g, cls[i]);
      if (!in[c]) {
        in[c] = 1;
        cls.push_back(c);
      }
    }
  std::sort(cls.begin(), cls.end());
  return cls;
}

std::vector<std::vector<Id>> conjugacy_classes(const GroupPtr &G)
{
  auto gens = group_gens(G);
  std::vector<char> in(G->order(), 0);
  std::vector<std::vector<Id>> out;
  for (Id a = 0; a < G->order(); ++a) {
    if (in[a])
      continue;
    std::vector<Id> cls{a};
    in[a] = 1;
    for (size_t i = 0; i < cls.size(); ++i)
      for (Id g : gens) {
        Id c = G->conj(g, cls[i]);
        if (!in[c]) {
          in[c] = 1;
          cls.push_back(c);
        }
      }
    std::sort(cls.begin(), cls.end());
    out.push_back(std::move(cls));
  }
  return out;
}

bool is_normal(const GroupPtr &G, const Subgroup &N)
{
  auto gens = group_gens(G);
  auto ngens = N.gens;
  if (ngens.empty() && N.order() > 1)
    ngens = generating_set(G, N.members);
  for (Id y : gens)
    for (Id x : ngens)
      if (!N.contains(G->conj(y, x)))
        return false;
  return true;
}

Subgroup normal_closure(const GroupPtr &G, std::span<const Id> gens)
{
  auto ambient = group_gens(G);
  return normal_closure_within(G, ambient, gens);
}

Subgroup commutator_subgroup(const Subgroup &H, const Subgroup &K)
{
  const GroupPtr &G = H.parent;
  auto hg = H.gens.empty() ? generating_set(G, H.members) : H.gens;
  auto kg = K.gens.empty() ? generating_set(G, K.members) : K.gens;
  std::vector<Id> comms;
  for (Id x : hg)
    for (Id y : kg) {
      Id c = G->commutator(x, y);
      if (c != 0)
        comms.push_back(c);
    }
  std::vector<Id> ambient = hg;
  ambient.insert(ambient.end(), kg.begin(), kg.end());
  return normal_closure_within(G, ambient, comms);
}

const char *series_name(SeriesKind k)
{
  switch (k) {
  case SeriesKind::derived: return "derived";
  case SeriesKind::chief: return "chief";
  case SeriesKind::lower_central: return "lower-central";
  case SeriesKind::custom: return "custom";
  }
  return "?";
}

namespace {

void fill_factors(NormalSeries &s)
{
  s.factor_orders.clear();
  s.factor_abelian.clear();
  for (size_t i = 0; i + 1 < s.chain.size(); ++i) {
    s.factor_orders.push_back(s.chain[i].order() / s.chain[i + 1].order());
    Subgroup c = commutator_subgroup(s.chain[i], s.chain[i]);
    s.factor_abelian.push_back(is_subgroup_of(c, s.chain[i + 1]));
  }
  s.reaches_trivial = s.chain.back().order() == 1;
}

// a minimal normal subgroup of Q (nontrivial Q)
Subgroup minimal_normal(const GroupPtr &Q)
{
  auto classes = conjugacy_classes(Q);
  auto gens = group_gens(Q);
  Id first = classes.size() > 1 ? classes[1][0] : 0;
  Subgroup M = normal_closure_within(Q, gens, std::span<const Id>(&first, 1));
  bool shrunk = true;
  while (shrunk) {
    shrunk = false;
    for (size_t c = 1; c < classes.size(); ++c) {
      Id y = classes[c][0];
      if (!M.contains(y))
        continue;
      Subgroup C = normal_closure_within(Q, gens, std::span<const Id>(&y, 1));
      if (C.order() < M.order()) {
        M = std::move(C);
        shrunk = true;
        break;
      }
    }
  }
  return M;
}

} // namespace

NormalSeries series(const GroupPtr &G, SeriesKind kind, uint64_t chief_cap)
{
  NormalSeries s;
  s.kind = kind;
  Subgroup whole = whole_group(G);
  s.chain.push_back(whole);
  if (kind == SeriesKind::derived || kind == SeriesKind::lower_central) {
    for (;;) {
      const Subgroup &cur = s.chain.back();
      Subgroup next = kind == SeriesKind::derived ? commutator_subgroup(cur, cur)
                                                  : commutator_subgroup(cur, whole);
      if (next.order() == cur.order())
        break;
      s.chain.push_back(std::move(next));
      if (s.chain.back().order() == 1)
        break;
    }
  } else if (kind == SeriesKind::chief) {
    require(G->order() <= chief_cap, ErrorCode::cap_exceeded,
            "chief series needs order <= " + std::to_string(chief_cap));
    std::vector<Subgroup> up{trivial_subgroup(G)};
    while (up.back().order() < G->order()) {
      QuotientMap q = quotient(G, up.back());
      Subgroup M = minimal_normal(q.quotient);
      up.push_back(preimage(q, M));
    }
    s.chain.assign(up.rbegin(), up.rend());
    s.chain[0] = whole;
  } else {
    fail(ErrorCode::invalid_argument, "custom series must be supplied explicitly");
  }
  fill_factors(s);
  return s;
}

bool is_solvable(const GroupPtr &G)
{
  return series(G, SeriesKind::derived).reaches_trivial;
}

bool verify_chief(const GroupPtr &G, const NormalSeries &s)
{
  auto gens = group_gens(G);
  auto classes = conjugacy_classes(G);
  for (size_t i = 0; i + 1 < s.chain.size(); ++i) {
    const Subgroup &hi = s.chain[i], &lo = s.chain[i + 1];
    if (!is_normal(G, hi) || !is_subgroup_of(lo, hi) || lo.order() == hi.order())
      return false;
    auto lo_gens = lo.gens.empty() ? generating_set(G, lo.members) : lo.gens;
    for (auto const &cls : classes) {
      Id y = cls[0];
      if (!hi.contains(y) || lo.contains(y))
        continue;
      std::vector<Id> seeds = lo_gens;
      seeds.push_back(y);
      if (normal_closure_within(G, gens, seeds).order() != hi.order())
        return false;
    }
  }
  return s.chain.back().order() == 1;
}

QuotientMap quotient(const GroupPtr &G, const Subgroup &N)
{
  require(is_normal(G, N), ErrorCode::not_normal, "subgroup is not normal");
  QuotientMap q;
  q.source = G;
  q.normal = N;
  Id none = G->order();
  q.projection.assign(G->order(), none);
  for (Id g = 0; g < G->order(); ++g) {
    if (q.projection[g] != none)
      continue;
    Id c = Id(q.reps.size());
    q.reps.push_back(g);
    for (Id n : N.members)
      q.projection[G->mul(g, n)] = c;
  }
  q.quotient = std::make_shared<QuotientGroup>(
    G->spec() + "/" + std::to_string(N.order()), G, q.reps, q.projection);
  return q;
}

Subgroup preimage(const QuotientMap &q, const Subgroup &K)
{
  Subgroup out{q.source, {}, {}};
  for (Id g = 0; g < q.source->order(); ++g)
    if (K.contains(q.projection[g]))
      out.members.push_back(g);
  out.gens = generating_set(q.source, out.members);
  return out;
}

std::vector<Subgroup> normal_subgroups(const GroupPtr &G, size_t cap)
{
  auto classes = conjugacy_classes(G);
  auto gens = group_gens(G);
  std::vector<Subgroup> principal;
  std::unordered_set<std::vector<Id>, VecHash> seen;
  for (size_t c = 1; c < classes.size(); ++c) {
    Id y = classes[c][0];
    Subgroup N = normal_closure_within(G, gens, std::span<const Id>(&y, 1));
    if (seen.insert(N.members).second)
      principal.push_back(std::move(N));
  }
  std::vector<Subgroup> all{trivial_subgroup(G)};
  seen.clear();
  seen.insert(all[0].members);
  for (auto &N : principal)
    if (seen.insert(N.members).second)
      all.push_back(N);
  for (size_t i = 1; i < all.size(); ++i)
    for (auto const &P : principal) {
      if (is_subgroup_of(P, all[i]))
        continue;
      Subgroup J = closure_with(all[i], P.gens);
      if (seen.insert(J.members).second) {
        require(all.size() < cap, ErrorCode::cap_exceeded, "too many normal subgroups");
        all.push_back(std::move(J));
      }
    }
  std::sort(all.begin(), all.end(), [](const Subgroup &a, const Subgroup &b) {
    if (a.order() != b.order())
      return a.order() < b.order();
    return a.members < b.members;
  });
  return all;
}

bool is_p_group(uint64_t order, uint64_t p)
{
  while (order > 1 && order % p == 0)
    order /= p;
  return order == 1;
}

Subgroup sylow(const GroupPtr &G, uint64_t p)
{
  require(is_prime(p), ErrorCode::invalid_argument, "p must be prime");
  uint64_t target = 1, n = G->order();
  while (n % p == 0) {
    n /= p;
    target *= p;
  }
  const auto &ord = G->orders();
  Subgroup P = trivial_subgroup(G);
  while (P.order() < target) {
    bool grown = false;
    for (Id g = 1; g < G->order() && !grown; ++g) {
      if (P.contains(g) || !is_p_group(ord[g], p))
        continue;
      bool normalizes = true;
      for (Id x : P.gens)
        if (!P.contains(G->conj(g, x))) {
          normalizes = false;
          break;
        }
      if (!normalizes)
        continue;
      P = closure_with(P, std::span<const Id>(&g, 1));
      grown = true;
    }
    require(grown, ErrorCode::internal, "Sylow growth stalled");
  }
  return P;
}

namespace {

// largest rank of an elementary abelian p-subgroup, by branch and bound
int max_elementary_rank(const GroupPtr &G, uint64_t p)
{
  const auto &ord = G->orders();
  std::vector<Id> order_p;
  for (Id x = 1; x < G->order(); ++x)
    if (ord[x] == p)
      order_p.push_back(x);
  if (order_p.empty())
    return 0;
  if (G->is_abelian()) {
    return log_p(order_p.size() + 1, p);
  }
  // start from the central elements of order p (contained in every maximal one)
  Subgroup Z = center(G);
  std::vector<Id> zgens;
  for (Id z : Z.members)
    if (ord[z] == p)
      zgens.push_back(z);
  Subgroup E0 = closure(G, zgens);
  int rank0 = log_p(E0.order(), p);

  int best = rank0;
  std::function<void(const std::vector<Id> &, int, std::vector<Id>)> rec =
    [&](const std::vector<Id> &E, int rk, std::vector<Id> cand) {
      best = std::max(best, rk);
      while (!cand.empty()) {
        double bound = std::log(double(E.size() + cand.size())) / std::log(double(p));
        if (int(std::floor(bound + 1e-9)) <= best)
          return;
        Id x = cand.front();
        cand.erase(cand.begin());
        // <E, x>
        std::vector<Id> E2;
        E2.reserve(E.size() * p);
        Id xp = 0;
        for (uint64_t j = 0; j < p; ++j) {
          for (Id e : E)
            E2.push_back(G->mul(e, xp));
          xp = G->mul(xp, x);
        }
        std::sort(E2.begin(), E2.end());
        std::vector<Id> inc;
        for (Id c : cand)
          if (G->commute(c, x) && !std::binary_search(E2.begin(), E2.end(), c))
            inc.push_back(c);
        rec(E2, rk + 1, std::move(inc));
        // exclude x together with every element that would force it
        std::vector<Id> rest;
        for (Id c : cand)
          if (!std::binary_search(E2.begin(), E2.end(), c))
            rest.push_back(c);
        cand = std::move(rest);
      }
    };
  std::vector<Id> cand;
  for (Id x : order_p)
    if (!E0.contains(x))
      cand.push_back(x);
  rec(E0.members, rank0, cand);
  return best;
}

// all subgroups of G (BFS by adjoining coset representatives)
std::vector<Subgroup> all_subgroups(const GroupPtr &G, size_t cap)
{
  std::unordered_set<std::vector<Id>, VecHash> seen;
  std::vector<Subgroup> out{trivial_subgroup(G)};
  seen.insert(out[0].members);
  for (size_t i = 0; i < out.size(); ++i) {
    std::vector<char> covered(G->order(), 0);
    for (Id h : out[i].members)
      covered[h] = 1;
    for (Id x = 1; x < G->order(); ++x) {
      if (covered[x])
        continue;
      for (Id h : out[i].members)
        covered[G->mul(x, h)] = 1;
      Subgroup J = closure_with(out[i], std::span<const Id>(&x, 1));
      if (seen.insert(J.members).second) {
        require(out.size() < cap, ErrorCode::cap_exceeded, "too many subgroups");
        out.push_back(std::move(J));
      }
    }
  }
  return out;
}

int quotient_rank(const GroupPtr &G, const Subgroup &H, uint64_t p)
{
  auto gens = H.gens.empty() ? generating_set(G, H.members) : H.gens;
  std::vector<Id> seeds;
  for (Id s : gens) {
    seeds.push_back(G->pow(s, int64_t(p)));
    for (Id t : gens)
      seeds.push_back(G->commutator(s, t));
  }
  Subgroup Phi = normal_closure_within(G, gens, seeds);
  return log_p(H.order() / Phi.order(), p);
}

int direct_sectional_rank(const GroupPtr &G, uint64_t p, size_t cap)
{
  if (G->is_abelian())
    return max_elementary_rank(G, p);
  int best = 0;
  for (auto const &H : all_subgroups(G, cap))
    best = std::max(best, quotient_rank(G, H, p));
  return best;
}

} // namespace

int frattini_rank(const GroupPtr &P, uint64_t p)
{
  return quotient_rank(P, whole_group(P), p);
}

int subgroup_p_rank(const GroupPtr &G, uint64_t p)
{
  return max_elementary_rank(as_group(sylow(G, p)), p);
}

int sectional_p_rank(const GroupPtr &G, uint64_t p, uint64_t cap)
{
  Subgroup P = sylow(G, p);
  require(P.order() <= cap, ErrorCode::cap_exceeded,
          "Sylow subgroup too large for subquotient enumeration");
  return direct_sectional_rank(as_group(P), p, 200000);
}

PRanks p_ranks(const GroupPtr &G, uint64_t p, uint64_t cap)
{
  return PRanks{subgroup_p_rank(G, p), sectional_p_rank(G, p, cap)};
}

std::string check_sectional_subadditive(const GroupPtr &G, uint64_t p)
{
  int sg = sectional_p_rank(G, p);
  for (auto const &N : normal_subgroups(G)) {
    int sn = sectional_p_rank(as_group(N), p);
    int sq = sectional_p_rank(quotient(G, N).quotient, p);
    if (sg > sn + sq)
      return G->spec() + ": s_p(G)=" + std::to_string(sg) + " > " + std::to_string(sn) +
             "+" + std::to_string(sq) + " for |N|=" + std::to_string(N.order());
  }
  return {};
}

std::string check_sylow_reduction(const GroupPtr &G, uint64_t p)
{
  // whole-group values computed without passing to a Sylow subgroup
  int r_direct = max_elementary_rank(G, p);
  int s_direct = direct_sectional_rank(G, p, 200000);
  auto P = as_group(sylow(G, p));
  int r_syl = max_elementary_rank(P, p);
  int s_syl = direct_sectional_rank(P, p, 200000);
  if (r_direct != r_syl || s_direct != s_syl)
    return G->spec() + ": ranks differ from Sylow (r " + std::to_string(r_direct) + " vs " +
           std::to_string(r_syl) + ", s " + std::to_string(s_direct) + " vs " +
           std::to_string(s_syl) + ")";
  return {};
}

std::string check_rank_square_bound(const GroupPtr &G, uint64_t p)
{
  auto pr = p_ranks(G, p);
  if (pr.s > 2 * pr.r * pr.r)
    return G->spec() + ": s_p=" + std::to_string(pr.s) + " > 2 r_p^2 with r_p=" +
           std::to_string(pr.r);
  return {};
}

} // namespace grpcomb
