#include <algorithm>
#include <functional>
#include <unordered_map>

#include "grpcomb/approx.hpp"
#include "grpcomb/error.hpp"

namespace grpcomb {

namespace {

std::vector<Id> normalize(std::vector<Id> v)
{
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void same_group(const GroupSubset &A, const GroupSubset &B)
{
  require(A.group() && A.group() == B.group(), ErrorCode::invalid_argument,
          "subsets live in different groups");
}

// inverse-pair classes of a set, minus the identity, each sorted
std::vector<std::vector<Id>> inverse_classes(const GroupSubset &A)
{
  std::vector<std::vector<Id>> out;
  const auto &G = *A.group();
  for (Id x : A.ids()) {
    if (x == 0)
      continue;
    Id y = G.inv(x);
    if (y < x && A.contains(y))
      continue;
    if (y == x || !A.contains(y))
      out.push_back({x});
    else
      out.push_back({x, y});
  }
  return out;
}

} // namespace

GroupSubset::GroupSubset(GroupPtr g, std::vector<Id> ids) : g_(std::move(g))
{
  require(g_ != nullptr, ErrorCode::invalid_argument, "subset without a group");
  ids_ = normalize(std::move(ids));
  for (Id x : ids_)
    require(x < g_->order(), ErrorCode::invalid_argument, "element id out of range");
  symmetric_ = true;
  for (Id x : ids_)
    if (!contains(g_->inv(x))) {
      symmetric_ = false;
      break;
    }
}

bool GroupSubset::contains(Id x) const
{
  return std::binary_search(ids_.begin(), ids_.end(), x);
}

bool GroupSubset::subset_of(const GroupSubset &o) const
{
  return std::includes(o.ids_.begin(), o.ids_.end(), ids_.begin(), ids_.end());
}

GroupSubset product(const GroupSubset &A, const GroupSubset &B)
{
  same_group(A, B);
  const auto &G = *A.group();
  uint64_t pairs = uint64_t(A.size()) * B.size();
  std::vector<Id> out;
  if (pairs * 8 < G.order()) {
    out.reserve(pairs);
    for (Id a : A.ids())
      for (Id b : B.ids())
        out.push_back(G.mul(a, b));
    return GroupSubset(A.group(), std::move(out));
  }
  std::vector<char> hit(G.order(), 0);
  for (Id a : A.ids())
    for (Id b : B.ids())
      hit[G.mul(a, b)] = 1;
  for (Id x = 0; x < G.order(); ++x)
    if (hit[x])
      out.push_back(x);
  return GroupSubset(A.group(), std::move(out));
}

GroupSubset power(const GroupSubset &A, int k)
{
  require(k >= 1, ErrorCode::invalid_argument, "power needs k >= 1");
  GroupSubset result, base = A;
  bool have = false;
  while (k) {
    if (k & 1) {
      result = have ? product(result, base) : base;
      have = true;
    }
    k >>= 1;
    if (k)
      base = product(base, base);
  }
  return result;
}

GroupSubset inverse(const GroupSubset &A)
{
  std::vector<Id> out;
  for (Id a : A.ids())
    out.push_back(A.group()->inv(a));
  return GroupSubset(A.group(), std::move(out));
}

GroupSubset set_union(const GroupSubset &A, const GroupSubset &B)
{
  same_group(A, B);
  std::vector<Id> out;
  std::set_union(A.ids().begin(), A.ids().end(), B.ids().begin(), B.ids().end(),
                 std::back_inserter(out));
  return GroupSubset(A.group(), std::move(out));
}

GroupSubset set_intersect(const GroupSubset &A, const GroupSubset &B)
{
  same_group(A, B);
  std::vector<Id> out;
  std::set_intersection(A.ids().begin(), A.ids().end(), B.ids().begin(), B.ids().end(),
                        std::back_inserter(out));
  return GroupSubset(A.group(), std::move(out));
}

GroupSubset intersect(const GroupSubset &A, const Subgroup &H)
{
  require(A.group() == H.parent, ErrorCode::invalid_argument, "subgroup of another group");
  std::vector<Id> out;
  std::set_intersection(A.ids().begin(), A.ids().end(), H.members.begin(), H.members.end(),
                        std::back_inserter(out));
  return GroupSubset(A.group(), std::move(out));
}

GroupSubset centered_hull(const GroupSubset &A)
{
  std::vector<Id> out = A.ids();
  for (Id a : A.ids())
    out.push_back(A.group()->inv(a));
  out.push_back(0);
  return GroupSubset(A.group(), std::move(out));
}

GroupSubset translate_left(Id g, const GroupSubset &A)
{
  std::vector<Id> out;
  for (Id a : A.ids())
    out.push_back(A.group()->mul(g, a));
  return GroupSubset(A.group(), std::move(out));
}

GroupSubset random_subset(const GroupPtr &G, size_t size, Stream &rng)
{
  size = std::min<size_t>(size, G->order());
  std::vector<Id> out;
  std::vector<char> used(G->order(), 0);
  while (out.size() < size) {
    Id x = Id(rng.below(G->order()));
    if (!used[x]) {
      used[x] = 1;
      out.push_back(x);
    }
  }
  return GroupSubset(G, std::move(out));
}

GroupSubset random_centered(const GroupPtr &G, size_t classes, Stream &rng)
{
  // number of inverse classes available
  size_t avail = 0;
  for (Id x = 1; x < G->order(); ++x)
    if (G->inv(x) >= x)
      ++avail;
  classes = std::min(classes, avail);
  std::vector<char> used(G->order(), 0);
  std::vector<Id> out{0};
  used[0] = 1;
  size_t got = 0;
  while (got < classes) {
    Id x = Id(rng.below(G->order()));
    if (used[x])
      continue;
    used[x] = used[G->inv(x)] = 1;
    out.push_back(x);
    out.push_back(G->inv(x));
    ++got;
  }
  return GroupSubset(G, std::move(out));
}

std::vector<Id> cover_witness(const GroupSubset &big, const GroupSubset &A)
{
  same_group(big, A);
  require(!A.empty(), ErrorCode::invalid_argument, "cannot cover with an empty set");
  const auto &G = *A.group();
  Id a0inv = G.inv(A.ids()[0]);
  std::vector<char> covered(G.order(), 0);
  std::vector<Id> X;
  for (Id y : big.ids()) {
    if (covered[y])
      continue;
    Id x = G.mul(y, a0inv);
    X.push_back(x);
    for (Id a : A.ids())
      covered[G.mul(x, a)] = 1;
  }
  return X;
}

TriplingStats tripling_stats(const GroupSubset &A)
{
  require(!A.empty(), ErrorCode::invalid_argument, "tripling of an empty set");
  TriplingStats s;
  GroupSubset A2 = product(A, A);
  s.a = A.size();
  s.a2 = A2.size();
  s.a3 = product(A2, A).size();
  s.aainv = product(A, inverse(A)).size();
  s.k2 = double(s.a2) / double(s.a);
  s.k3 = double(s.a3) / double(s.a);
  s.witness = cover_witness(A2, A);
  return s;
}

RuzsaReport triangle_and_cover(const GroupSubset &A, const GroupSubset &B,
                               const GroupSubset &C)
{
  same_group(A, B);
  same_group(A, C);
  require(!A.empty() && !B.empty() && !C.empty(), ErrorCode::invalid_argument,
          "Ruzsa checks need nonempty sets");
  const auto &G = *A.group();
  RuzsaReport r;
  size_t ab = product(A, B).size(), ac = product(A, C).size();
  size_t binvc = product(inverse(B), C).size();
  r.triangle = check_le("|A||B^-1C| <= |AB||AC|", BigInt(A.size()) * binvc,
                        BigInt(ab) * ac);

  // maximal family of pairwise disjoint translates yB, y in A
  std::vector<char> used(G.order(), 0);
  for (Id y : A.ids()) {
    bool clash = false;
    for (Id b : B.ids())
      if (used[G.mul(y, b)]) {
        clash = true;
        break;
      }
    if (clash)
      continue;
    r.cover.push_back(y);
    for (Id b : B.ids())
      used[G.mul(y, b)] = 1;
  }
  r.cover_size = check_le("|Y||B| <= |AB|", BigInt(r.cover.size()) * B.size(), BigInt(ab));
  GroupSubset Y(A.group(), r.cover);
  GroupSubset YBB = product(product(Y, B), inverse(B));
  r.cover_contains = A.subset_of(YBB);
  return r;
}

IntersectionReport subgroup_intersection_stats(const GroupSubset &A, const Subgroup &H, int k,
                                               const std::vector<Id> *witness)
{
  require(A.centered(), ErrorCode::precondition, "A must be centered");
  require(k >= 2, ErrorCode::invalid_argument, "k must be at least 2");
  const auto &G = *A.group();
  GroupSubset A2 = product(A, A);
  std::vector<Id> X = witness ? *witness : cover_witness(A2, A);
  require(A2.subset_of(product(GroupSubset(A.group(), X), A)), ErrorCode::precondition,
          "supplied witness does not cover A^2");
  IntersectionReport r;
  r.K = X.size();
  GroupSubset A2H = intersect(A2, H);
  GroupSubset AkH = intersect(power(A, k), H);
  r.a2h = A2H.size();
  r.akh = AkH.size();

  // every element of (A^2 n H)^2 lies in some x A with x in X^3; such a
  // translate meets H inside h (A^2 n H) for any h in x A n H
  GroupSubset X1(A.group(), X);
  GroupSubset X3 = power(X1, 3);
  std::vector<Id> wit;
  for (Id x : X3.ids()) {
    for (Id a : A.ids()) {
      Id h = G.mul(x, a);
      if (H.contains(h)) {
        wit.push_back(h);
        break;
      }
    }
  }
  GroupSubset W(A.group(), wit);
  GroupSubset sq = product(A2H, A2H);
  r.witness_covers = sq.subset_of(product(W, A2H));
  r.witness = W.ids();
  BigInt K = r.K;
  r.witness_size = check_le("|X'| <= K^3", BigInt(r.witness.size()), K * K * K);
  r.power_bound = check_le("|A^k n H| <= K^(k-1)|A^2 n H|", BigInt(r.akh),
                           big_pow(K, unsigned(k - 1)) * r.a2h);
  return r;
}

FiberReport freiman_fiber_check(const GroupSubset &A, const std::vector<Id> &phi,
                                const GroupPtr &target, const std::vector<Id> &S,
                                size_t exhaustive_limit, uint64_t seed)
{
  require(A.centered(), ErrorCode::precondition, "A must be centered");
  const auto &G = *A.group();
  const auto &T = *target;
  require(phi.size() == G.order(), ErrorCode::invalid_argument, "map must cover the group");
  for (Id v : phi)
    require(v < T.order(), ErrorCode::invalid_argument, "map value out of range");
  FiberReport r;
  GroupSubset A2 = product(A, A);
  GroupSubset A6 = power(A2, 3);
  r.K = cover_witness(A2, A).size();

  auto val3 = [&](Id x, Id y, Id z) { return T.mul(T.mul(phi[x], phi[y]), phi[z]); };
  if (phi[0] != 0) {
    r.freiman_ok = false;
    r.violation = {0, 0, 0, 0, 0, 0};
  }
  const auto &a2 = A2.ids();
  size_t m = a2.size();
  if (r.freiman_ok && m <= exhaustive_limit) {
    const Id none = ~Id(0);
    std::vector<Id> value(G.order(), none);
    std::vector<uint64_t> first(G.order(), 0);
    for (size_t i = 0; i < m && r.freiman_ok; ++i)
      for (size_t j = 0; j < m && r.freiman_ok; ++j) {
        Id xy = G.mul(a2[i], a2[j]);
        for (size_t l = 0; l < m; ++l) {
          Id p = G.mul(xy, a2[l]);
          Id v = val3(a2[i], a2[j], a2[l]);
          if (value[p] == none) {
            value[p] = v;
            first[p] = (uint64_t(i) * m + j) * m + l;
          } else if (value[p] != v) {
            uint64_t f = first[p];
            r.freiman_ok = false;
            r.violation = {a2[f / (m * m)], a2[(f / m) % m], a2[f % m], a2[i], a2[j], a2[l]};
            break;
          }
        }
      }
  } else if (r.freiman_ok) {
    r.exhaustive = false;
    Stream rng(seed, 0x66726569);
    std::unordered_map<Id, std::pair<Id, std::array<Id, 3>>> seen;
    for (int s = 0; s < 2000000 && r.freiman_ok; ++s) {
      Id x = a2[rng.below(m)], y = a2[rng.below(m)], z = a2[rng.below(m)];
      Id p = G.mul(G.mul(x, y), z);
      Id v = val3(x, y, z);
      auto [it, fresh] = seen.try_emplace(p, v, std::array<Id, 3>{x, y, z});
      if (!fresh && it->second.first != v) {
        auto &t = it->second.second;
        r.freiman_ok = false;
        r.violation = {t[0], t[1], t[2], x, y, z};
      }
    }
  }

  std::vector<char> inS(T.order(), 0);
  for (Id s : S) {
    require(s < T.order(), ErrorCode::invalid_argument, "target id out of range");
    inS[s] = 1;
  }
  std::vector<char> img(T.order(), 0);
  r.a2 = A2.size();
  r.a6 = A6.size();
  for (Id x : A2.ids()) {
    img[phi[x]] = 1;
    r.a2_in += inS[phi[x]];
  }
  for (Id x : A6.ids())
    r.a6_in += inS[phi[x]];
  for (Id t = 0; t < T.order(); ++t)
    if (img[t]) {
      ++r.image;
      r.image_in += inS[t];
    }
  BigInt K4 = big_pow(BigInt(r.K), 4);
  r.left = check_le("K^-4|A^2 n phi^-1(S)|/|A^2| <= |phi(A^2) n S|/|phi(A^2)|",
                    BigInt(r.a2_in), K4 * r.a2, BigInt(r.image_in), BigInt(r.image));
  r.right = check_le("|phi(A^2) n S|/|phi(A^2)| <= |A^6 n phi^-1(S)|/|A^2|",
                     BigInt(r.image_in), BigInt(r.image), BigInt(r.a6_in), BigInt(r.a2));
  return r;
}

namespace {

struct NiceChecker {
  GroupSubset A, Ainv;
  BigInt a, m; // |A|, |AA^-1|
  int n_max;
  uint64_t evaluations = 0;

  // all conditions on B; fills checks when asked
  bool ok(const GroupSubset &B, std::vector<Inequality> *checks)
  {
    bool good = B.centered();
    auto size_ineq = check_le("|A| <= 2K|B|", a * a, 1, 2 * m * B.size(), 1);
    good = good && size_ineq.holds;
    if (checks)
      checks->push_back(size_ineq);
    if (!good && !checks)
      return false;
    GroupSubset Bn = B;
    for (int n = 1; n <= n_max; ++n) {
      if (n > 1)
        Bn = product(Bn, B);
      ++evaluations;
      size_t lhs = product(product(A, Bn), Ainv).size();
      auto q = check_le("|AB^" + std::to_string(n) + "A^-1| <= 2^n K^(2n+1)|B|",
                        BigInt(lhs) * big_pow(a, 2 * n + 1), 1,
                        big_pow(2, n) * big_pow(m, 2 * n + 1) * B.size(), 1);
      good = good && q.holds;
      if (checks)
        checks->push_back(q);
      else if (!good)
        return false;
    }
    return good;
  }
};

CoreSearchResult nice_set_search(const GroupSubset &A, const CoreSearchOptions &opt)
{
  const auto &G = *A.group();
  NiceChecker chk{A, inverse(A), BigInt(A.size()), 0, opt.n_max};
  GroupSubset AAinv = product(A, chk.Ainv);
  chk.m = AAinv.size();
  GroupSubset AinvA = product(chk.Ainv, A);

  CoreSearchResult res;
  // popular differences: x with |A n Ax| >= |A|/(2K)
  std::vector<Id> pop;
  for (Id x : AinvA.ids()) {
    size_t hits = 0;
    for (Id y : A.ids())
      hits += A.contains(G.mul(y, x));
    if (BigInt(hits) * 2 * chk.m >= chk.a * chk.a)
      pop.push_back(x);
  }
  GroupSubset B0(A.group(), pop);
  if (chk.ok(B0, nullptr)) {
    res.set = B0;
    res.certified = true;
  } else {
    auto classes = inverse_classes(AinvA);
    GroupSubset best(A.group(), {0});
    bool found = false;
    if (classes.size() <= 16) {
      // largest qualifying union of classes, visiting masks by size
      size_t k = classes.size();
      std::vector<uint32_t> masks(size_t(1) << k);
      for (uint32_t i = 0; i < masks.size(); ++i)
        masks[i] = i;
      auto weight = [&](uint32_t mk) {
        size_t w = 0;
        for (size_t c = 0; c < k; ++c)
          if (mk >> c & 1)
            w += classes[c].size();
        return w;
      };
      std::stable_sort(masks.begin(), masks.end(),
                       [&](uint32_t x, uint32_t y) { return weight(x) > weight(y); });
      for (uint32_t mk : masks) {
        std::vector<Id> ids{0};
        for (size_t c = 0; c < k; ++c)
          if (mk >> c & 1)
            ids.insert(ids.end(), classes[c].begin(), classes[c].end());
        GroupSubset B(A.group(), ids);
        if (BigInt(B.size()) * 2 * chk.m < chk.a * chk.a)
          break; // all later masks are smaller still
        if (chk.ok(B, nullptr)) {
          best = B;
          found = true;
          break;
        }
      }
      res.exhaustive = true;
    } else {
      // grow from the identity while the conditions on powers still hold
      std::vector<Id> ids{0};
      for (auto const &c : classes) {
        if (chk.evaluations > opt.budget)
          break;
        auto trial = ids;
        trial.insert(trial.end(), c.begin(), c.end());
        GroupSubset B(A.group(), trial);
        std::vector<Inequality> tmp;
        chk.ok(B, &tmp);
        bool powers_ok = std::all_of(tmp.begin() + 1, tmp.end(),
                                     [](const Inequality &q) { return q.holds; });
        if (powers_ok)
          ids = trial;
      }
      best = GroupSubset(A.group(), ids);
      found = chk.ok(best, nullptr);
    }
    res.set = best;
    res.certified = found;
  }
  chk.ok(res.set, &res.checks);
  res.checks.insert(res.checks.begin(),
                    check_le("B inside A^-1A", BigInt(!res.set.subset_of(AinvA)), BigInt(0)));
  res.evaluations = chk.evaluations;
  return res;
}

CoreSearchResult sanders_search(const GroupSubset &A, const CoreSearchOptions &opt)
{
  require(opt.t >= 1, ErrorCode::invalid_argument, "t must be positive");
  GroupSubset Ainv = inverse(A);
  GroupSubset AinvA = product(Ainv, A);
  GroupSubset T = product(AinvA, AinvA);
  auto classes = inverse_classes(T);
  CoreSearchResult res;
  uint64_t evals = 0;
  auto fits = [&](const std::vector<Id> &ids) {
    ++evals;
    return power(GroupSubset(A.group(), ids), opt.t).subset_of(T);
  };

  std::vector<Id> best{0};
  bool complete = true;
  if (classes.size() <= 16) {
    // branch and bound; containment is inherited by subsets
    std::vector<size_t> suffix(classes.size() + 1, 0);
    for (size_t c = classes.size(); c-- > 0;)
      suffix[c] = suffix[c + 1] + classes[c].size();
    std::function<void(size_t, std::vector<Id> &)> rec = [&](size_t c, std::vector<Id> &cur) {
      if (cur.size() > best.size())
        best = cur;
      if (c == classes.size() || cur.size() + suffix[c] <= best.size())
        return;
      if (evals > opt.budget) {
        complete = false;
        return;
      }
      size_t keep = cur.size();
      cur.insert(cur.end(), classes[c].begin(), classes[c].end());
      if (fits(cur))
        rec(c + 1, cur);
      cur.resize(keep);
      rec(c + 1, cur);
    };
    std::vector<Id> cur{0};
    rec(0, cur);
    res.exhaustive = complete;
  } else {
    std::vector<Id> cur{0};
    for (auto const &c : classes) {
      if (evals > opt.budget) {
        complete = false;
        break;
      }
      auto trial = cur;
      trial.insert(trial.end(), c.begin(), c.end());
      if (fits(trial))
        cur = trial;
    }
    best = cur;
  }
  res.set = GroupSubset(A.group(), best);
  size_t st_out = power(res.set, opt.t).subset_of(T) ? 0 : 1;
  res.checks.push_back(check_le("|S^t \\ A^-1AA^-1A| <= 0", BigInt(st_out), BigInt(0)));
  res.certified = complete && st_out == 0 && res.set.centered();
  res.evaluations = evals;
  return res;
}

} // namespace

CoreSearchResult structured_core_search(const GroupSubset &A, const CoreSearchOptions &opt)
{
  require(!A.empty(), ErrorCode::invalid_argument, "core search needs a nonempty set");
  if (opt.mode == CoreMode::nice_set)
    return nice_set_search(A, opt);
  return sanders_search(A, opt);
}

} // namespace grpcomb
