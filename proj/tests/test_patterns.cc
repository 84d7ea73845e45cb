#include "doctest.h"

#include <algorithm>
#include <set>

#include "grpcomb/error.hpp"
#include "grpcomb/group.hpp"
#include "grpcomb/patterns.hpp"
#include "grpcomb/rng.hpp"

using namespace grpcomb;

namespace {

// all ordered triples
bool oracle_free(const GroupSubset &A, ApMode mode)
{
  const auto &G = *A.group();
  for (Id x : A.ids())
    for (Id y : A.ids())
      for (Id z : A.ids()) {
        if (mode == ApMode::translational) {
          Id t = G.mul(G.inv(x), y);
          if (t != 0 && G.mul(y, t) == z)
            return false;
        } else if (x != y && G.mul(x, z) == G.mul(y, y)) {
          return false;
        }
      }
  return true;
}

bool oracle_corner_free(const FiniteGroup &G, const std::set<Cell> &S, const std::vector<Id> &B)
{
  for (auto [x, y] : S)
    for (Id b : B) {
      Id d = G.mul(G.inv(x), b);
      if (d == 0)
        continue;
      if (S.count({G.mul(x, d), y}) && S.count({x, G.mul(y, d)}))
        return false;
    }
  return true;
}

GroupSubset ints(const GroupPtr &G, std::initializer_list<Id> xs) { return GroupSubset(G, std::vector<Id>(xs)); }

} // namespace

TEST_CASE("three-term progression checks")
{
  auto Z5 = build_group("cyclic:5");
  CHECK(three_ap_check(ints(Z5, {0, 1}), ApMode::translational).free);
  auto Z7 = build_group("cyclic:7");
  auto c = three_ap_check(ints(Z7, {0, 1, 2}), ApMode::translational);
  CHECK_FALSE(c.free);
  CHECK(c.witness == std::array<Id, 3>{0, 1, 2});
  CHECK_FALSE(three_ap_check(ints(Z7, {0, 1, 2}), ApMode::averaging).free);
  CHECK(three_ap_check(ints(Z7, {1, 2, 4}), ApMode::translational).free);
  CHECK(parse_ap_mode("averaging-3ap") == ApMode::averaging);
  CHECK_THROWS_AS(parse_ap_mode("corner"), Error);

  // in Z/2 every pair x, y has x + 2(y - x) = x
  auto Z2 = build_group("cyclic:2");
  CHECK(three_ap_check(ints(Z2, {0, 1}), ApMode::translational).free == oracle_free(ints(Z2, {0, 1}), ApMode::translational));
}

TEST_CASE("3-AP checks agree with the triple-loop oracle")
{
  std::vector<GroupPtr> groups;
  for (auto s : {"cyclic:15", "cyclic:16", "dihedral:7", "symmetric:4", "heisenberg:3",
                 "abelian:3,3", "dicyclic:12", "alternating:4"})
    groups.push_back(build_group(s));
  int cases = 0;
  for (uint64_t seed = 0; cases < 500; ++seed) {
    Stream rng(seed, 7, 0);
    const auto &G = groups[seed % groups.size()];
    size_t k = 1 + rng.below(std::min<uint64_t>(G->order(), 9));
    auto A = random_subset(G, k, rng);
    for (ApMode m : {ApMode::translational, ApMode::averaging}) {
      auto c = three_ap_check(A, m);
      REQUIRE(c.free == oracle_free(A, m));
      if (!c.free) {
        for (Id w : c.witness)
          CHECK(A.contains(w));
      }
    }
    ++cases;
  }
}

TEST_CASE("corner checks")
{
  auto G = build_group("abelian:5,5");
  auto B = GroupSubset::of(whole_group(G));
  Id one = 1;
  std::vector<Cell> cells{{0, 0}, {one, 0}, {0, one}};
  auto c = corner_check(G, cells, B);
  CHECK_FALSE(c.free);
  CHECK(c.d == one);
  CHECK(corner_check(G, {{0, 0}, {one, 0}}, B).free);

  auto S3 = build_group("symmetric:3");
  CHECK_THROWS_AS(corner_check(S3, {}, GroupSubset::of(whole_group(S3))), Error);

  // random cell sets against a direct scan
  auto Z9 = build_group("cyclic:9");
  auto B9 = GroupSubset::of(whole_group(Z9));
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Stream rng(seed, 11, 0);
    std::set<Cell> S;
    for (int i = 0; i < 12; ++i)
      S.emplace(Id(rng.below(9)), Id(rng.below(9)));
    std::vector<Cell> v(S.begin(), S.end());
    CHECK(corner_check(Z9, v, B9).free == oracle_corner_free(*Z9, S, B9.ids()));
  }
}

TEST_CASE("coset progressions")
{
  auto Z30 = build_group("cyclic:30");
  CosetProgression M{Z30, trivial_subgroup(Z30), {1}, {3}};
  auto r = check_progression(M);
  CHECK(r.proper);
  CHECK(r.params == 7);
  CHECK(r.members.size() == 7);

  // -3 * 5 = 15 = 3 * 5 in Z/30
  CosetProgression W{Z30, trivial_subgroup(Z30), {5}, {3}};
  auto w = check_progression(W);
  CHECK_FALSE(w.proper);
  CHECK(w.members.size() == 6);

  // properness agrees with counting distinct images
  auto G = build_group("abelian:4,6");
  for (uint64_t seed = 0; seed < 100; ++seed) {
    Stream rng(seed, 13, 0);
    auto H = seed % 3 == 0 ? closure(G, std::vector<Id>{Id(rng.below(G->order()))}) : trivial_subgroup(G);
    CosetProgression P{G, H, {Id(rng.below(24)), Id(rng.below(24))},
                       {uint32_t(rng.below(3)), uint32_t(rng.below(3))}};
    auto rep = check_progression(P);
    std::set<Id> img;
    for (int a = -int(P.bounds[0]); a <= int(P.bounds[0]); ++a)
      for (int b = -int(P.bounds[1]); b <= int(P.bounds[1]); ++b)
        for (Id h : H.members)
          img.insert(G->mul(h, G->mul(G->pow(P.gens[0], a), G->pow(P.gens[1], b))));
    CHECK(rep.proper == (img.size() == rep.params));
    CHECK(rep.members == std::vector<Id>(img.begin(), img.end()));
  }
  CHECK_THROWS_AS(check_progression(CosetProgression{Z30, trivial_subgroup(Z30), {1, 2}, {400, 400}}, 1000), Error);
}

TEST_CASE("interval sets")
{
  auto Z12 = build_group("cyclic:12");
  IntervalSet I{Z12, 5, 3, 3};
  CHECK(I.members() == std::vector<Id>{2, 8, 11});
  CHECK_FALSE(I.covers_period());
  IntervalSet J{Z12, 0, 3, 4};
  CHECK(J.covers_period());
  CHECK(J.members().size() == 4);
}

TEST_CASE("dense nice sets")
{
  SUBCASE("elementary subgroup")
  {
    auto G = build_group("abelian:5,5,5");
    auto H = closure(G, std::vector<Id>{1, 5});
    auto r = dense_nice_set(GroupSubset::of(H));
    CHECK(r.kind == NiceKind::elementary);
    CHECK(r.p == 5);
    CHECK(r.density == 1);
    CHECK(r.hits == 25);
    CHECK(r.cover == 1);
    CHECK(r.certified);
  }
  SUBCASE("block in Z/100")
  {
    auto G = build_group("cyclic:100");
    std::vector<Id> blk;
    for (Id i = 0; i < 10; ++i)
      blk.push_back(i);
    auto r = dense_nice_set(GroupSubset(G, blk));
    CHECK(r.kind == NiceKind::interval);
    CHECK(r.size == 10);
    CHECK(r.density == 1);
    CHECK(r.S == blk);
    CHECK(r.cover == 1);
    CHECK(r.certified);
    CHECK_FALSE(r.I.covers_period());
  }
  SUBCASE("subgroup plus noise in (Z/3)^3")
  {
    auto G = build_group("abelian:3,3,3");
    auto H = closure(G, std::vector<Id>{1, 3});
    std::vector<Id> ids = H.members;
    ids.push_back(9 + 1);
    ids.push_back(18 + 4);
    GroupSubset A(G, ids);
    auto r = dense_nice_set(A, NiceSetOptions{9, {}, 20000});
    CHECK(r.kind == NiceKind::elementary);
    CHECK(r.J.members == H.members);
    CHECK(r.density == 1);
    CHECK(r.capture == doctest::Approx(9.0 / 11.0));
    CHECK(r.cover == 3);
  }
  SUBCASE("reported density matches a recount")
  {
    auto G = build_group("abelian:2,10");
    for (uint64_t seed = 0; seed < 40; ++seed) {
      Stream rng(seed, 17, 0);
      auto A = random_subset(G, 2 + rng.below(10), rng);
      auto r = dense_nice_set(A);
      size_t hits = 0;
      for (Id x : r.S)
        hits += A.contains(x);
      CHECK(hits == r.hits);
      CHECK(r.S.size() == r.size);
      if (r.kind == NiceKind::elementary) {
        CHECK(r.J.order() == r.size);
        for (Id j : r.J.members)
          CHECK(G->pow(j, int64_t(r.p)) == 0);
      } else {
        CHECK(r.I.m == r.size);
        CHECK(r.I.m <= G->element_order(r.I.g2));
      }
    }
  }
  SUBCASE("fallback below threshold")
  {
    auto Z2 = build_group("cyclic:2");
    auto r = dense_nice_set(GroupSubset(Z2, {0}), NiceSetOptions{5, {}, 20000});
    CHECK_FALSE(r.certified);
    CHECK(r.hits >= 1);
  }
}

TEST_CASE("multiples in the integers")
{
  SUBCASE("full range")
  {
    std::vector<int64_t> A;
    for (int64_t i = 1; i <= 200; ++i)
      A.push_back(i);
    auto r = find_multiples_Z(A, 200, {{2, 0}}, 3, 2);
    CHECK(r.q == 2);
    CHECK(r.t.size() >= 2);
    for (int64_t t : r.t) {
      CHECK(verify_multiple_Z(A, {{2, 0}}, 2, t) == "");
      CHECK(std::abs(t) <= 199 / 8);
    }
    CHECK(r.verify_error.empty());
  }
  SUBCASE("even numbers")
  {
    std::vector<int64_t> A;
    for (int64_t i = 2; i <= 64; i += 2)
      A.push_back(i);
    auto r = find_multiples_Z(A, 64, {{2, 1}}, 3, 1);
    CHECK(r.q == 2);
    REQUIRE(r.found);
    for (int64_t t : r.t) {
      CHECK(t % 2 == 0);
      CHECK(verify_multiple_Z(A, {{2, 1}}, 2, t) == "");
    }
  }
  SUBCASE("blocks against a scan of all pairs")
  {
    for (int64_t N : {64, 128, 300, 512}) {
      for (int64_t len : {N / 2, N / 3, N / 4}) {
        std::vector<int64_t> A;
        for (int64_t i = 1; i <= len; ++i)
          A.push_back(i);
        std::map<uint64_t, int> s{{2, 1}, {3, 0}};
        auto r = find_multiples_Z(A, N, s, 5, 3);
        std::set<int64_t> valid;
        for (int64_t t = -N; t <= N; ++t)
          if (verify_multiple_Z(A, s, r.q, t).empty())
            valid.insert(t);
        for (int64_t t : r.t)
          CHECK(valid.count(t));
        CHECK(r.verify_error.empty());
        // the fiber and pair inequalities are the pigeonhole counts
        CHECK(r.fiber_bound.holds);
      }
    }
  }
  SUBCASE("preconditions")
  {
    CHECK_THROWS_AS(find_multiples_Z({1, 2}, 10, {{2, 5}}, 3, 1), Error);
    CHECK_THROWS_AS(find_multiples_Z({0, 2}, 10, {}, 3, 1), Error);
  }
  SUBCASE("single checks")
  {
    std::vector<int64_t> A{1, 2, 3, 5, 9, 17};
    CHECK(verify_multiple_Z(A, {}, 2, 1) == "");
    CHECK(verify_multiple_Z(A, {}, 2, 3) != "");
    CHECK(verify_multiple_Z(A, {{2, 1}}, 2, 1) != "");
    CHECK(verify_multiple_Z(A, {}, 2, 0) != "");
  }
}

TEST_CASE("multiples in abelian groups")
{
  SUBCASE("full elementary group")
  {
    auto G = build_group("abelian:5,5,5");
    auto r = find_multiples_general(GroupSubset::of(whole_group(G)));
    CHECK(r.branch == "elementary");
    CHECK(r.pigeonhole);
    REQUIRE(r.found);
    CHECK(verify_multiple(GroupSubset::of(whole_group(G)), 2, r.t) == "");
    CHECK(r.all.size() == 124);
  }
  SUBCASE("dense subset of a prime cyclic group")
  {
    auto G = build_group("cyclic:1009");
    std::vector<Id> ids;
    for (Id i = 0; i < 1009; ++i)
      if (i % 7 != 3 && i < 700)
        ids.push_back(i);
    GroupSubset A(G, ids);
    auto r = find_multiples_general(A);
    CHECK(r.branch == "interval");
    REQUIRE(r.found);
    for (Id t : r.all)
      CHECK(verify_multiple(A, r.q, t) == "");
  }
  SUBCASE("singleton")
  {
    auto G = build_group("cyclic:11");
    auto r = find_multiples_general(GroupSubset(G, {0}));
    CHECK_FALSE(r.found);
    CHECK(r.branch == "none");
  }
  SUBCASE("checks on single elements")
  {
    auto G = build_group("cyclic:35");
    auto A = GroupSubset::of(whole_group(G));
    CHECK(verify_multiple(A, 2, 1) == "");
    CHECK(verify_multiple(A, 2, 0) != "");
    CHECK(verify_multiple(A, 3, 1) != ""); // 2 does not divide 35
  }
}

TEST_CASE("difference set doubling check")
{
  auto Z1 = build_group("cyclic:101");
  auto a = cfpy_doubling_check(GroupSubset(Z1, {0}));
  CHECK(a.avoids);
  CHECK(a.bound.holds);
  auto b = cfpy_doubling_check(GroupSubset(Z1, {0, 1}));
  CHECK(b.avoids);
  CHECK(b.diff == 3);
  CHECK(b.bound.holds);
  auto c = cfpy_doubling_check(GroupSubset(Z1, {0, 1, 2, 4, 8}));
  CHECK_FALSE(c.avoids);

  auto G = build_group("cyclic:9973");
  Stream rng(5, 0, 0);
  auto A = grow_chain_free(G, 40, rng);
  CHECK(A.size() == 40);
  auto r = cfpy_doubling_check(A);
  CHECK(r.avoids);
  CHECK(r.bound.holds);
}

TEST_CASE("extremal pattern-free sizes")
{
  auto G = build_group("cyclic:9");
  std::vector<Id> all(9);
  for (Id i = 0; i < 9; ++i)
    all[i] = i;
  auto e = max_ap_free(G, all, 1000000);
  CHECK(e.exact);
  // brute force over all subsets
  size_t best = 0;
  for (uint32_t mask = 0; mask < 512; ++mask) {
    std::vector<Id> s;
    for (Id i = 0; i < 9; ++i)
      if (mask >> i & 1)
        s.push_back(i);
    GroupSubset A(G, s);
    if (three_ap_check(A, ApMode::translational).free)
      best = std::max(best, s.size());
  }
  CHECK(e.best == best);

  auto Z3 = build_group("cyclic:3");
  auto c = max_corner_free(Z3, {0, 1, 2}, 1000000);
  CHECK(c.exact);
  size_t cbest = 0;
  for (uint32_t mask = 0; mask < 512; ++mask) {
    std::set<Cell> S;
    for (Id i = 0; i < 9; ++i)
      if (mask >> i & 1)
        S.emplace(i / 3, i % 3);
    if (oracle_corner_free(*Z3, S, {0, 1, 2}))
      cbest = std::max(cbest, S.size());
  }
  CHECK(c.best == cbest);
}

TEST_CASE("local Roth experiment")
{
  auto Z7 = build_group("cyclic:7");
  auto r = local_roth_experiment(GroupSubset(Z7, {1, 2, 4}), ApMode::translational);
  CHECK(r.pattern.free);
  CHECK(r.quotient == 7);
  CHECK(r.piece_free);
  CHECK(r.ap_free_max.ran);

  auto one = local_roth_experiment(GroupSubset(Z7, {1}), ApMode::translational);
  CHECK(one.doubling == 1);
  CHECK_THROWS_AS(local_roth_experiment(GroupSubset(Z7, {0, 1, 2}), ApMode::translational), Error);

  auto D5 = build_group("dihedral:5");
  std::vector<Id> found;
  for (Id a = 0; a < D5->order() && found.empty(); ++a)
    for (Id b = a + 1; b < D5->order() && found.empty(); ++b)
      for (Id c = b + 1; c < D5->order() && found.empty(); ++c) {
        GroupSubset A(D5, {a, b, c});
        if (three_ap_check(A, ApMode::averaging).free)
          found = {a, b, c};
      }
  REQUIRE(found.size() == 3);
  GroupSubset A(D5, found);
  auto av = local_roth_experiment(A, ApMode::averaging);
  std::set<Cell> S(av.S.begin(), av.S.end());
  CHECK(av.corner.free);
  CHECK(oracle_corner_free(*D5, S, av.near.piece.ids()));
  for (auto [x, y] : av.S)
    CHECK(A.contains(D5->mul(D5->mul(x, av.near.g), D5->inv(y))));

  // transfer holds for every averaging-free set we grow
  for (auto spec : {"heisenberg:3", "dihedral:9", "cyclic:27", "abelian:3,9"}) {
    auto G = build_group(spec);
    for (uint64_t seed = 0; seed < 4; ++seed) {
      Stream rng(seed, 19, 0);
      auto B = grow_ap_free(G, 8, ApMode::averaging, rng);
      auto rep = local_roth_experiment(B, ApMode::averaging);
      std::set<Cell> T(rep.S.begin(), rep.S.end());
      CHECK(rep.corner.free);
      CHECK(oracle_corner_free(*G, T, rep.near.piece.ids()));
    }
  }
}
