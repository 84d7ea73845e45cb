#include "doctest.h"

#include <set>

#include "grpcomb/approx.hpp"
#include "grpcomb/error.hpp"

using namespace grpcomb;

namespace {

std::set<Id> naive_product(const GroupSubset &A, const GroupSubset &B)
{
  std::set<Id> s;
  for (Id a : A.ids())
    for (Id b : B.ids())
      s.insert(A.group()->mul(a, b));
  return s;
}

GroupSubset ints(const GroupPtr &Zn, std::initializer_list<int> xs)
{
  std::vector<Id> v;
  int n = int(Zn->order());
  for (int x : xs)
    v.push_back(Id(((x % n) + n) % n));
  return GroupSubset(Zn, v);
}

} // namespace

TEST_CASE("product sets")
{
  auto Z = build_group("cyclic:100");
  auto A = ints(Z, {0, 1, -1});
  auto A3 = power(A, 3);
  CHECK(A3.size() == 7);
  CHECK(A3 == ints(Z, {-3, -2, -1, 0, 1, 2, 3}));
  auto one = ints(Z, {0});
  auto B = ints(Z, {5, 17, 40});
  CHECK(product(one, B) == B);

  auto S4 = build_group("symmetric:4");
  auto H = GroupSubset::of(sylow(S4, 2));
  for (int k = 1; k <= 5; ++k)
    CHECK(power(H, k) == H);

  Stream rng(11, 1);
  const char *specs[] = {"cyclic:200", "dihedral:10", "symmetric:4", "gl:2:3",
                         "product:symmetric:3+cyclic:5"};
  for (int trial = 0; trial < 500; ++trial) {
    auto G = build_group(specs[trial % 5]);
    auto X = random_subset(G, 1 + rng.below(12), rng);
    auto Y = random_subset(G, 1 + rng.below(12), rng);
    auto P = product(X, Y);
    auto ref = naive_product(X, Y);
    REQUIRE(std::vector<Id>(ref.begin(), ref.end()) == P.ids());
  }
}

TEST_CASE("centered monotonicity and tripling")
{
  Stream rng(5, 2);
  auto G = build_group("dihedral:12");
  for (int t = 0; t < 50; ++t) {
    auto A = random_centered(G, 1 + rng.below(5), rng);
    REQUIRE(A.centered());
    auto A2 = power(A, 2), A3 = power(A, 3);
    CHECK(A.subset_of(A2));
    CHECK(A2.subset_of(A3));
    auto st = tripling_stats(A);
    CHECK(A2.subset_of(product(GroupSubset(G, st.witness), A)));
    CHECK(st.witness.size() * st.a >= st.a2);
    CHECK(st.k2 <= st.k3);
  }
  auto Z = build_group("cyclic:100");
  auto st = tripling_stats(ints(Z, {0, 1, -1}));
  CHECK(st.a == 3);
  CHECK(st.a2 == 5);
  CHECK(st.k2 == doctest::Approx(5.0 / 3));
  auto Hs = GroupSubset::of(closure(build_group("abelian:5,5"), std::vector<Id>{6}));
  auto sh = tripling_stats(Hs);
  CHECK(sh.k2 == 1.0);
  CHECK(sh.k3 == 1.0);
  CHECK(sh.witness.size() == 1);
}

TEST_CASE("Ruzsa triangle and covering")
{
  auto S4 = build_group("symmetric:4");
  auto H = GroupSubset::of(sylow(S4, 2));
  auto r = triangle_and_cover(H, H, H);
  CHECK(r.triangle.holds);
  CHECK(r.triangle.lhs == r.triangle.rhs);
  CHECK(r.cover == std::vector<Id>{0});
  Stream rng(3, 3);
  for (int t = 0; t < 200; ++t) {
    auto A = random_subset(S4, 8, rng), B = random_subset(S4, 8, rng),
         C = random_subset(S4, 8, rng);
    auto q = triangle_and_cover(A, B, C);
    CHECK(q.triangle.holds);
    CHECK(q.cover_size.holds);
    CHECK(q.cover_contains);
  }
  auto Z = build_group("cyclic:20");
  auto P = ints(Z, {2, 5, 8, 11});
  auto q = triangle_and_cover(P, P, P);
  CHECK(q.cover.size() * P.size() <= product(P, P).size());
}

TEST_CASE("subgroup intersections")
{
  auto D6 = build_group("dihedral:6");
  auto whole = GroupSubset::of(whole_group(D6));
  Id rot = 0;
  for (Id x = 0; x < D6->order(); ++x)
    if (D6->element_order(x) == 6)
      rot = x;
  Subgroup R = closure(D6, std::vector<Id>{rot});
  auto r = subgroup_intersection_stats(whole, R, 3);
  CHECK(r.K == 1);
  CHECK(r.a2h == 6);
  CHECK(r.holds());

  Stream rng(9, 9);
  for (int t = 0; t < 30; ++t) {
    auto A = random_centered(D6, 4 + rng.below(2), rng); // 9 or 11 elements
    auto q = subgroup_intersection_stats(A, R, 4);
    CHECK(q.holds());
    auto triv = subgroup_intersection_stats(A, trivial_subgroup(D6), 4);
    CHECK(triv.akh == 1);
    CHECK(triv.holds());
  }
  auto bad = GroupSubset(D6, {rot});
  CHECK_THROWS_AS(subgroup_intersection_stats(bad, R, 2), Error);
}

TEST_CASE("Freiman fibres")
{
  auto Z12 = build_group("cyclic:12");
  auto Z4 = build_group("cyclic:4");
  std::vector<Id> proj(12);
  for (Id x = 0; x < 12; ++x)
    proj[x] = x % 4;
  auto A = ints(Z12, {0, 1, -1, 5, -5});
  auto r = freiman_fiber_check(A, proj, Z4, {0});
  CHECK(r.freiman_ok);
  CHECK(r.exhaustive);
  CHECK(r.holds());
  auto full = freiman_fiber_check(A, proj, Z4, {0, 1, 2, 3});
  CHECK(full.image_in == full.image);
  CHECK(full.holds());

  // identity map
  std::vector<Id> id(12);
  for (Id x = 0; x < 12; ++x)
    id[x] = x;
  CHECK(freiman_fiber_check(A, id, Z12, {3, 4}).holds());

  // a map that is not Freiman: squares-ish relabeling
  std::vector<Id> bad(12, 1);
  bad[0] = 0;
  auto rb = freiman_fiber_check(A, bad, Z4, {0});
  CHECK_FALSE(rb.freiman_ok);
  auto &v = rb.violation;
  CHECK(Z12->mul(Z12->mul(v[0], v[1]), v[2]) == Z12->mul(Z12->mul(v[3], v[4]), v[5]));
}

TEST_CASE("structured core search")
{
  auto G = build_group("dihedral:6");
  auto H = GroupSubset::of(sylow(G, 3));
  CoreSearchOptions nice;
  auto r = structured_core_search(H, nice);
  CHECK(r.certified);
  CHECK(r.set == H);
  CoreSearchOptions core;
  core.mode = CoreMode::sanders_core;
  core.t = 4;
  auto s = structured_core_search(H, core);
  CHECK(s.certified);
  CHECK(s.set == H);

  auto Z = build_group("cyclic:101");
  auto A = ints(Z, {0, 1, -1});
  core.t = 3;
  auto s2 = structured_core_search(A, core);
  CHECK(s2.certified);
  CHECK(s2.set.size() >= 3);
  auto T = power(product(inverse(A), A), 2);
  CHECK(power(s2.set, 3).subset_of(T));
  CHECK(power(A, 3).subset_of(T)); // {0, +-1} itself qualifies

  // non-symmetric coset of a subgroup
  auto Z15 = build_group("cyclic:15");
  auto coset = ints(Z15, {1, 4, 7, 10, 13});
  auto sub = ints(Z15, {0, 3, 6, 9, 12});
  auto rc = structured_core_search(coset, nice);
  CHECK(rc.certified);
  CHECK(rc.set.subset_of(sub));

  Stream rng(4, 4);
  for (int t = 0; t < 20; ++t) {
    auto B = random_subset(build_group("symmetric:4"), 6, rng);
    auto q = structured_core_search(B, nice);
    for (auto &c : q.checks)
      if (q.certified)
        CHECK(c.holds);
  }
}
