#include "doctest.h"

#include <cmath>

#include "grpcomb/error.hpp"
#include "grpcomb/extract.hpp"

using namespace grpcomb;

namespace {

GroupSubset all_of(const GroupPtr &G)
{
  std::vector<Id> ids(G->order());
  for (Id i = 0; i < G->order(); ++i)
    ids[i] = i;
  return GroupSubset(G, ids);
}

GroupSubset identity_only(const GroupPtr &G) { return GroupSubset(G, {0}); }

// size of the span by brute enumeration of sign patterns
size_t brute_span_size(const GroupPtr &G, const std::vector<Id> &D)
{
  size_t m = D.size(), total = 1;
  for (size_t i = 0; i < m; ++i)
    total *= 3;
  std::vector<char> seen(G->order(), 0);
  size_t count = 0;
  for (size_t code = 0; code < total; ++code) {
    size_t c = code;
    Id v = 0;
    for (size_t i = 0; i < m; ++i, c /= 3)
      v = G->mul(v, G->pow(D[i], int64_t(c % 3) - 1));
    if (!seen[v]) {
      seen[v] = 1;
      ++count;
    }
  }
  return count;
}

} // namespace

TEST_CASE("dissociated span examples")
{
  auto Z7 = build_group("cyclic:7");
  CHECK(dissociated_span({Z7, {1}, true}).size() == 3);

  auto V = build_group("abelian:5,5");
  Id e1 = 1, e2 = 0;
  auto line = closure(V, std::vector<Id>{e1}).members;
  for (Id x = 1; x < V->order(); ++x)
    if (!std::binary_search(line.begin(), line.end(), x)) {
      e2 = x;
      break;
    }
  std::vector<Id> D{e1, e2};
  CHECK(dissociated_span({V, D, true}).size() == 9);
  CHECK(check_dissociated(V, D).dissociated);
  CHECK(check_dissociated(V, D).products == 9);

  // {2,3} in Z/6: the span collapses to 6 elements although no signed
  // product of distinct members is trivial
  auto Z6 = build_group("cyclic:6");
  std::vector<Id> D6{2, 3};
  auto span = dissociated_span({Z6, D6, true});
  CHECK(span.size() == brute_span_size(Z6, D6));
  CHECK(span.size() == 6);
  CHECK(check_dissociated(Z6, D6).dissociated);

  // an element with its inverse is a relation
  auto rel = check_dissociated(Z7, {3, 4});
  CHECK_FALSE(rel.dissociated);
  CHECK(rel.relation == std::vector<int>{1, 1});

  auto S3 = build_group("symmetric:3");
  std::vector<Id> nc;
  for (Id x = 1; x < S3->order() && nc.size() < 2; ++x)
    if (nc.empty() || !S3->commute(nc[0], x))
      nc.push_back(x);
  CHECK_THROWS_AS(dissociated_span({S3, nc, false}), Error);
  CHECK_FALSE(check_dissociated(S3, nc).commuting);
}

TEST_CASE("span agrees with brute enumeration")
{
  Stream rng(11, 0, 0);
  auto G = build_group("abelian:3,9,4");
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Id> D;
    size_t m = 1 + rng.below(5);
    for (size_t i = 0; i < m; ++i)
      D.push_back(Id(rng.below(G->order())));
    CHECK(dissociated_span({G, D, true}).size() == brute_span_size(G, D));
  }
}

TEST_CASE("pivot split")
{
  auto S4 = build_group("symmetric:4");
  Stream rng(5, 1, 0);
  for (int trial = 0; trial < 50; ++trial) {
    GroupSubset A = random_subset(S4, 8, rng);
    Id a = A.ids()[rng.below(A.size())];
    auto rep = pivot_split(A, a);
    CHECK(rep.bound.holds);
    // independent recount
    GroupSubset A2 = power(A, 2), A3 = power(A, 3);
    auto cls = conjugacy_class(S4, a);
    size_t c = 0, k = 0;
    for (Id x : A2.ids())
      c += S4->commute(x, a);
    for (Id x : A3.ids())
      k += std::find(cls.begin(), cls.end(), x) != cls.end();
    CHECK(rep.centralized.size() == c);
    CHECK(rep.conjugates.size() == k);
  }
  auto Z = build_group("cyclic:20");
  GroupSubset A(Z, {0, 3, 7});
  auto rep = pivot_split(A, 3);
  CHECK(rep.centralized.size() == power(A, 2).size());
  CHECK(rep.conjugates.size() == 1);
  CHECK_THROWS_AS(pivot_split(A, 5), Error);
}

TEST_CASE("abelian extraction on elementary abelian groups")
{
  for (int m = 1; m <= 4; ++m) {
    std::string spec = "abelian:5";
    for (int i = 1; i < m; ++i)
      spec += ",5";
    auto G = build_group(spec);
    ExtractContext ctx{G, whole_group(G), trivial_subgroup(G)};
    GroupSubset A = all_of(G);
    auto res = commutable_extract(ctx, A, identity_only(G), *abelian_extractor());
    // maximality forces 3^|D| >= 5^m; ascending greedy lands on 2m
    CHECK(double(res.D.elems.size()) >= m * std::log(5.0) / std::log(3.0));
    CHECK(res.D.elems.size() == size_t(2 * m));
    CHECK(res.trace.K == 1);
    CHECK(res.trace.bound.holds);
    CHECK(res.trace.hard);
    CHECK(verify_extraction(ctx, A, identity_only(G), res.D.elems).empty());
    bool checked = false;
    CHECK(check_extraction_maximal(ctx, A, identity_only(G), res.D.elems, &checked, 700).empty());
    CHECK(checked);
    // K = 1 and S = {1}, so the floor is sqrt(log_3(5^m) / 3) - 1
    double expected = std::sqrt(m * std::log(5.0) / std::log(3.0) / 3) - 1;
    CHECK(double(res.trace.claimed) == doctest::Approx(expected));
  }
}

TEST_CASE("trivial approximate group gives empty D")
{
  auto G = build_group("symmetric:4");
  ExtractContext ctx{G, whole_group(G), whole_group(G)};
  GroupSubset one = identity_only(G);
  auto res = commutable_extract(ctx, one, one, *abelian_extractor());
  CHECK(res.D.elems.empty());
  CHECK(res.trace.bound.holds);
}

TEST_CASE("heisenberg extraction over the center")
{
  auto G = build_group("heisenberg:3");
  Subgroup Z = center(G);
  REQUIRE(Z.order() == 3);
  ExtractContext ctx{G, whole_group(G), Z};
  GroupSubset A = all_of(G);
  GroupSubset S = intersect(power(A, 4), Z);
  auto res = commutable_extract(ctx, A, S, *abelian_extractor());
  CHECK_FALSE(res.D.elems.empty());
  CHECK(verify_extraction(ctx, A, S, res.D.elems).empty());
  CHECK(check_extraction_maximal(ctx, A, S, res.D.elems).empty());
  CHECK(res.trace.bound.holds);

  // series strategy over the derived series reaches the same guarantees
  ExtractContext full{G, whole_group(G), trivial_subgroup(G)};
  auto ser = commutable_extract(full, A, identity_only(G), *series_extractor(abelian_extractor()));
  CHECK(verify_extraction(full, A, identity_only(G), ser.D.elems).empty());
  CHECK(ser.trace.bound.holds);
  CHECK(ser.params.R == 3);
  CHECK(ser.params.beta == doctest::Approx(0.1));
  for (size_t i = 1; i < ser.trace.steps.size(); ++i)
    CHECK(ser.trace.steps[i].d_size > ser.trace.steps[i - 1].d_size);
}

TEST_CASE("extraction preconditions")
{
  auto G = build_group("symmetric:3");
  GroupSubset A = all_of(G);
  ExtractContext ctx{G, whole_group(G), trivial_subgroup(G)};
  // S3 is not abelian over the trivial subgroup
  CHECK_THROWS_AS(commutable_extract(ctx, A, identity_only(G), *abelian_extractor()), Error);
  // S must centralize G
  GroupSubset S(G, {0, 1, G->inv(1)});
  CHECK_THROWS_AS(commutable_extract(ctx, A, S, *series_extractor(abelian_extractor())), Error);
  // A must be centered
  CHECK_THROWS_AS(commutable_extract(ctx, GroupSubset(G, {1}), identity_only(G),
                                     *series_extractor(abelian_extractor())),
                  Error);
}

TEST_CASE("strategy parameters")
{
  auto ab = abelian_extractor();
  CHECK(ab->params().R == 2);
  CHECK(ab->params().beta == doctest::Approx(1.0 / 3));
  auto ser = series_extractor(series_extractor(ab));
  CHECK(ser->params().R == 4);
  CHECK(ser->params().beta == doctest::Approx(0.1));
  auto sub = subgroup_extractor(ab, 2, 0.5);
  CHECK(sub->params().beta == doctest::Approx((1.0 / 3) * 0.5 / 18));
  CHECK(sub->params().strategy == Strategy::subgroup);
  CHECK_FALSE(sub->hard_bound());
}

TEST_CASE("extraction in a nonsolvable group")
{
  auto G = build_group("alternating:5");
  Subgroup W = whole_group(G);
  auto ex = default_extractor(W);
  CHECK(ex->params().strategy == Strategy::series);
  GroupSubset A = all_of(G);
  ExtractContext ctx{G, W, trivial_subgroup(G)};
  auto res = commutable_extract(ctx, A, identity_only(G), *ex);
  CHECK_FALSE(res.D.elems.empty());
  CHECK(verify_extraction(ctx, A, identity_only(G), res.D.elems).empty());
}

TEST_CASE("random approximate groups keep the extraction invariants")
{
  Stream rng(21, 2, 0);
  const char *specs[] = {"dihedral:8", "heisenberg:3", "symmetric:4", "dicyclic:12", "abelian:2,4,3"};
  for (int trial = 0; trial < 25; ++trial) {
    auto G = build_group(specs[trial % 5]);
    GroupSubset A = random_centered(G, 2 + rng.below(3), rng);
    Subgroup W = whole_group(G);
    ExtractContext ctx{G, W, trivial_subgroup(G)};
    auto ex = default_extractor(W);
    auto res = commutable_extract(ctx, A, identity_only(G), *ex);
    CHECK(verify_extraction(ctx, A, identity_only(G), res.D.elems).empty());
    if (res.trace.hard)
      CHECK(res.trace.bound.holds);
    if (ex->params().strategy == Strategy::abelian)
      CHECK(check_extraction_maximal(ctx, A, identity_only(G), res.D.elems).empty());
  }
}

TEST_CASE("pyber abelian subgroups")
{
  auto S3 = build_group("symmetric:3");
  auto r = pyber_solvable_abelian(S3);
  CHECK(r.I.order() == 3);
  CHECK(r.bound.holds);
  CHECK(r.abelian_verified);

  auto D4 = build_group("dihedral:4");
  auto d = pyber_solvable_abelian(D4);
  CHECK(d.I.order() >= 4);
  CHECK(d.abelian_verified);

  auto Z = build_group("abelian:4,6");
  CHECK(pyber_solvable_abelian(Z).I.order() == 24);

  for (const char *spec : {"symmetric:4", "heisenberg:5", "borel:3:3", "dicyclic:20"}) {
    auto G = build_group(spec);
    auto res = pyber_solvable_abelian(G);
    CHECK(res.abelian_verified);
    CHECK(res.bound.holds);
    // I is self-centralizing at the end
    CHECK(centralizer(G, res.I.gens).order() == res.I.order());
  }
  CHECK_THROWS_AS(pyber_solvable_abelian(build_group("alternating:5")), Error);
}

TEST_CASE("abelian substructure")
{
  auto G = build_group("cyclic:12");
  Subgroup H = closure(G, std::vector<Id>{3});
  auto res = abelian_substruct(GroupSubset::of(H));
  CHECK(res.H == H);
  CHECK(res.a4_in_h.size() == 4);
  CHECK(res.dissociated_floor.holds);

  // rotation parts of S3^4
  auto P = build_group("product:symmetric:3+symmetric:3+symmetric:3+symmetric:3");
  std::vector<Id> rots;
  for (Id x = 0; x < P->order(); ++x)
    if (P->element_order(x) == 3)
      rots.push_back(x);
  Subgroup R = closure(P, rots);
  REQUIRE(R.order() == 81);
  auto rr = abelian_substruct(GroupSubset::of(R));
  CHECK(rr.a4_in_h.size() == 81);
  CHECK(is_subgroup_of(R, rr.H));
  CHECK(rr.certified);

  auto S4 = build_group("symmetric:4");
  auto sr = abelian_substruct(all_of(S4));
  CHECK(sr.dissociated_floor.holds);
  CHECK(sr.certified);
}

TEST_CASE("abelian structure near a set")
{
  auto Z = build_group("cyclic:12");
  Subgroup H = closure(Z, std::vector<Id>{4});
  auto sub = abelian_struct_near(GroupSubset::of(H), NearMode::translate);
  CHECK(sub.g == 0);
  CHECK(sub.piece == GroupSubset::of(H));
  CHECK(sub.piece_doubling_num == sub.piece.size());
  auto two = abelian_struct_near(GroupSubset::of(H), NearMode::two_sided);
  CHECK(two.g == 0);
  CHECK(two.hits == two.piece.size() * two.piece.size());

  // a coset of an abelian subgroup
  GroupSubset coset = translate_left(1, GroupSubset::of(H));
  auto c = abelian_struct_near(coset, NearMode::translate);
  CHECK(c.piece.size() == H.order());
  CHECK(translate_left(c.piece.ids()[0], GroupSubset::of(H)) == c.piece);

  auto Z101 = build_group("cyclic:101");
  GroupSubset A(Z101, {0, 1, 2, 99, 100});
  auto ap = abelian_struct_near(A, NearMode::translate);
  double ratio = double(ap.piece_doubling_num) / ap.piece.size();
  CHECK(ratio <= 9.0 / 5 + 1e-12);
  for (Id x : ap.piece.ids())
    CHECK(translate_left(ap.g, A).contains(x));
}
