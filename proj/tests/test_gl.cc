#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "grpcomb/error.hpp"
#include "grpcomb/gl.hpp"
#include "grpcomb/rng.hpp"

using namespace grpcomb;

namespace {

GroupSubset all_of(const GroupPtr &G) { return GroupSubset::of(whole_group(G)); }

Mat mat2(Elt a, Elt b, Elt c, Elt d)
{
  Mat m(2, 2);
  m.a = {a, b, c, d};
  return m;
}

Mat unit(int d, int i, int j)
{
  Mat m(d, d);
  m(i, j) = 1;
  return m;
}

Subspace upper_dirs(int d)
{
  Mat m(0, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      m.append_row(flatten(unit(d, i, j)));
  return m;
}

// direct sum over all k-tuples of #{x in A^2 : a_i x in V for every i}
uint64_t brute_tuple_sum(const ApproxInput &in, const Embedder &emb, const AffineSubspace &V,
                         int k)
{
  const Field &K = *emb.field();
  const auto &ids = in.A2.ids();
  size_t n = ids.size();
  std::vector<std::vector<char>> in_v(n, std::vector<char>(n));
  for (size_t a = 0; a < n; ++a)
    for (size_t x = 0; x < n; ++x)
      in_v[a][x] = V.contains(mat_mul(K, emb(ids[a]), emb(ids[x])));
  uint64_t total = 0;
  std::vector<size_t> tup(k, 0);
  for (;;) {
    for (size_t x = 0; x < n; ++x) {
      bool ok = true;
      for (int i = 0; i < k && ok; ++i)
        ok = in_v[tup[i]][x];
      total += ok;
    }
    int i = 0;
    while (i < k && ++tup[i] == n)
      tup[i++] = 0;
    if (i == k)
      break;
  }
  return total;
}

void check_decrement(const ApproxInput &in, const Embedder &emb, const AffineSubspace &V,
                     const DecrementResult &r)
{
  const Field &K = *emb.field();
  const FiniteGroup &G = *in.A2.group();
  REQUIRE(int(r.translators.size()) == r.j);
  // W is the intersection of the translates
  std::optional<AffineSubspace> W = V.left_mul(emb(G.inv(r.translators[0])));
  for (size_t i = 1; i < r.translators.size() && W; ++i)
    W = W->intersect(V.left_mul(emb(G.inv(r.translators[i]))));
  REQUIRE(W);
  CHECK(*W == r.W);
  CHECK(r.dim_drop.holds);
  CHECK(V.dim() - r.W.dim() >= r.j - 1);
  size_t w = 0;
  for (Id a : in.A2.ids())
    w += r.W.contains(emb(a));
  CHECK(w == r.in_w);
  (void)K;
}

// largest abelian subgroup generated by at most two elements
size_t max_abelian_two_gen(const GroupPtr &G)
{
  size_t best = 1;
  for (Id x = 0; x < G->order(); ++x)
    for (Id y = x; y < G->order(); ++y)
      if (G->commute(x, y)) {
        std::vector<Id> g{x, y};
        best = std::max(best, closure(G, g).order());
      }
  return best;
}

bool subgroup_abelian(const Subgroup &H)
{
  for (Id x : H.members)
    for (Id y : H.members)
      if (!H.parent->commute(x, y))
        return false;
  return true;
}

} // namespace

TEST_CASE("embedder and affine helpers")
{
  auto G = build_group("gl:2:3");
  Embedder emb(G);
  CHECK(emb.dim() == 2);
  CHECK(emb.field()->q() == 3);
  Mat a = emb(5);
  auto E = Field::of_order(9);
  emb.extend(E);
  CHECK(emb.field() == E);
  CHECK(emb(5) == embed_mat(a, Field::of_order(3), E));
  CHECK_THROWS_AS(emb.extend(Field::of_order(5)), Error);
  CHECK_THROWS_AS(Embedder(build_group("symmetric:3")), Error);

  auto F3 = Field::of_order(3);
  Flag triv = Flag::trivial(F3, 2);
  CHECK(parabolic_space(triv) == AffineSubspace(F3, 2, Mat(2, 2), full_space(4)));
  CHECK(vtr_slice(triv, {2}) == AffineSubspace::trace_slice(F3, 2, 2));
  Flag full = Flag::standard_complete(F3, 2);
  AffineSubspace P = parabolic_space(full);
  CHECK(P.dim() == 3);
  CHECK(P.contains(mat2(1, 2, 0, 1)));
  CHECK_FALSE(P.contains(mat2(1, 0, 1, 1)));
  AffineSubspace S = vtr_slice(full, {1, 2});
  CHECK(S.dim() == 1);
  CHECK(S.contains(mat2(1, 1, 0, 2)));
  CHECK(affine_leq(S, P));
  CHECK_FALSE(affine_leq(P, S));
  CHECK(affine_fdim(full, P) == 0);
  CHECK(affine_fdim(triv, AffineSubspace::trace_slice(F3, 2, 2)) == 3);
  CHECK(refines(full, triv));
  CHECK_FALSE(refines(triv, full));

  // a slice in a non-standard basis: every point has the right block traces
  auto F5 = Field::of_order(5);
  Subspace line(0, 3);
  line.append_row({1, 2, 0});
  Flag fl(F5, 3, {zero_space(3), line, full_space(3)});
  AffineSubspace T = vtr_slice(fl, {3, 4});
  Stream rng(1, 1);
  for (int i = 0; i < 30; ++i) {
    Mat x = T.point_at(rng.below(T.size()));
    REQUIRE(fl.stabilizes(x));
    REQUIRE(fl.vtr(x) == std::vector<Elt>{3, 4});
  }
  CHECK(T.dim() == parabolic_space(fl).dim() - 2);
}

TEST_CASE("dimension decrement examples")
{
  auto G = build_group("gl:2:3");
  auto F3 = Field::of_order(3);
  Flag triv = Flag::trivial(F3, 2);
  {
    auto in = approx_input(GroupSubset(G, {0}));
    Embedder emb(G);
    auto V = AffineSubspace::trace_slice(F3, 2, 2);
    auto r = dimension_decrement(in, emb, triv, V, 1);
    CHECK(r.mode == DecrementMode::exhaustive);
    CHECK(r.j == 1);
    CHECK(r.W == V);
    CHECK(r.certified);
    CHECK(r.product.holds);
    CHECK(r.identity_holds);
  }
  {
    auto D = build_group("diagonal:2:3");
    auto in = approx_input(all_of(D));
    Embedder emb(D);
    auto V = AffineSubspace::trace_slice(F3, 2, 2);
    auto r = dimension_decrement(in, emb, triv, V, 2);
    CHECK(r.mode == DecrementMode::exhaustive);
    CHECK(r.tuples == 16);
    CHECK(r.identity_holds);
    CHECK(r.tuple_sum == brute_tuple_sum(in, emb, V, 2));
    CHECK(r.averaging.holds);
    CHECK(r.pigeonhole.holds);
    CHECK(r.product.holds);
    check_decrement(in, emb, V, r);
    // only the identity has trace 2, so each b admits exactly a = b^-1
    CHECK(r.in_v == 1);
    CHECK(r.tuple_sum == 4);
  }
  {
    auto S = build_group("sl:2:3");
    auto in = approx_input(all_of(S));
    Embedder emb(S);
    auto V = AffineSubspace::trace_slice(F3, 2, 0);
    auto r = dimension_decrement(in, emb, triv, V, 2);
    CHECK(r.mode == DecrementMode::exhaustive);
    CHECK(r.tuples == 576);
    CHECK(r.identity_holds);
    CHECK(r.tuple_sum == brute_tuple_sum(in, emb, V, 2));
    CHECK(r.averaging.holds);
    CHECK(r.product.holds);
    check_decrement(in, emb, V, r);
    CHECK(r.in_v == 6);
  }
  {
    // V must be proper in P_F and meet A^2
    auto in = approx_input(GroupSubset(G, {0}));
    Embedder emb(G);
    CHECK_THROWS_AS(dimension_decrement(in, emb, triv, AffineSubspace::whole(F3, 2), 1), Error);
    CHECK_THROWS_AS(
      dimension_decrement(in, emb, triv, AffineSubspace::trace_slice(F3, 2, 1), 1), Error);
    CHECK_THROWS_AS(
      dimension_decrement(in, emb, triv, AffineSubspace::trace_slice(F3, 2, 2), 0), Error);
  }
}

TEST_CASE("dimension decrement: exhaustive identity on random instances")
{
  const char *specs[] = {"gl:2:2", "gl:2:3", "sl:2:3", "borel:2:5", "monomial:2:3",
                         "unipotent:3:3", "diagonal:2:7"};
  Stream rng(81, 81);
  int runs = 0;
  for (int t = 0; t < 60; ++t) {
    auto G = build_group(specs[t % 7]);
    auto emb = Embedder(G);
    const Field &K = *emb.field();
    int d = emb.dim();
    auto A = random_centered(G, 1 + rng.below(4), rng);
    auto in = approx_input(A);
    size_t n = in.A2.size();
    int k = 1 + int(rng.below(3));
    uint64_t nk = 1;
    for (int i = 0; i < k; ++i)
      nk *= n;
    if (nk * n > 3000000)
      continue;
    // hull of an A^2 point and a few random matrices
    std::vector<Mat> pts{emb(in.A2.ids()[rng.below(n)])};
    int extra = 1 + int(rng.below(d * d - 2));
    for (int i = 0; i < extra; ++i) {
      Mat m(d, d);
      for (auto &v : m.a)
        v = Elt(rng.below(K.q()));
      pts.push_back(m);
    }
    auto V = AffineSubspace::hull(emb.field(), pts);
    if (V.dim() >= d * d)
      continue;
    auto r = dimension_decrement(in, emb, Flag::trivial(emb.field(), d), V, k);
    REQUIRE(r.mode == DecrementMode::exhaustive);
    INFO(specs[t % 7], " k=", k, " n=", n, " sum=", r.tuple_sum.str(), " closed=", r.closed_form.str(), " brute=", brute_tuple_sum(in, emb, V, k));
    REQUIRE(r.identity_holds);
    REQUIRE(r.tuple_sum == brute_tuple_sum(in, emb, V, k));
    REQUIRE(r.averaging.holds);
    REQUIRE(r.pigeonhole.holds);
    REQUIRE(r.product.holds);
    check_decrement(in, emb, V, r);
    ++runs;
  }
  CHECK(runs >= 30);
}

TEST_CASE("dimension decrement: lattice search agrees with the bound")
{
  auto S = build_group("sl:2:3");
  auto in = approx_input(all_of(S));
  Embedder emb(S);
  auto F3 = Field::of_order(3);
  auto V = AffineSubspace::trace_slice(F3, 2, 0);
  DecrementOptions opt;
  opt.tuple_cap = 10; // force the lattice search
  for (int k : {2, 3, 5, 16}) {
    auto r = dimension_decrement(in, emb, Flag::trivial(F3, 2), V, k, opt);
    CHECK(r.mode == DecrementMode::search);
    CHECK(r.certified);
    CHECK(r.product.holds);
    check_decrement(in, emb, V, r);
  }
  opt.node_budget = 1;
  opt.samples = 50;
  auto r = dimension_decrement(in, emb, Flag::trivial(F3, 2), V, 3, opt);
  CHECK(r.mode == DecrementMode::sampled);
  CHECK_FALSE(r.certified);
  check_decrement(in, emb, V, r);
}

TEST_CASE("subspace to subgroup")
{
  auto F3 = Field::of_order(3);
  const Field &K = *F3;
  Flag triv = Flag::trivial(F3, 2);
  auto G = build_group("gl:2:3");
  {
    auto in = approx_input(GroupSubset(G, {0}));
    Embedder emb(G);
    auto V = AffineSubspace::trace_slice(F3, 2, 2);
    auto r = subspace_to_subgroup(in, emb, triv, V);
    CHECK(r.U.basis.rows == 0);
    CHECK(r.contained);
    CHECK(r.in_group == 1);
    CHECK(V.contains(mat_mul(K, r.left, r.right)));
  }
  {
    // upper triangular group, V = {tr x = 2}
    auto B = build_group("borel:2:3");
    auto in = approx_input(all_of(B));
    Embedder emb(B);
    auto V = AffineSubspace::trace_slice(F3, 2, 2);
    auto r = subspace_to_subgroup(in, emb, triv, V);
    CHECK(r.U.closed());
    CHECK(r.closed);
    CHECK(r.contained);
    CHECK(r.w_inside);
    CHECK(r.coset_bound.holds);
    CHECK(r.certified);
    CHECK(r.ratio.holds);
    REQUIRE(!r.steps.empty());
    CHECK(r.steps.back().dim_x == r.steps.back().dim_v);
    // the subgroup count is exact
    size_t cnt = 0;
    for (Id a : in.A2.ids())
      cnt += r.U.contains(mat_sub(K, emb(a), identity(2)));
    CHECK(cnt == r.in_group);
  }
  {
    // V = b (1 + U0) with U0 upper triangular and b in the Borel group:
    // the escape recovers U0 and all of A^2
    auto B = build_group("borel:2:3");
    auto in = approx_input(all_of(B));
    Embedder emb(B);
    Mat b = mat2(2, 1, 0, 1);
    Mat dirs(0, 4);
    for (auto &u : Subalgebra{F3, 2, upper_dirs(2)}.mats())
      dirs.append_row(flatten(mat_mul(K, b, u)));
    AffineSubspace V(F3, 2, b, span_rows(K, dirs));
    auto r = subspace_to_subgroup(in, emb, triv, V);
    CHECK(r.U.basis == upper_dirs(2));
    CHECK(r.contained);
    CHECK(r.in_group == in.A2.size());
  }
  {
    // the same algebra inside GL_2(F_3): a quarter of A^2 lies in V
    auto in = approx_input(all_of(G));
    Embedder emb(G);
    AffineSubspace V(F3, 2, Mat(2, 2), upper_dirs(2));
    auto r = subspace_to_subgroup(in, emb, triv, V);
    CHECK(r.U.closed());
    CHECK(r.contained);
    CHECK(r.in_group >= 12);
  }
}

TEST_CASE("subspace to subgroup with halving")
{
  auto F3 = Field::of_order(3);
  auto G = build_group("gl:2:3");
  auto in = approx_input(all_of(G));
  Embedder emb(G);
  Flag triv = Flag::trivial(F3, 2);
  auto r = subspace_to_subgroup(in, emb, triv, vtr_slice(triv, {2}), std::vector<Elt>{2});
  REQUIRE(r.halving);
  CHECK(r.halving->half_bound.holds);
  CHECK(r.halving->frobenius_ok);
  CHECK(2 * r.halving->fdim_v_prime <= r.halving->D);
  CHECK(r.contained);
  CHECK(r.U.closed());
  CHECK_THROWS_AS(
    subspace_to_subgroup(in, emb, triv, AffineSubspace::trace_slice(F3, 2, 1), std::vector<Elt>{2}),
    Error);
}

TEST_CASE("subspace to flag")
{
  auto F3 = Field::of_order(3);
  {
    auto G = build_group("gl:2:3");
    auto in = approx_input(all_of(G));
    Embedder emb(G);
    Flag triv = Flag::trivial(F3, 2);
    auto r = subspace_to_flag(in, emb, triv, triv.vtr(identity(2)));
    CHECK(r.halving_pdim.holds);
    CHECK(2 * r.pdim_g * r.pdim_g <= r.D * r.D);
    CHECK(r.refines);
    CHECK(r.group_inside);
    CHECK(r.G.complete());
    CHECK(r.G.field() == emb.field());
  }
  {
    auto F5 = Field::of_order(5);
    auto S = std::make_shared<MatrixGroup>("scalars", F5, 2, std::vector<Mat>{scalar_mat(2, 2)},
                                           kDefaultOrderCap);
    REQUIRE(S->order() == 4);
    auto in = approx_input(all_of(S));
    Embedder emb(S);
    Flag triv = Flag::trivial(F5, 2);
    auto r = subspace_to_flag(in, emb, triv, {2});
    CHECK(r.G.complete());
    CHECK(r.in_hg == in.A2.size());
  }
  {
    auto G = build_group("gl:2:3");
    auto in = approx_input(GroupSubset(G, {0}));
    Embedder emb(G);
    auto r = subspace_to_flag(in, emb, Flag::trivial(F3, 2), {2});
    CHECK(r.G.complete());
    CHECK(r.in_hg == 1);
  }
}

TEST_CASE("regular element search")
{
  {
    auto G = build_group("gl:2:3");
    auto r = reg_element_search(GroupSubset(G, {0}));
    CHECK(r.outcome == RegOutcome::subspace_pair);
    CHECK(r.V1.rows == 0);
    CHECK(r.V2 == full_space(2));
    CHECK(r.count == 1);
  }
  {
    auto U = build_group("unipotent:2:3");
    auto A = all_of(U);
    auto r = reg_element_search(A, 1);
    CHECK(r.outcome == RegOutcome::subspace_pair);
    CHECK(r.s == 1);
    CHECK(r.algebra_maps);
    CHECK(r.pair_ok);
    CHECK(r.count >= 1);
    const Field &K = *Field::of_order(3);
    auto M = std::dynamic_pointer_cast<const MatrixGroup>(U);
    for (size_t i = 0; i < r.members.size(); ++i)
      CHECK(pair_member(K, M->matrix(r.members[i]), r.member_lambda[i], r.V1, r.V2));
    for (auto &st : r.steps) {
      CHECK(st.ranks_ok);
      CHECK(st.size_bound.holds);
    }
    CHECK_THROWS_AS(reg_element_search(A, 0), Error);
  }
  {
    // GL_3(F_2): elements with a small largest eigenspace send the search
    // to the irregular branch, matching eigen_stats
    auto G = build_group("gl:3:2");
    auto M = std::dynamic_pointer_cast<const MatrixGroup>(G);
    auto A = GroupSubset(G, {0, 1, G->inv(1)});
    auto A2 = power(A, 2);
    bool any_irregular = false;
    for (Id a : A2.ids())
      any_irregular = any_irregular || 2 * eigen_stats(M->field_ptr(), M->matrix(a)).m <= 3;
    auto r = reg_element_search(A);
    CHECK((r.outcome == RegOutcome::irregular_element) == any_irregular);
    if (r.outcome == RegOutcome::irregular_element)
      CHECK(2 * eigen_stats(M->field_ptr(), M->matrix(r.witness)).m <= 3);
  }
  {
    // diagonal subgroup of GL_3(F_2) is trivial: every element has m = 3
    auto D = build_group("diagonal:3:2");
    auto r = reg_element_search(all_of(D));
    CHECK(r.outcome == RegOutcome::subspace_pair);
    CHECK(r.normalized);
    CHECK(r.count == D->order());
  }
  {
    // scalars times a transvection: normalization removes the scalars
    auto F5 = Field::of_order(5);
    Mat tv = identity(3);
    tv(0, 2) = 1;
    auto S = std::make_shared<MatrixGroup>("st", F5, 3,
                                           std::vector<Mat>{scalar_mat(3, 2), tv},
                                           kDefaultOrderCap);
    auto A = centered_hull(GroupSubset(S, {S->id_of(mat_scale(*F5, 2, tv))}));
    auto r = reg_element_search(A);
    REQUIRE(r.outcome == RegOutcome::subspace_pair);
    CHECK(r.normalized);
    CHECK(r.s == 1);
    for (size_t i = 0; i < r.members.size(); ++i)
      CHECK(pair_member(*F5, S->matrix(r.members[i]), r.member_lambda[i], r.V1, r.V2));
    CHECK(r.count >= 1);
  }
}

TEST_CASE("big GL iteration cases")
{
  auto F5 = Field::of_order(5);
  {
    auto S = std::make_shared<MatrixGroup>("scalars", F5, 2, std::vector<Mat>{scalar_mat(2, 2)},
                                           kDefaultOrderCap);
    auto in = approx_input(all_of(S));
    Embedder emb(S);
    PipelineState st{Flag::trivial(F5, 2), 3, 0, 1, 1};
    auto r = big_gl_iteration(in, emb, st);
    CHECK(r.record.branch == "2a");
    CHECK(r.record.blocks[0].label == "2a");
    CHECK(r.next.flag.complete());
    CHECK(r.record.in_hg == in.A2.size());
    CHECK(r.next.D == 2);
    CHECK(r.record.inherited);
  }
  {
    auto D = build_group("diagonal:2:5");
    auto in = approx_input(all_of(D));
    Embedder emb(D);
    PipelineState st{Flag::trivial(F5, 2), 3, 0, 1, 1};
    auto r = big_gl_iteration(in, emb, st);
    CHECK(r.record.branch == "ii");
    CHECK(r.record.blocks[0].label == "2b");
    CHECK(r.record.blocks[0].m_a0 == 1);
    CHECK(r.next.flag.complete());
    CHECK(r.record.in_hg == in.A2.size());
    CHECK(r.record.centralizer_inside);
    CHECK(r.record.pdim_bound.holds);
    CHECK(r.next.lambda == 7);
  }
  {
    // a tiny eta forces the conjugacy branch
    auto G = build_group("gl:2:3");
    auto in = approx_input(all_of(G));
    Embedder emb(G);
    PipelineState st{Flag::trivial(Field::of_order(3), 2), 3, 0, 1, 1};
    GlOptions opt;
    opt.eta = 1e-9L;
    auto r = big_gl_iteration(in, emb, st, opt);
    CHECK(r.record.branch == "i");
    REQUIRE(r.record.escape);
    CHECK(r.next.flag.pdim() == 0);
    CHECK(r.next.D == 2);
    CHECK(r.next.eps_den == 2);
    CHECK(r.record.inherited);
  }
  {
    auto G = build_group("gl:2:3");
    auto in = approx_input(all_of(G));
    Embedder emb(G);
    PipelineState st{Flag::standard_complete(Field::of_order(3), 2), 0, 0, 1, 1};
    CHECK_THROWS_AS(big_gl_iteration(in, emb, st), Error);
  }
}

TEST_CASE("Borel endgame")
{
  auto F3 = Field::of_order(3);
  {
    auto B = build_group("borel:2:3");
    auto in = approx_input(all_of(B));
    Embedder emb(B);
    auto r = borel_abelian(in, emb, Flag::standard_complete(F3, 2));
    CHECK(r.abelian);
    CHECK(subgroup_abelian(r.H));
    CHECK(r.hard.holds);
    CHECK(r.in_h >= 2);
    CHECK(r.chain1.size() <= 3);
    CHECK(r.chain2.size() <= 3);
    for (auto &s : r.steps1)
      CHECK(s.holds);
    for (auto &s : r.steps2)
      CHECK(s.holds);
    CHECK(r.bound1.holds);
    CHECK(r.bound2.holds);
  }
  {
    auto U = build_group("unipotent:3:3");
    auto in = approx_input(all_of(U));
    Embedder emb(U);
    auto r = borel_abelian(in, emb, Flag::standard_complete(F3, 3));
    CHECK(subgroup_abelian(r.H));
    CHECK(r.hard.holds);
    CHECK(r.in_h >= 2);
    CHECK(r.lcs_length == 1);
  }
  {
    // abelian A: H = <A>
    auto D = build_group("diagonal:2:5");
    auto in = approx_input(all_of(D));
    Embedder emb(D);
    auto r = borel_abelian(in, emb, Flag::standard_complete(Field::of_order(5), 2));
    CHECK(r.in_h == in.A2.size());
    CHECK(r.chain1.empty());
  }
}

TEST_CASE("abelian substructure pipeline")
{
  struct Case {
    const char *spec;
    size_t min_h;
  };
  for (auto c : {Case{"gl:2:2", 2}, Case{"gl:2:3", 2}, Case{"sl:2:3", 2}, Case{"diagonal:2:5", 16},
                 Case{"monomial:2:5", 4}, Case{"unipotent:3:3", 2}, Case{"borel:2:5", 2}}) {
    auto G = build_group(c.spec);
    auto r = gl_abelian_substruct(all_of(G));
    INFO(c.spec);
    CHECK(int(r.iterations.size()) < r.d * r.d);
    CHECK(r.final_flag.complete());
    CHECK(r.abelian);
    CHECK(subgroup_abelian(r.H));
    CHECK(r.hard.holds);
    CHECK(r.in_h >= c.min_h);
    CHECK(r.in_h <= max_abelian_two_gen(G));
    for (size_t i = 1; i < r.states.size(); ++i)
      CHECK(r.states[i].flag.pdim() < r.states[i - 1].flag.pdim());
    for (auto &it : r.iterations) {
      CHECK(it.inherited);
      CHECK(it.pdim_bound.holds);
    }
  }
  {
    auto G = build_group("gl:1:7");
    auto r = gl_abelian_substruct(GroupSubset(G, {0, 1, G->inv(1)}));
    CHECK(r.short_circuit);
    CHECK(r.H.order() == closure(G, std::vector<Id>{1}).order());
  }
}
