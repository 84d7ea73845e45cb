#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "grpcomb/error.hpp"
#include "grpcomb/ramsey.hpp"
#include "grpcomb/rng.hpp"

using namespace grpcomb;

namespace {

// plain recursive enumeration over all vertices, no colouring bound and no
// fixed vertex
int brute_clique(const CayleyGraph &g, bool complement)
{
  size_t n = g.order();
  auto edge = [&](Id a, Id b) { return g.adjacent(a, b) != complement; };
  int best = 0;
  std::vector<Id> cur;
  std::function<void(Id)> go = [&](Id from) {
    best = std::max(best, int(cur.size()));
    for (Id v = from; v < n; ++v) {
      bool ok = true;
      for (Id u : cur)
        ok = ok && edge(u, v);
      if (!ok)
        continue;
      cur.push_back(v);
      go(v + 1);
      cur.pop_back();
    }
  };
  go(0);
  return best;
}

bool is_clique(const CayleyGraph &g, const std::vector<Id> &A, bool complement)
{
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = i + 1; j < A.size(); ++j)
      if (g.adjacent(A[i], A[j]) == complement)
        return false;
  return true;
}

std::vector<Id> class_members(const PairingGraph &P, int v) { return P.classes[size_t(v)]; }

} // namespace

TEST_CASE("smallest prime and the 24 check")
{
  CHECK(smallest_prime_not_dividing(6) == 5);
  CHECK(smallest_prime_not_dividing(2) == 3);
  CHECK(smallest_prime_not_dividing(35) == 2);
  CHECK(smallest_prime_not_dividing(1) == 2);
  CHECK(smallest_prime_not_dividing(30030) == 17);
  CHECK(smallest_prime_not_dividing(10) == 3);
  CHECK(prime_square_check(10));
  CHECK((3 * 3 - 1) % 10 != 0);
  for (uint64_t m = 1; m <= 20000; ++m)
    CHECK(prime_square_check(m));
  // the implication fails only because 24 itself is excluded
  CHECK((5 * 5 - 1) % 24 == 0);
}

TEST_CASE("pairing graph examples")
{
  auto Z5 = build_group("cyclic:5");
  auto P = build_pairing(Z5, PairingMode::squaring);
  REQUIRE(P.vertices() == 2);
  CHECK(P.classes[0] == std::vector<Id>{1, 4});
  CHECK(P.classes[1] == std::vector<Id>{2, 3});
  CHECK(P.edges.size() == 1);
  CHECK(P.cycles == 1);
  CHECK(P.matching.size() == 1);
  CHECK(P.structure_error.empty());

  auto Z3 = build_group("cyclic:3");
  auto P3 = build_pairing(Z3, PairingMode::squaring);
  REQUIRE(P3.vertices() == 1);
  CHECK(P3.classes[0] == std::vector<Id>{1, 2});
  CHECK(P3.loops == std::vector<int>{0});
  CHECK(P3.edges.empty());
  CHECK(P3.matching.empty());

  auto V4 = build_group("abelian:2,2");
  auto P4 = build_pairing(V4, PairingMode::squaring);
  CHECK(P4.vertices() == 3);
  CHECK(P4.isolated == 3);
  CHECK(P4.matching.empty());
  CHECK(P4.structure_error.empty());

  // prime mode never leaves a class isolated: involutions get q = 3
  auto P4p = build_pairing(V4, PairingMode::smallest_prime);
  CHECK(P4p.isolated == 0);
  CHECK(P4p.loops.size() == 3);

  CHECK_THROWS_AS(build_pairing(build_group("cyclic:1"), PairingMode::squaring), Error);
}

TEST_CASE("pairing structure on the catalog")
{
  for (const auto &spec : test_catalog(512)) {
    auto G = build_group(spec);
    if (G->order() < 2)
      continue;
    for (auto mode : {PairingMode::squaring, PairingMode::smallest_prime}) {
      auto P = build_pairing(G, mode);
      INFO(spec, " ", pairing_mode_name(mode));
      CHECK(P.structure_error.empty());
      CHECK(P.maximal);
      // matching is a matching
      std::vector<int> used(P.vertices(), 0);
      for (auto [a, b] : P.matching) {
        CHECK(++used[size_t(a)] == 1);
        CHECK(++used[size_t(b)] == 1);
        CHECK(std::binary_search(P.edges.begin(), P.edges.end(), std::make_pair(a, b)));
      }
      // independent recount of the class claims
      for (size_t v = 0; v < P.vertices(); ++v) {
        Id x = P.classes[v][0];
        Id ord = G->element_order(x);
        if (mode == PairingMode::squaring) {
          CHECK((P.next[v] < 0) == (ord % 2 == 0));
          if (ord % 2 == 1)
            CHECK((P.next[v] == int(v)) == (ord == 3));
        } else {
          CHECK(P.next[v] >= 0);
        }
      }
    }
  }
}

TEST_CASE("connection samples")
{
  auto Z5 = build_group("cyclic:5");
  auto P = build_pairing(Z5, PairingMode::squaring);
  // every vertex is matched, so |S| is one class per edge
  size_t first = 0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    auto c = sample_connection(P, uint64_t(s));
    CHECK(check_sample(P, c).empty());
    CHECK(c.S.size() == 2);
    if (c.S == std::vector<Id>{1, 4})
      ++first;
    else
      CHECK(c.S == std::vector<Id>{2, 3});
  }
  double sigma = std::sqrt(seeds * 0.25);
  CHECK(std::abs(double(first) - seeds / 2.0) <= 3 * sigma);

  auto Z2 = build_group("cyclic:2");
  auto P2 = build_pairing(Z2, PairingMode::squaring);
  bool saw_empty = false, saw_full = false;
  for (int s = 0; s < 64; ++s) {
    auto c = sample_connection(P2, uint64_t(s));
    CHECK(check_sample(P2, c).empty());
    saw_empty |= c.S.empty();
    saw_full |= c.S == std::vector<Id>{1};
  }
  CHECK(saw_empty);
  CHECK(saw_full);

  // repeatable and exclusive on bigger groups
  for (const char *spec : {"cyclic:35", "cyclic:55", "heisenberg:3", "dihedral:10"}) {
    auto G = build_group(spec);
    for (auto mode : {PairingMode::squaring, PairingMode::smallest_prime}) {
      auto Q = build_pairing(G, mode);
      for (uint64_t s = 0; s < 200; ++s) {
        auto a = sample_connection(Q, s);
        CHECK(check_sample(Q, a).empty());
        CHECK(a.S == sample_connection(Q, s).S);
      }
    }
  }

  // the checker notices a broken sample
  auto bad = sample_connection(P, 3);
  bad.chosen[0] = bad.chosen[1] = 1;
  bad.S = {1, 2, 3, 4};
  CHECK_FALSE(check_sample(P, bad).empty());
}

TEST_CASE("Cayley graph checks and clique numbers")
{
  auto Z13 = build_group("cyclic:13");
  CayleyGraph g(Z13, {1, 12, 5, 8});
  auto cn = clique_numbers(g);
  CHECK(is_clique(g, cn.clique_set, false));
  CHECK(is_clique(g, cn.independent_set, true));
  CHECK(cn.clique == int(cn.clique_set.size()));
  // brute force over all subsets of size at most 4
  int best = 1, best_ind = 1;
  for (Id a = 0; a < 13; ++a)
    for (Id b = a + 1; b < 13; ++b)
      for (Id c = b; c < 13; ++c)
        for (Id d = c; d < 13; ++d) {
          std::vector<Id> A{a, b};
          if (c > b)
            A.push_back(c);
          if (d > c && c > b)
            A.push_back(d);
          if (is_clique(g, A, false))
            best = std::max(best, int(A.size()));
          if (is_clique(g, A, true))
            best_ind = std::max(best_ind, int(A.size()));
        }
  CHECK(std::min(cn.clique, 4) == best);
  CHECK(std::min(cn.independence, 4) == best_ind);
  CHECK(cn.clique == brute_clique(g, false));
  CHECK(cn.independence == brute_clique(g, true));
  // no a + b = c inside {1, 5, 8, 12}, so the graph is triangle-free
  CHECK(cn.clique == 2);
  CHECK(cn.independence == 4);

  // empty connection set
  CayleyGraph e(Z13, {});
  auto ce = clique_numbers(e);
  CHECK(ce.clique == 1);
  CHECK(ce.independence == 13);

  // a subgroup inside S is a clique
  auto Z12 = build_group("cyclic:12");
  CayleyGraph h(Z12, {4, 8, 1, 11});
  auto chk = check_set(h, GroupSubset(Z12, {0, 4, 8}));
  CHECK(chk.clique);
  CHECK_FALSE(chk.independent);
  CHECK(chk.quotient_size == 3);
  auto chk2 = check_set(h, GroupSubset(Z12, {0, 2}));
  CHECK(chk2.independent);

  CHECK_THROWS_AS(CayleyGraph(Z13, {1}), Error);
  CHECK_THROWS_AS(CayleyGraph(Z13, {0}), Error);
  CHECK_THROWS_AS(clique_numbers(g, 10), Error);
}

TEST_CASE("exact solver agrees with enumeration for small groups")
{
  Stream rng(11);
  for (const auto &spec : test_catalog(24)) {
    auto G = build_group(spec);
    if (G->order() < 2)
      continue;
    auto P = build_pairing(G, PairingMode::smallest_prime);
    for (int rep = 0; rep < 3; ++rep) {
      auto s = sample_uniform(P, rng());
      CayleyGraph g(G, s.S);
      auto cn = clique_numbers(g);
      INFO(spec);
      CHECK(cn.clique == brute_clique(g, false));
      CHECK(cn.independence == brute_clique(g, true));
      CHECK(is_clique(g, cn.clique_set, false));
      CHECK(is_clique(g, cn.independent_set, true));
      // left translation preserves adjacency
      for (int k = 0; k < 20; ++k) {
        Id x = Id(rng.below(G->order())), y = Id(rng.below(G->order()));
        Id z = Id(rng.below(G->order()));
        CHECK(g.adjacent(x, y) == g.adjacent(G->mul(z, x), G->mul(z, y)));
        CHECK(g.adjacent(x, y) == g.adjacent(y, x));
      }
    }
  }
}

TEST_CASE("pattern detection")
{
  auto Z25 = build_group("cyclic:25");
  std::vector<Id> all;
  for (Id x = 1; x < 25; ++x)
    all.push_back(x);
  auto w = pattern_detect(GroupSubset(Z25, all), ChainMode::doubling);
  CHECK(w.size() == 24);
  REQUIRE(!w.empty());
  CHECK(w[0].x == 1);
  CHECK(w[0].chain == std::array<Id, 4>{1, 2, 4, 8});

  // {±1, ±2, ±4} misses 8
  auto D = GroupSubset(Z25, {0, 1, 24, 2, 23, 4, 21});
  CHECK(pattern_detect(D, ChainMode::doubling).empty());
  auto D8 = GroupSubset(Z25, {0, 1, 24, 2, 23, 4, 21, 8, 17});
  auto w8 = pattern_detect(D8, ChainMode::doubling);
  // x = 1 and its inverse
  REQUIRE(w8.size() == 2);
  CHECK(w8[0].x == 1);
  CHECK(w8[1].x == 24);

  // orders sharing a factor with 6 are skipped in doubling mode
  auto Z9 = build_group("cyclic:9");
  std::vector<Id> all9;
  for (Id x = 0; x < 9; ++x)
    all9.push_back(x);
  CHECK(pattern_detect(GroupSubset(Z9, all9), ChainMode::doubling).empty());
  // prime mode: order 9 does not divide 24, q = 2
  auto w9 = pattern_detect(GroupSubset(Z9, all9), ChainMode::prime);
  for (auto &x : w9)
    CHECK(x.q == 2);
  CHECK(w9.size() == 6); // elements of order 9

  // order 10 in prime mode uses q = 3
  auto Z10 = build_group("cyclic:10");
  std::vector<Id> all10;
  for (Id x = 0; x < 10; ++x)
    all10.push_back(x);
  auto w10 = pattern_detect(GroupSubset(Z10, all10), ChainMode::prime);
  // orders 5 and 10 qualify, with q = 2 and q = 3
  for (auto &x : w10)
    CHECK(x.q == (x.order == 10 ? 3u : 2u));
  CHECK(w10.size() == 8);

  CHECK_THROWS_AS(pattern_detect(GroupSubset(Z25, {0, 1}), ChainMode::doubling), Error);
}

TEST_CASE("monochromatic probability matches class counting")
{
  auto G = build_group("cyclic:35");
  auto P = build_pairing(G, PairingMode::squaring);
  // first {0, x, y} whose quotient set avoids every matched edge
  std::optional<GroupSubset> pick;
  for (Id x = 1; x < 35 && !pick; ++x)
    for (Id y = x + 1; y < 35 && !pick; ++y) {
      GroupSubset A(G, {0, x, y});
      std::vector<char> in(P.vertices(), 0);
      for (Id a : A.ids())
        for (Id b : A.ids())
          if (a != b)
            in[size_t(P.class_of[G->mul(a, G->inv(b))])] = 1;
      bool ok = true;
      size_t c = 0;
      for (auto [u, v] : P.matching)
        ok = ok && !(in[size_t(u)] && in[size_t(v)]);
      for (char f : in)
        c += f;
      if (ok && c == 3)
        pick = A;
    }
  REQUIRE(pick);
  auto m = monochrome_estimate(P, *pick, 100000, 5, 4);
  CHECK(m.classes == 3);
  CHECK(m.predicted == doctest::Approx(0.25));
  CHECK(std::abs(m.z) <= 4);
  // separately each event is 1/8
  long double s1 = std::sqrt(0.125L * 0.875L / 100000);
  CHECK(std::abs((long double)m.cliques / 100000 - 0.125L) <= 4 * s1);
  CHECK(std::abs((long double)m.independents / 100000 - 0.125L) <= 4 * s1);
  // thread count does not change the counts
  auto m1 = monochrome_estimate(P, *pick, 20000, 9, 1);
  auto m4 = monochrome_estimate(P, *pick, 20000, 9, 4);
  CHECK(m1.cliques == m4.cliques);
  CHECK(m1.independents == m4.independents);

  // a matched edge inside the quotient set is rejected
  auto [u, v] = P.matching[0];
  GroupSubset both(G, {0, class_members(P, u)[0], G->mul(class_members(P, u)[0],
                                                          class_members(P, v)[0])});
  bool has_edge = false;
  {
    std::vector<char> in(P.vertices(), 0);
    for (Id a : both.ids())
      for (Id b : both.ids())
        if (a != b)
          in[size_t(P.class_of[G->mul(a, G->inv(b))])] = 1;
    for (auto [a, b] : P.matching)
      has_edge = has_edge || (in[size_t(a)] && in[size_t(b)]);
  }
  if (has_edge)
    CHECK_THROWS_AS(monochrome_estimate(P, both, 10, 0), Error);
}

TEST_CASE("Ramsey experiment")
{
  RamseyOptions opt;
  opt.trials = 6;
  opt.seed = 1;
  opt.baseline = true;
  auto Z2 = build_group("cyclic:2");
  auto r2 = ramsey_experiment(Z2, opt);
  for (auto &t : r2.trials) {
    CHECK((t.clique == 1 || t.clique == 2));
    CHECK(t.clique + t.independence == 3);
  }

  for (const char *spec : {"cyclic:35", "cyclic:55"}) {
    for (auto mode : {PairingMode::squaring, PairingMode::smallest_prime}) {
      opt.mode = mode;
      opt.trials = 20;
      auto G = build_group(spec);
      auto r = ramsey_experiment(G, opt);
      CHECK(r.avoidance_failures == 0);
      CHECK(r.sample_failures == 0);
      CHECK(r.threshold_failures == 0);
      CHECK(r.count.ran);
      CHECK(r.count.within_bound);
      for (auto &t : r.trials)
        CHECK(t.max == std::max(t.clique, t.independence));
    }
  }

  // reproducible across thread counts
  auto G = build_group("cyclic:101");
  opt.mode = PairingMode::squaring;
  opt.trials = 8;
  opt.threads = 1;
  auto a = ramsey_experiment(G, opt);
  opt.threads = 4;
  auto b = ramsey_experiment(G, opt);
  CHECK(ramsey_csv(a) == ramsey_csv(b));
  CHECK(a.count.with_identity == b.count.with_identity);

  // small-set count against a direct count of all 3-sets on Z/12
  auto Z12 = build_group("cyclic:12");
  opt.trials = 1;
  opt.count_n = 3;
  opt.count_k = 2.0;
  auto rc = ramsey_experiment(Z12, opt);
  uint64_t direct = 0;
  for (Id x = 0; x < 12; ++x)
    for (Id y = x + 1; y < 12; ++y)
      for (Id z = y + 1; z < 12; ++z) {
        std::vector<Id> d;
        for (Id a1 : {x, y, z})
          for (Id b1 : {x, y, z})
            d.push_back((a1 + 12 - b1) % 12);
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        direct += d.size() <= 6;
      }
  CHECK(rc.count.total == direct);

  opt.trials = 0;
  CHECK_THROWS_AS(ramsey_experiment(Z12, opt), Error);
}
