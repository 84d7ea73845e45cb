#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grpcomb/approx.hpp"
#include "grpcomb/exact.hpp"
#include "grpcomb/extract.hpp"
#include "grpcomb/group.hpp"
#include "grpcomb/rng.hpp"

namespace grpcomb {

// ---------------------------------------------------------------- pattern-freeness

// translational: x, xy, xy^2 in A with y != 1; averaging: xz = y^2 with x != y
enum class ApMode { translational, averaging };
const char *ap_mode_name(ApMode m);
ApMode parse_ap_mode(const std::string &s);

struct ApCheck {
  bool free = true;
  std::array<Id, 3> witness{}; // (x, xy, xy^2) or (x, y, z)
};
ApCheck three_ap_check(const GroupSubset &A, ApMode mode);

using Cell = std::pair<Id, Id>;

struct CornerCheck {
  bool free = true;
  Cell corner{};
  Id d = 0; // (x, y), (x d, y), (x, y d) all in the set
};
// cells inside B x B; every pair of elements of B must commute
CornerCheck corner_check(const GroupPtr &G, const std::vector<Cell> &cells,
                         const GroupSubset &B);

// S = {(x, y) in B0^2 : x g y^-1 in A}
std::vector<Cell> corner_transfer(const GroupSubset &A, Id g, const GroupSubset &B0);

// ---------------------------------------------------------------- progressions

// H + {g_1^a_1 ... g_r^a_r : |a_i| <= N_i} in an abelian group
struct CosetProgression {
  GroupPtr G;
  Subgroup H;
  std::vector<Id> gens;
  std::vector<uint32_t> bounds;
  size_t rank() const { return gens.size(); }
};

struct ProgressionReport {
  uint64_t params = 0; // |H| prod (2 N_i + 1)
  std::vector<Id> members;
  bool proper = false;
  // two parameter tuples with the same image (h first, then a_1..a_r)
  std::vector<int64_t> clash_a, clash_b;
};
// enumeration, at most `cap` parameter tuples
ProgressionReport check_progression(const CosetProgression &M, uint64_t cap = 100000);

// g1 + [m] g2 = {g1 + i g2 : 1 <= i <= m}
struct IntervalSet {
  GroupPtr G;
  Id g1 = 0, g2 = 0;
  uint32_t m = 0;
  std::vector<Id> members() const;
  // m at least ord(g2): the set is a whole coset of <g2>
  bool covers_period() const;
};

// ---------------------------------------------------------------- dense nice sets

enum class NiceKind { elementary, interval };
const char *nice_kind_name(NiceKind k);

struct NiceSetOptions {
  size_t threshold = 0; // smallest admissible |I|; 0 takes max(2, ceil(sqrt |A|))
  std::vector<uint64_t> exclude_primes; // elementary p-groups skipped for these p
  uint64_t subgroup_cap = 20000;        // elementary subgroups enumerated per prime
};

struct NiceSetResult {
  NiceKind kind = NiceKind::interval;
  uint64_t p = 0;  // elementary case
  Subgroup J;      // elementary case
  IntervalSet I;   // interval case, I.g1 = 0
  Id shift = 0;    // S = shift + I
  std::vector<Id> S;
  size_t size = 0, hits = 0; // |I|, |A n S|
  long double density = 0;   // hits / size
  long double capture = 0;   // hits / |A|
  size_t cover = 0;          // fewest translates of I covering A
  size_t threshold = 0;
  uint64_t candidates = 0;
  bool exhaustive = true; // no enumeration cap was hit
  bool certified = false; // |I| >= threshold
};
// A inside an abelian group
NiceSetResult dense_nice_set(const GroupSubset &A, const NiceSetOptions &opt = {});

// ---------------------------------------------------------------- multiples

struct MultiplesZResult {
  bool found = false;
  uint64_t q = 0;
  std::vector<int64_t> t;
  BigInt delta_num = 0, delta_den = 1; // 2 Q^7 eps^-8
  bool threshold_met = false;          // N > 8 eps^-12 Q^10 R
  std::array<int64_t, 3> u{};          // heaviest fiber of phi
  std::vector<int64_t> A0;
  Inequality fiber_bound;  // eps^4 Q^-3 N <= |A0|
  uint64_t good_pairs = 0; // ordered pairs in A0 passing the congruence test, diagonal included
  Inequality pair_bound;   // Q^-10 eps^12 |A0| N / 4 <= good_pairs
  int64_t anchor = 0;      // a0 whose partners give t
  std::string verify_error;
  bool certified = false; // threshold met, all checks passed, at least R values
};

// s[q] = s_q for primes q < Q (absent means 0); A inside [1, N]
MultiplesZResult find_multiples_Z(const std::vector<int64_t> &A, int64_t N,
                                  const std::map<uint64_t, int> &s, uint64_t Q, size_t R);
// conditions on one t: q^s_q | t, q'^s_q' does not divide t for primes q' < q,
// t, qt, q^2 t, q^3 t in A - A; empty when all hold
std::string verify_multiple_Z(const std::vector<int64_t> &A, const std::map<uint64_t, int> &s,
                              uint64_t q, int64_t t);

struct MultiplesOptions {
  uint64_t Q = 0; // 0: one more than the smallest prime not dividing |<g2>|
  size_t R = 49;
  NiceSetOptions nice;
};

struct MultiplesResult {
  bool found = false;
  std::string branch; // "elementary", "interval" or "none"
  uint64_t q = 0;
  Id t = 0;
  std::vector<Id> all; // every verified t of this run
  NiceSetResult nice;
  bool pigeonhole = false; // elementary: |A n S|^4 > |S|^3
  std::optional<MultiplesZResult> inner;
  size_t pushed = 0, dropped_24 = 0;
  std::string diagnostics;
  bool certified = false;
};
// A inside an abelian group
MultiplesResult find_multiples_general(const GroupSubset &A, const MultiplesOptions &opt = {});
// ord t does not divide 24, primes below q divide ord t, q does not, and
// t, qt, q^2 t, q^3 t lie in A - A; empty when all hold
std::string verify_multiple(const GroupSubset &A, uint64_t q, Id t);

// ---------------------------------------------------------------- doubling

struct DoublingReport {
  bool avoids = true;
  Id witness = 0; // x != 0 with x, 2x, 4x, 8x in A - A
  size_t a = 0, diff = 0;
  Inequality bound; // |A|^145 <= |A - A|^144
};
DoublingReport cfpy_doubling_check(const GroupSubset &A);
// random greedy growth keeping x, 2x, 4x, 8x out of A - A for x != 0
GroupSubset grow_chain_free(const GroupPtr &G, size_t target, Stream &rng);
// random greedy growth keeping A free of the given 3-AP pattern
GroupSubset grow_ap_free(const GroupPtr &G, size_t target, ApMode mode, Stream &rng);

// ---------------------------------------------------------------- local Roth

struct RothOptions {
  size_t exact_h = 200; // extremal 3-AP-free search when |H| is at most this
  size_t exact_b0 = 40; // extremal corner-free search when |B0| is at most this
  uint64_t node_budget = 2000000;
  SubstructOptions near;
};

struct ExtremalSize {
  bool ran = false, exact = false;
  size_t points = 0, best = 0; // best is a lower bound unless exact
  uint64_t nodes = 0;
};

struct RothReport {
  ApMode mode = ApMode::translational;
  ApCheck pattern;
  size_t a = 0, quotient = 0, square = 0; // |A|, |A A^-1|, |A^2|
  double doubling = 0; // |A A^-1|/|A| or |A^2|/|A|
  NearResult near;
  // translational
  size_t h_order = 0, piece = 0;
  long double density = 0;
  bool piece_free = false;
  ExtremalSize ap_free_max; // largest translational 3-AP-free subset of H
  // averaging
  size_t b0 = 0;
  std::vector<Cell> S;
  CornerCheck corner;
  long double corner_density = 0; // |S| / |B0|^2
  ExtremalSize corner_free_max;   // largest corner-free subset of B0 x B0
};
RothReport local_roth_experiment(const GroupSubset &A, ApMode mode, const RothOptions &opt = {});

// exhaustive maximum of translational 3-AP-free subsets of the given points
ExtremalSize max_ap_free(const GroupPtr &G, const std::vector<Id> &points, uint64_t budget);
ExtremalSize max_corner_free(const GroupPtr &G, const std::vector<Id> &B, uint64_t budget);

} // namespace grpcomb
