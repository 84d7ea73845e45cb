#pragma once

#include <array>
#include <vector>

#include "grpcomb/exact.hpp"
#include "grpcomb/group.hpp"
#include "grpcomb/rng.hpp"
#include "grpcomb/structure.hpp"

namespace grpcomb {

// Sorted, duplicate-free set of element ids of one group.
class GroupSubset {
public:
  GroupSubset() = default;
  GroupSubset(GroupPtr g, std::vector<Id> ids);
  static GroupSubset of(const Subgroup &H) { return GroupSubset(H.parent, H.members); }

  const GroupPtr &group() const { return g_; }
  const std::vector<Id> &ids() const { return ids_; }
  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(Id x) const;
  bool symmetric() const { return symmetric_; }
  bool centered() const { return symmetric_ && !ids_.empty() && ids_[0] == 0; }
  bool operator==(const GroupSubset &o) const { return ids_ == o.ids_; }
  bool subset_of(const GroupSubset &o) const;

private:
  GroupPtr g_;
  std::vector<Id> ids_;
  bool symmetric_ = false;
};

GroupSubset product(const GroupSubset &A, const GroupSubset &B);
// A^k, k >= 1, by repeated squaring
GroupSubset power(const GroupSubset &A, int k);
GroupSubset inverse(const GroupSubset &A);
GroupSubset set_union(const GroupSubset &A, const GroupSubset &B);
GroupSubset set_intersect(const GroupSubset &A, const GroupSubset &B);
GroupSubset intersect(const GroupSubset &A, const Subgroup &H);
// A u A^-1 u {1}
GroupSubset centered_hull(const GroupSubset &A);
GroupSubset translate_left(Id g, const GroupSubset &A);

GroupSubset random_subset(const GroupPtr &G, size_t size, Stream &rng);
// centered set built from `classes` random inverse pairs
GroupSubset random_centered(const GroupPtr &G, size_t classes, Stream &rng);

// Greedy X with `big` inside XA: scan big in ascending order and, for each
// element y not yet covered, add y a0^-1 (a0 the smallest member of A).
std::vector<Id> cover_witness(const GroupSubset &big, const GroupSubset &A);

struct TriplingStats {
  size_t a = 0, a2 = 0, a3 = 0, aainv = 0;
  double k2 = 0, k3 = 0;
  std::vector<Id> witness; // A^2 inside witness * A
  uint64_t K() const { return witness.size(); }
};
TriplingStats tripling_stats(const GroupSubset &A);

struct RuzsaReport {
  Inequality triangle; // |A||B^-1 C| <= |AB||AC|
  std::vector<Id> cover; // Y with A inside Y B B^-1
  Inequality cover_size; // |Y||B| <= |AB|
  bool cover_contains = false;
};
RuzsaReport triangle_and_cover(const GroupSubset &A, const GroupSubset &B,
                               const GroupSubset &C);

struct IntersectionReport {
  uint64_t K = 0; // operational constant of A
  size_t a2h = 0, akh = 0;
  std::vector<Id> witness; // (A^2 n H)^2 inside witness (A^2 n H)
  bool witness_covers = false;
  Inequality witness_size;  // |witness| <= K^3
  Inequality power_bound;   // |A^k n H| <= K^(k-1) |A^2 n H|
  bool holds() const { return witness_covers && witness_size.holds && power_bound.holds; }
};
// A must be centered; witness of A is taken from tripling_stats unless given
IntersectionReport subgroup_intersection_stats(const GroupSubset &A, const Subgroup &H, int k,
                                               const std::vector<Id> *witness = nullptr);

struct FiberReport {
  bool freiman_ok = true;
  bool exhaustive = true;
  std::array<Id, 6> violation{}; // x1 x2 x3 = y1 y2 y3 with differing images
  uint64_t K = 0;
  size_t a2 = 0, a6 = 0, a2_in = 0, a6_in = 0, image = 0, image_in = 0;
  Inequality left;  // K^-4 |A^2 n phi^-1 S| / |A^2| <= |phi(A^2) n S| / |phi(A^2)|
  Inequality right; // |phi(A^2) n S| / |phi(A^2)| <= |A^6 n phi^-1 S| / |A^2|
  bool holds() const { return freiman_ok && left.holds && right.holds; }
};
// phi is a table on all ids of A's group with values in `target`; S is a set
// of target ids. Exhaustive Freiman check when |A^2| <= exhaustive_limit.
FiberReport freiman_fiber_check(const GroupSubset &A, const std::vector<Id> &phi,
                                const GroupPtr &target, const std::vector<Id> &S,
                                size_t exhaustive_limit = 300, uint64_t seed = 0);

enum class CoreMode { nice_set, sanders_core };

struct CoreSearchOptions {
  CoreMode mode = CoreMode::nice_set;
  int n_max = 3;            // nice-set: powers checked
  int t = 2;                // sanders-core: exponent
  uint64_t budget = 200000; // set-product evaluations for the heuristic search
};

struct CoreSearchResult {
  GroupSubset set;
  bool certified = false;  // every required property verified
  bool exhaustive = false; // exhaustive search ran to completion
  std::vector<Inequality> checks;
  uint64_t evaluations = 0;
};
CoreSearchResult structured_core_search(const GroupSubset &A, const CoreSearchOptions &opt);

} // namespace grpcomb
