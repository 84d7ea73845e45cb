#pragma once

#include <span>
#include <string>
#include <vector>

#include "grpcomb/group.hpp"

namespace grpcomb {

struct Subgroup {
  GroupPtr parent;
  std::vector<Id> members; // sorted, members[0] == 0
  std::vector<Id> gens;

  size_t order() const { return members.size(); }
  bool contains(Id g) const;
  bool operator==(const Subgroup &o) const { return members == o.members; }
};

Subgroup trivial_subgroup(const GroupPtr &G);
Subgroup whole_group(const GroupPtr &G);
Subgroup closure(const GroupPtr &G, std::span<const Id> gens);
// adjoin more generators to an existing subgroup
Subgroup closure_with(const Subgroup &H, std::span<const Id> extra);
// greedy small generating set of the subgroup with these members
std::vector<Id> generating_set(const GroupPtr &G, const std::vector<Id> &members);
// view as a group of its own (local ids follow parent order)
std::shared_ptr<const SubgroupGroup> as_group(const Subgroup &H);
// image of a subgroup of as_group(H) back in H's parent
Subgroup lift(const Subgroup &K, const SubgroupGroup &H);
bool is_subgroup_of(const Subgroup &K, const Subgroup &H);

Subgroup centralizer(const GroupPtr &G, std::span<const Id> target);
Subgroup centralizer_in(const Subgroup &H, std::span<const Id> target);
Subgroup center(const GroupPtr &G);
std::vector<Id> conjugacy_class(const GroupPtr &G, Id a);
// classes in ascending order of their smallest element
std::vector<std::vector<Id>> conjugacy_classes(const GroupPtr &G);
bool is_normal(const GroupPtr &G, const Subgroup &N);
// smallest normal subgroup of G containing gens
Subgroup normal_closure(const GroupPtr &G, std::span<const Id> gens);
// [H, K] for subgroups H, K of the same group
Subgroup commutator_subgroup(const Subgroup &H, const Subgroup &K);

enum class SeriesKind { derived, chief, lower_central, custom };
const char *series_name(SeriesKind k);

struct NormalSeries {
  SeriesKind kind = SeriesKind::custom;
  std::vector<Subgroup> chain; // chain[0] = G, descending
  bool reaches_trivial = false;
  std::vector<size_t> factor_orders;
  std::vector<bool> factor_abelian;
};

NormalSeries series(const GroupPtr &G, SeriesKind kind, uint64_t chief_cap = 4096);
bool is_solvable(const GroupPtr &G);
// each chief factor is minimal normal in the matching quotient
bool verify_chief(const GroupPtr &G, const NormalSeries &s);

struct QuotientMap {
  GroupPtr source;
  Subgroup normal;
  GroupPtr quotient;
  std::vector<Id> projection; // source id -> quotient id
  std::vector<Id> reps;       // quotient id -> smallest source id in the coset
};

QuotientMap quotient(const GroupPtr &G, const Subgroup &N);
Subgroup preimage(const QuotientMap &q, const Subgroup &K);

// all normal subgroups, sorted by order then members; throws past cap
std::vector<Subgroup> normal_subgroups(const GroupPtr &G, size_t cap = 5000);

Subgroup sylow(const GroupPtr &G, uint64_t p);
bool is_p_group(uint64_t order, uint64_t p);

struct PRanks {
  int r = 0; // largest elementary abelian p-subgroup rank
  int s = 0; // largest elementary abelian p-subquotient rank
};

int subgroup_p_rank(const GroupPtr &G, uint64_t p);
int sectional_p_rank(const GroupPtr &G, uint64_t p, uint64_t cap = 4096);
PRanks p_ranks(const GroupPtr &G, uint64_t p, uint64_t cap = 4096);

// minimal number of generators of a p-group: log_p |P / Frattini(P)|
int frattini_rank(const GroupPtr &P, uint64_t p);

// checks used by the rank suite; each returns an empty string on success
std::string check_sectional_subadditive(const GroupPtr &G, uint64_t p);
std::string check_sylow_reduction(const GroupPtr &G, uint64_t p);
std::string check_rank_square_bound(const GroupPtr &G, uint64_t p);

} // namespace grpcomb
