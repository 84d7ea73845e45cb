#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "grpcomb/approx.hpp"
#include "grpcomb/exact.hpp"
#include "grpcomb/group.hpp"

namespace grpcomb {

// squaring: class of x joined to class of x^2 for x of odd order;
// smallest_prime: class of x joined to class of x^q, q the smallest prime
// not dividing ord(x)
enum class PairingMode { squaring, smallest_prime };
const char *pairing_mode_name(PairingMode m);
PairingMode parse_pairing_mode(const std::string &s);

uint64_t smallest_prime_not_dividing(uint64_t m);

struct PairingGraph {
  GroupPtr G;
  PairingMode mode = PairingMode::squaring;
  // vertex v = inverse class, ordered by smallest member
  std::vector<std::vector<Id>> classes;
  std::vector<int> class_of;  // per element, -1 for the identity
  std::vector<int> next;      // class of the q-th power, -1 when there is no edge
  std::vector<uint32_t> q;    // exponent used at each vertex (0 when no edge)
  std::vector<std::pair<int, int>> edges; // u < v, sorted; self-loops excluded
  std::vector<int> loops;                 // vertices carrying a self-loop
  std::vector<std::pair<int, int>> matching;
  std::vector<int> mate;        // -1 when unmatched
  std::vector<int> match_edge;  // index into matching, -1 when unmatched
  size_t cycles = 0, isolated = 0; // components: cycles of length >= 2, isolated vertices
  bool maximal = false;            // no edge with both ends free
  std::string structure_error;     // empty when the decomposition checks out
  size_t vertices() const { return classes.size(); }
};

// |G| >= 2
PairingGraph build_pairing(const GroupPtr &G, PairingMode mode);

struct ConnectionSample {
  uint64_t seed = 0;
  std::vector<char> chosen; // per vertex of the pairing graph
  std::vector<Id> S;        // sorted
};

// coin per unmatched vertex keyed by (seed, vertex), endpoint choice per
// matched edge keyed by (seed, edge index)
ConnectionSample sample_connection(const PairingGraph &P, uint64_t seed);
// uniform symmetric set: one fair coin per class, matching ignored
ConnectionSample sample_uniform(const PairingGraph &P, uint64_t seed);
// symmetry, 1 outside S, atomic classes and matched-edge exclusivity;
// returns the first violation or an empty string
std::string check_sample(const PairingGraph &P, const ConnectionSample &s);

// x ~ y iff x^-1 y in S
class CayleyGraph {
public:
  CayleyGraph(GroupPtr G, const std::vector<Id> &S);
  const GroupPtr &group() const { return G_; }
  const std::vector<Id> &connection() const { return S_; }
  bool in_s(Id g) const { return mark_[g]; }
  bool adjacent(Id x, Id y) const { return mark_[G_->mul(G_->inv(x), y)]; }
  size_t order() const { return G_->order(); }

private:
  GroupPtr G_;
  std::vector<Id> S_;
  std::vector<char> mark_;
};

struct SetCheck {
  size_t quotient_size = 0; // |A A^-1|
  bool clique = false, independent = false;
};
SetCheck check_set(const CayleyGraph &g, const GroupSubset &A);

struct CliqueNumbers {
  int clique = 0, independence = 0;
  std::vector<Id> clique_set, independent_set; // both contain the identity
  uint64_t nodes = 0;
};

// exact branch and bound with a greedy colouring bound; the identity is fixed
// in the set since left translation is an automorphism
CliqueNumbers clique_numbers(const CayleyGraph &g, size_t cap = 2000);

enum class ChainMode { doubling, prime };
const char *chain_mode_name(ChainMode m);

struct ChainWitness {
  Id x = 0;
  uint32_t order = 0, q = 0;
  std::array<Id, 4> chain{}; // x, x^q, x^(q^2), x^(q^3)
};

// doubling: x != 1, gcd(ord x, 6) = 1, x, x^2, x^4, x^8 in D;
// prime: ord x does not divide 24, q smallest prime not dividing ord x
// and x, x^q, x^(q^2), x^(q^3) in D. D must be symmetric.
std::vector<ChainWitness> pattern_detect(const GroupSubset &D, ChainMode mode);
ChainMode chain_for(PairingMode m);
// m not dividing 24 implies m does not divide q^2 - 1; true when the
// implication holds for m
bool prime_square_check(uint64_t m);

struct MonochromeEstimate {
  size_t classes = 0; // inverse classes met by A A^-1 minus 1
  bool edge_free = false; // no matched edge has both ends in A A^-1
  uint64_t samples = 0, cliques = 0, independents = 0;
  long double predicted = 0; // 2^(1 - classes)
  long double observed = 0, sigma = 0, z = 0;
};
// sample seeds base, base+1, ...; A A^-1 must avoid both ends of every matched edge
MonochromeEstimate monochrome_estimate(const PairingGraph &P, const GroupSubset &A,
                                       uint64_t samples, uint64_t base_seed, int threads = 1);

struct RamseyOptions {
  int trials = 10;
  PairingMode mode = PairingMode::squaring;
  bool baseline = false;
  uint64_t seed = 0;
  int threads = 1;
  double threshold = 6.0; // flag trials with max > threshold * log2 |G|
  size_t cap = 2000;
  int count_n = 3;            // subset size for the small-set count
  double count_k = 2.0;       // count n-sets with |A A^-1| <= count_k * n
  uint64_t count_budget = 2000000; // skip the count beyond this many sets
};

struct TrialRecord {
  int trial = 0;
  uint64_t seed = 0;
  size_t s = 0;
  int clique = 0, independence = 0, max = 0;
  double ratio = 0; // max / log2 |G|
  std::string sample_error;
  bool avoidance_ok = true;
  std::vector<ChainWitness> offending;
  bool within_threshold = true;
  // uniform baseline on the same trial key
  int base_clique = 0, base_independence = 0, base_max = 0;
};

struct SmallSetCount {
  bool ran = false;
  int n = 0;
  double K = 0;
  uint64_t with_identity = 0; // n-sets through 1 with small quotient set
  BigInt total = 0;           // all such n-sets: |G| with_identity / n
  long double log_bound = 0;  // natural log of N^(C(K + ln n)) (2^C K)^n, C = 6000
  bool within_bound = true;
};

struct RamseyReport {
  std::string group;
  size_t N = 0;
  PairingMode mode = PairingMode::squaring;
  size_t vertices = 0, edges = 0, loops = 0, matched = 0;
  std::vector<TrialRecord> trials;
  int worst = 0;
  double worst_ratio = 0, mean_max = 0, mean_base_max = 0;
  size_t avoidance_failures = 0, threshold_failures = 0, sample_failures = 0;
  SmallSetCount count;
};

RamseyReport ramsey_experiment(const GroupPtr &G, const RamseyOptions &opt);
std::string ramsey_csv(const RamseyReport &r);

} // namespace grpcomb
