#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "grpcomb/approx.hpp"
#include "grpcomb/exact.hpp"
#include "grpcomb/structure.hpp"

namespace grpcomb {

// Ordered list of pairwise commuting elements.
struct DissociatedSet {
  GroupPtr group;
  std::vector<Id> elems;
  bool commuting = true;
};

struct DissociationCheck {
  bool commuting = true;
  bool dissociated = true;
  std::vector<int> relation; // nonzero exponents in {-1,0,1} with product 1
  uint64_t products = 0;     // products enumerated
};
constexpr size_t kMaxDissociated = 16;
// exhaustive over all 3^m sign patterns
DissociationCheck check_dissociated(const GroupPtr &G, const std::vector<Id> &elems);
// set of signed subset products; throws precondition if not commuting
GroupSubset dissociated_span(const DissociatedSet &D);

struct PivotReport {
  GroupSubset centralized; // A^2 n C(a)
  GroupSubset conjugates;  // A^3 n Conj(a)
  Inequality bound;        // |A| <= |A^2 n C(a)| |A^3 n Conj(a)|
};
// the bound is guaranteed for symmetric A; otherwise it is only reported

PivotReport pivot_split(const GroupSubset &A, Id a);

enum class Strategy { abelian, series, subgroup };
const char *strategy_name(Strategy s);

struct CommutabilityParams {
  double R = 2;
  double beta = 1.0 / 3;
  Strategy strategy = Strategy::abelian;
};

// Gamma >= G >= N with N normal in G
struct ExtractContext {
  GroupPtr ambient;
  Subgroup G;
  Subgroup N;
};

struct ExtractionStep {
  int j = 0;
  int series_index = -1;
  size_t d_size = 0;  // |D_j|
  size_t a2_in_h = 0; // |A^2 n H_j|
  size_t s_size = 0;  // |S_j|
};

struct ExtractionTrace {
  std::vector<ExtractionStep> steps;
  uint64_t K = 0;
  size_t n = 0; // |A^2 n G|
  long double claimed = 0; // the lower bound on |D|
  Inequality bound;        // claimed <= |D|
  bool hard = false;       // bound has explicit constants
};

struct ExtractResult {
  DissociatedSet D;
  ExtractionTrace trace;
  CommutabilityParams params;
};

// everything an extraction step needs; A2, A4 are cached powers of A
struct ExtractInput {
  ExtractContext ctx;
  GroupSubset A, A2, A4, S;
  uint64_t K = 0;
};

// a strategy for finding commuting dissociated sets in A^4 n G
class Extractor {
public:
  virtual ~Extractor() = default;
  virtual CommutabilityParams params() const = 0;
  // true when the size floor is proved for this strategy with explicit constants
  virtual bool hard_bound() const = 0;
  virtual ExtractResult run(const ExtractInput &in) const = 0;
};
using ExtractorPtr = std::shared_ptr<const Extractor>;

// normal series G = G_0 >= ... >= G_s = N, each term normal in G
using SeriesProvider = std::function<std::vector<Subgroup>(const ExtractContext &)>;
// subgroup N <= H' <= G whose quotient by N belongs to the inner class
using SubgroupFinder = std::function<Subgroup(const ExtractContext &, const GroupSubset &A)>;

ExtractorPtr abelian_extractor();
ExtractorPtr series_extractor(ExtractorPtr inner, SeriesProvider provider = {});
ExtractorPtr subgroup_extractor(ExtractorPtr inner, double C, double eps,
                                SubgroupFinder finder = {});
// derived series of G pushed through N (G^(i) N), ending at N
std::vector<Subgroup> relative_derived_series(const ExtractContext &ctx);
// chief series of G/N lifted to G
std::vector<Subgroup> relative_chief_series(const ExtractContext &ctx);
// greedy T in A^2 n G with pairwise commutators in N, returns <T, N>
Subgroup commuting_mod_finder(const ExtractContext &ctx, const GroupSubset &A);
// abelian, derived series over abelian, or chief series over the subgroup step
ExtractorPtr default_extractor(const Subgroup &G);

// Checks preconditions (A centered, A^4 n N inside S, S centralizes G) and
// runs the strategy. K defaults to the greedy witness size of A.
ExtractResult commutable_extract(const ExtractContext &ctx, const GroupSubset &A,
                                 const GroupSubset &S, const Extractor &strategy,
                                 uint64_t K = 0);

// D inside A^4 n G, commuting, dissociated, dspan(D) n S = {1}; "" when fine
std::string verify_extraction(const ExtractContext &ctx, const GroupSubset &A,
                              const GroupSubset &S, const std::vector<Id> &D);
// no x in A^4 n C_G(D) can be added to D; skipped (checked = false) past limit
std::string check_extraction_maximal(const ExtractContext &ctx, const GroupSubset &A,
                                     const GroupSubset &S, const std::vector<Id> &D,
                                     bool *checked = nullptr, size_t limit = 500);

// maximal commuting dissociated subset of `candidates` with span meeting S
// only in 1, built greedily in ascending id order and extending `start`
std::vector<Id> greedy_dissociated(const GroupPtr &G, const std::vector<Id> &candidates,
                                   const GroupSubset &S, std::vector<Id> start = {});

struct SubstructResult {
  Subgroup H;
  GroupSubset a4_in_h;
  std::vector<Id> D, Dprime;
  int t = 0;
  uint64_t L = 0;
  Inequality dissociated_floor; // 2^|D'| <= |A^4 n H|
  bool certified = false;
  struct Attempt {
    int t;
    size_t core, d, dprime, a4h;
  };
  std::vector<Attempt> sweep;
};
struct SubstructOptions {
  int t_min = 2, t_max = 6;
  uint64_t budget = 20000;
  ExtractorPtr extractor; // default_extractor of <A> when empty
};
SubstructResult abelian_substruct(const GroupSubset &A, const SubstructOptions &opt = {});

struct PyberStep {
  int j;
  int derived_index;
  int m;
  size_t i_order, h_order;
};
struct PyberResult {
  Subgroup I;
  std::vector<PyberStep> steps;
  bool abelian_verified = false;
  Inequality bound; // exp(1/2 (ln n)^(1/3)) <= |I|
};
PyberResult pyber_solvable_abelian(const GroupPtr &G);

enum class NearMode { translate, two_sided };
struct NearResult {
  NearMode mode = NearMode::translate;
  Subgroup H;
  Id g = 0;
  GroupSubset piece; // A_0 (translate) or B_0 (two-sided)
  double K = 0;
  size_t piece_doubling_num = 0; // |piece piece^-1|
  size_t hits = 0;               // two-sided: #{(x,y): x g y in A}
  double empirical_exponent = 0; // log(|piece piece^-1| / |piece|) / log(2K)
  double hit_exponent = 0;        // two-sided: log(|B_0|^2 / hits) / log(2K)
  bool certified = false;
  SubstructResult substruct;
};
NearResult abelian_struct_near(const GroupSubset &A, NearMode mode,
                               const SubstructOptions &opt = {});

} // namespace grpcomb
