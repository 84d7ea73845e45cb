#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "grpcomb/approx.hpp"
#include "grpcomb/exact.hpp"
#include "grpcomb/extract.hpp"
#include "grpcomb/flag.hpp"
#include "grpcomb/group.hpp"

namespace grpcomb {

// Matrices of one MatrixGroup pushed through a tower of field extensions.
// Every flag handed to the pipeline lives over field(); extending the
// tower keeps matrix embeddings consistent with Flag::lift.
class Embedder {
public:
  explicit Embedder(const GroupPtr &G);
  const MatrixGroup &group() const { return *G_; }
  const GroupPtr &group_ptr() const { return ptr_; }
  const FieldPtr &field() const { return tower_.back(); }
  const std::vector<FieldPtr> &tower() const { return tower_; }
  int dim() const { return G_->dim(); }
  const Mat &operator()(Id a) const;
  // base-field matrix through the tower
  Mat lift(const Mat &x) const;
  void extend(const FieldPtr &E);

private:
  GroupPtr ptr_;
  const MatrixGroup *G_;
  std::vector<FieldPtr> tower_;
  mutable std::unordered_map<Id, Mat> cache_;
};

// A centered set with its square and an operational constant K (A^2 inside XA, |X| = K)
struct ApproxInput {
  GroupSubset A, A2;
  uint64_t K = 1;
};
// K = 0 takes the greedy tripling witness
ApproxInput approx_input(const GroupSubset &A, uint64_t K = 0);

// P_F as an affine space through 0
AffineSubspace parabolic_space(const Flag &F);
// {x in P_F : vtr x = t}
AffineSubspace vtr_slice(const Flag &F, const std::vector<Elt> &t);
bool affine_leq(const AffineSubspace &X, const AffineSubspace &Y);
// sum over blocks of (dim of the block image of span V) - 1
long affine_fdim(const Flag &F, const AffineSubspace &V);
AffineSubspace project_block(const Flag &F, const AffineSubspace &V, int b);
std::vector<Id> members_in(const GroupSubset &S, const Embedder &emb, const AffineSubspace &V);
std::vector<Id> members_stabilizing(const GroupSubset &S, const Embedder &emb, const Flag &F);
// every subspace of F (lifted) occurs in G
bool refines(const Flag &G, const Flag &F);

// ---------------------------------------------------------------- decrement

enum class DecrementMode { exhaustive, search, sampled };
const char *decrement_mode_name(DecrementMode m);

struct DecrementOptions {
  uint64_t tuple_cap = 1000000; // exhaustive when |A^2|^k is at most this
  uint64_t node_budget = 20000; // intersection-lattice search
  uint64_t samples = 20000;     // random tuples once the search gives up
  uint64_t seed = 0;
};

struct DecrementResult {
  DecrementMode mode = DecrementMode::exhaustive;
  int k = 0, j = 0;
  AffineSubspace W;
  std::vector<Id> translators; // W is the intersection of a^-1 V over these
  size_t n = 0, in_v = 0, in_w = 0, in_x = 0;
  bool certified = false;
  Inequality product;  // (eta/2K)^k <= (in_w/n)(in_x/n)^(k-j)
  Inequality dim_drop; // j - 1 <= dim V - dim W
  // exhaustive mode
  BigInt tuple_sum = 0, closed_form = 0, best_mask_sum = 0;
  bool identity_holds = false; // tuple_sum == sum_b |A^2 b n V|^k
  Inequality averaging;        // (eta/K)^k n^(k+1) <= tuple_sum
  Inequality pigeonhole;       // (eta/2K)^k n^(k+1) <= best_mask_sum
  uint64_t tuples = 0, nodes = 0;
  int translates = 0;
};

// V inside P_F proper, meeting A^2; k >= 1
DecrementResult dimension_decrement(const ApproxInput &in, const Embedder &emb, const Flag &F,
                                    const AffineSubspace &V, int k,
                                    const DecrementOptions &opt = {});

// ---------------------------------------------------------------- escape

struct HalvingReport {
  DecrementResult step;
  std::optional<AffineSubspace> X; // Lmul(W -> V)
  bool chose_w = true;
  AffineSubspace V_prime;
  long D = 0, fdim_w = 0, fdim_x = -1, fdim_v_prime = 0;
  size_t in_v_prime = 0;
  bool frobenius_ok = true;
  Inequality sum_bound;  // fdim W + fdim X <= D
  Inequality half_bound; // 2 fdim V' <= D
  Inequality ratio;      // (eta/2K)^(d^2) <= |A^2 n V'|/|A^2|
};

struct EscapeStep {
  DecrementResult dd;
  int dim_v = 0, dim_x = -1;
  size_t in_x = 0;
  bool translate_ok = false; // X inside V w^-1
};

struct SubgroupEscape {
  std::optional<HalvingReport> halving;
  AffineSubspace start; // V, or V' after halving
  std::vector<EscapeStep> steps;
  bool degenerate = false;
  std::string note;
  bool certified = false; // every decrement step was exhaustive or complete
  Subalgebra U;
  Mat left, right;        // 1 + U inside left V right
  bool closed = false, contained = false, w_inside = false;
  size_t n = 0, in_v = 0, in_group = 0, in_w_last = 0;
  Inequality coset_bound; // |A^2 n W_last| <= K^3 |A^2 n (1+U)|
  Inequality ratio;       // eta^(d^4)/(2K)^(d^6+3) <= |A^2 n (1+U)|/|A^2|
};

// with `halve` set, V must lie in vtr_slice(F, *halve) and is first cut
// down to F-dimension at most pdim(F)/2
SubgroupEscape subspace_to_subgroup(const ApproxInput &in, const Embedder &emb, const Flag &F,
                                    const AffineSubspace &V,
                                    const std::optional<std::vector<Elt>> &halve = std::nullopt,
                                    const DecrementOptions &opt = {});

struct FlagEscape {
  SubgroupEscape escape;
  SubalgFlagReport alg;
  Flag G; // over emb.field() after the call
  long D = 0, pdim_g = 0;
  Inequality halving_pdim; // 2 pdim(G)^2 <= D^2
  bool refines = false, group_inside = false;
  size_t n = 0, in_v = 0, in_group = 0, in_hg = 0;
  Inequality ratio; // (eta/2K)^(5 d^6) <= |A^2 n H_G|/|A^2|, log scale, report only
};

// A inside H_F; extends emb to the field of the returned flag
FlagEscape subspace_to_flag(const ApproxInput &in, Embedder &emb, const Flag &F,
                            const std::vector<Elt> &t, const DecrementOptions &opt = {});

// ---------------------------------------------------------------- regular elements

enum class RegOutcome { irregular_element, subspace_pair };

struct RegStep {
  int stage = 0;
  char kind = '0'; // '0': S0 large, 'c': T0 >= T1, 'a': T1 > T0
  long double r_before = 0, r_after = 0;
  size_t s_before = 0, s_after = 0;
  int dim_u = 0, dim_n = 0;
  bool ranks_ok = false;
  Inequality size_bound; // |S|^m <= 4K |S'| |B^2|^(m-1)
};

struct RegResult {
  RegOutcome outcome = RegOutcome::subspace_pair;
  bool normalized = false;
  Id witness = 0;   // irregular element of A^2
  int witness_m = 0;
  int s = 0;
  std::vector<Elt> lambdas; // normalizing eigenvalue per element of A
  GroupPtr B_group;
  GroupSubset B, B2;
  uint64_t K = 1;
  std::vector<RegStep> steps;
  Subspace U_img, N; // im iota and ker pi
  std::vector<Id> survivors; // ids in B_group with pi (b-1) iota = 0
  AffineSubspace V;          // {x : (x-1) U_img inside N}
  std::optional<SubgroupEscape> escape;
  Subalgebra X;
  Mat c1, c2;
  bool algebra_maps = false; // X c2^-1 U_img inside c1 N
  Subspace V1, V2;
  bool pair_ok = false;      // X V2 inside V1, V1 inside V2
  std::vector<Id> members;   // of the original A^2
  std::vector<Elt> member_lambda;
  size_t count = 0;
};

// s >= 0: every element of A^2 must satisfy rk(a-1) <= s and no normalization
// happens; s < 0: eigen-normalize A first (unique eigenspace of dimension > d/2)
RegResult reg_element_search(const GroupSubset &A, int s = -1, const DecrementOptions &opt = {});
// (a - lambda) V2 inside V1
bool pair_member(const Field &F, const Mat &a, Elt lambda, const Subspace &V1,
                 const Subspace &V2);

// ---------------------------------------------------------------- iteration

struct PipelineState {
  Flag flag;
  long D = 0;
  int64_t lambda = 0;
  BigInt eps_num = 1, eps_den = 1;
};

struct GlOptions {
  uint64_t delta_den = 0; // 0: d K^12
  long double eta = 0;    // 0: max(|A|^(-eps/(10 d^6)), 1/|A^2|)
  uint64_t seed = 0;
  DecrementOptions dd;
};

struct BlockInfo {
  int dim = 0;
  std::string label; // "1", "2a", "2b"
  size_t size = 0, square = 0, scalars = 0;
  int m_a0 = 0;
};

struct IterationRecord {
  int index = 0;
  std::vector<BlockInfo> blocks;
  std::string branch; // "2a", "i", "ii"
  int refined_block = -1;
  Id a0 = 0;
  size_t n = 0, a2f = 0, b = 0, centralized = 0, conjugates = 0;
  long double eta = 0;
  std::string flag_before, flag_after;
  long pdim_before = 0, pdim_after = 0, D_next = 0;
  int64_t lambda = 0;
  std::string eps;
  size_t in_hg = 0;
  Inequality pivot, pdim_bound;
  Inequality declared; // (2K)^-lambda |A^2|^eps <= |A^2 n H_G|, report only
  bool inherited = false;          // A^2 n H_G inside H_F
  bool centralizer_inside = true;  // B^2 n C(a0) inside H_G (case ii)
  std::optional<FlagEscape> escape; // case i
};

struct IterationResult {
  PipelineState next;
  IterationRecord record;
};

IterationResult big_gl_iteration(const ApproxInput &in, Embedder &emb, const PipelineState &state,
                                 const GlOptions &opt = {}, int index = 0);

// ---------------------------------------------------------------- endgame

struct BorelResult {
  Subgroup G, commutator, H, H1, H2;
  size_t n = 0, in_commutator = 0, in_h = 0, in_h1 = 0, in_h2 = 0;
  std::vector<Id> chain1, chain2; // non-central pivots
  int lcs_length = 0;
  std::vector<Inequality> steps1, steps2;
  Inequality bound1; // |A^2| <= |A^2 n H1| (K^10 |A^2 n [G,G]|)^m
  Inequality bound2; // |A'^2| <= (K'^10 |A'^2 n H2|)^(d^2)
  Inequality hard;   // |A^2| <= (K^33 |A^2 n H|)^(d^4)
  bool abelian = false;
  std::string chosen; // "H1" or "H2"
};

// A inside H_F with F complete
BorelResult borel_abelian(const ApproxInput &in, const Embedder &emb, const Flag &F);

struct GlResult {
  int d = 0;
  uint64_t K = 1;
  size_t a = 0, a2 = 0;
  bool short_circuit = false; // d = 1
  std::vector<IterationRecord> iterations;
  std::vector<PipelineState> states; // states[0] is the trivial flag
  Flag final_flag;
  size_t a2_borel = 0;
  std::optional<BorelResult> borel;
  Subgroup H;
  size_t in_h = 0;
  bool abelian = false;
  Inequality hard;    // |A^2| <= (K^33 |A^2 n H|)^(d^4)
  Inequality theorem; // (2K)^-(lambda+102) |A^2|^(eps/d^4) <= |A^2 n H|, report only
};

GlResult gl_abelian_substruct(const GroupSubset &A, const GlOptions &opt = {});

} // namespace grpcomb
