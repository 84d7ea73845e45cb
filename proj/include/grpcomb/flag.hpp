#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grpcomb/exact.hpp"
#include "grpcomb/field.hpp"
#include "grpcomb/linalg.hpp"

namespace grpcomb {

// cached ring embedding of `from` into `to` (identity map when equal)
const std::vector<Elt> &field_embedding(const FieldPtr &from, const FieldPtr &to);
Mat embed_mat(const Mat &x, const FieldPtr &from, const FieldPtr &to);

// Chain {0} = V_0 < V_1 < ... < V_m = F^d with an adapted basis: the
// first dim V_i columns of basis() span V_i.
class Flag {
public:
  Flag() = default;
  Flag(FieldPtr F, int d, std::vector<Subspace> chain);
  static Flag trivial(FieldPtr F, int d);
  // span(e_1) < span(e_1, e_2) < ...
  static Flag standard_complete(FieldPtr F, int d);

  const FieldPtr &field() const { return field_; }
  int d() const { return d_; }
  int length() const { return int(chain_.size()) - 1; }
  const std::vector<Subspace> &chain() const { return chain_; }
  const Subspace &V(int i) const { return chain_[i]; }
  int block_dim(int b) const { return off_[b + 1] - off_[b]; }
  int block_offset(int b) const { return off_[b]; }
  std::vector<int> block_dims() const;
  bool complete() const { return length() == d_; }
  long pdim() const;

  const Mat &basis() const { return basis_; }
  // basis^-1 x basis, block upper triangular iff x stabilizes the flag
  Mat adapted(const Mat &x) const;
  bool stabilizes(const Mat &x) const;
  // action of x on V_{b+1}/V_b in adapted coordinates
  Mat block(const Mat &x, int b) const;
  std::vector<Elt> vtr(const Mat &x) const;
  // sum over blocks of (dim of the block image of span(mats)) - 1
  long fdim(const std::vector<Mat> &mats) const;

  // inner chain of subspaces of F^{d_b} (block coordinates), 0 and full included
  Flag refine(int b, const std::vector<Subspace> &inner) const;
  Flag lift(const FieldPtr &E) const;
  std::string signature() const;

  bool operator==(const Flag &o) const
  { return d_ == o.d_ && field_ == o.field_ && chain_ == o.chain_; }

private:
  FieldPtr field_;
  int d_ = 0;
  std::vector<Subspace> chain_;
  std::vector<int> off_;
  Mat basis_, basis_inv_;
};

// monic characteristic polynomial, coefficients low to high (Hessenberg)
std::vector<Elt> charpoly(const Field &F, const Mat &a);
Elt poly_eval(const Field &F, const std::vector<Elt> &p, Elt x);

struct EigenStats {
  FieldPtr E;         // smallest extension where the charpoly splits
  int degree = 1;     // [E : F]
  int m = 0;          // largest eigenspace dimension
  Elt lambda = 0;     // eigenvalue (in E) attaining m, smallest id on ties
  struct Root {
    Elt value;
    int algebraic, geometric;
  };
  std::vector<Root> roots; // ascending value
};
constexpr int kMaxExtension = 6;
EigenStats eigen_stats(const FieldPtr &F, const Mat &a, int cap = kMaxExtension);

struct CentralizerFlag {
  Flag flag; // over eig.E
  EigenStats eig;
  std::vector<Mat> centralizer_basis; // over the base field
  bool centralizer_stabilizes = true;
  bool exhaustive = false;            // every element of C(a) was checked
  Inequality bound;                   // pdim <= d m(a) - 1
};
CentralizerFlag centralizer_flag(const FieldPtr &F, const Mat &a, int cap = kMaxExtension);

// base + span(dirs) inside Mat_d; dirs is a reduced basis of flattened matrices
class AffineSubspace {
public:
  AffineSubspace() = default;
  AffineSubspace(FieldPtr F, int d, Mat base, Subspace dirs);
  static AffineSubspace whole(FieldPtr F, int d);
  static AffineSubspace point(FieldPtr F, const Mat &x);
  // affine hull of a nonempty list
  static AffineSubspace hull(FieldPtr F, const std::vector<Mat> &pts);
  // {x : tr x = t}
  static AffineSubspace trace_slice(FieldPtr F, int d, Elt t);

  const FieldPtr &field() const { return field_; }
  int d() const { return d_; }
  const Mat &base() const { return base_; }
  const Subspace &dirs() const { return dirs_; }
  int dim() const { return dirs_.rows; }
  std::vector<Mat> direction_mats() const;
  bool contains(const Mat &x) const;
  // linear span of the points
  Subspace span() const;
  int span_dim() const { return span().rows; }
  // canonical base point (reduced against the directions)
  AffineSubspace canonical() const;
  // i-th point under a mixed-radix enumeration of coefficients
  Mat point_at(uint64_t index) const;
  // number of points, saturating at 2^63
  uint64_t size() const;

  AffineSubspace left_mul(const Mat &a) const;  // aV
  AffineSubspace right_mul(const Mat &a) const; // Va
  std::optional<AffineSubspace> intersect(const AffineSubspace &o) const;
  AffineSubspace lift(const FieldPtr &E) const;

  bool operator==(const AffineSubspace &o) const;

private:
  FieldPtr field_;
  int d_ = 0;
  Mat base_;
  Subspace dirs_;
};

// some invertible point: exhaustive up to `budget` points, seeded sampling beyond
std::optional<Mat> find_invertible(const AffineSubspace &V, uint64_t budget = 4096,
                                   uint64_t seed = 0);

enum class Side { left, right };
// left: {x : xW in V}; right: {x : Wx in V}; empty when no such x
std::optional<AffineSubspace> transporter_space(const AffineSubspace &W,
                                                const AffineSubspace &V, Side side);

struct Subalgebra {
  FieldPtr F;
  int d = 0;
  Subspace basis; // flattened
  std::vector<Mat> mats() const;
  bool closed() const; // all basis products lie in the span
  bool contains(const Mat &x) const;
};

struct TransporterReport {
  Side side = Side::left;
  std::optional<AffineSubspace> X;
  bool w_invertible = false;
  Inequality dim_bound; // dim X <= dim V
  bool equality = false;
  std::optional<Subalgebra> U;
  bool closed = false;        // U is a subalgebra
  bool group_sampled = false; // products of sampled invertible points of 1+U stay in 1+U
  bool w_inside = false;      // W in a(1+U) (left) or (1+U)a (right)
  bool v_contains = false;    // b(1+U) (left) or (1+U)b (right) inside V
  Mat a, b;
};
TransporterReport transporter(const AffineSubspace &W, const AffineSubspace &V, Side side,
                              uint64_t seed = 0);

struct FrobeniusReport {
  bool hypothesis = true;
  Mat witness_v, witness_w; // tr(vw) != t
  int span_v = 0, span_w = 0;
  Inequality bound; // span_v + span_w <= d^2 + 1
};
FrobeniusReport frobenius_orthogonality_check(const AffineSubspace &V, const AffineSubspace &W,
                                              Elt t);

// span of the unital algebra generated by gens, flattened
Subspace algebra_span(const Field &F, int d, const std::vector<Mat> &gens);
// smallest subspace containing v invariant under gens
Subspace spin(const Field &F, const std::vector<Mat> &gens, const std::vector<Elt> &v);
bool is_invariant(const Field &F, const std::vector<Mat> &gens, const Subspace &U);

struct InvariantResult {
  bool irreducible = false;
  bool absolutely_irreducible = false;
  Subspace sub;
  int algebra_dim = 0;
  std::string certificate;
};
InvariantResult invariant_subspace(const FieldPtr &F, int d, const std::vector<Mat> &gens,
                                   uint64_t seed = 0);
// every invariant subspace, by closure over all lines; small cases only
std::vector<Subspace> all_invariant_subspaces(const Field &F, int d,
                                              const std::vector<Mat> &gens);

// refines F until every block carries the full matrix algebra; extends the
// field when a block is irreducible but not absolutely so
Flag maximal_invariant_flag(const Flag &F, const std::vector<Mat> &algebra_gens,
                            uint64_t seed = 0, int cap = kMaxExtension);

struct SubalgFlagReport {
  Flag G;
  long fdim_u = 0;
  bool span_inside = false; // span U inside the stabilizer of G
  Inequality bound;         // pdim(G)^2 den <= num pdim(F)^2
};
SubalgFlagReport subalg_to_flag(const Subalgebra &U, const Flag &F, const BigInt &rho_num,
                                const BigInt &rho_den, uint64_t seed = 0);

struct RankReport {
  int rk_x = 0, rk_y = 0, rk_sum = 0;
  int im_sum = 0;   // dim(im x + im y)
  int ker_meet = 0; // dim(ker x n ker y)
  int rk_pi_x = 0, rk_x_iota = 0, rk_pi_x_iota = 0;
  Inequality lemma;     // im_sum + (d - ker_meet) <= rk x + rk y + rk(x+y)
  Inequality cor_left;  // 2 rk(pi x iota) <= rk(pi x) + rk(x iota)
  Inequality cor_right; // rk(pi x) + rk(x iota) <= rk(x+y) + rk x - rk y
};
RankReport rank_inequality_check(const Field &F, const Mat &x, const Mat &y);

struct MatrixSet {
  FieldPtr F;
  int d = 0;
  std::vector<Mat> mats;
};
MatrixSet read_matrix_set(const std::string &path);
void write_matrix_set(const std::string &path, const MatrixSet &s);
MatrixSet parse_matrix_set(const std::string &text);
std::string format_matrix_set(const MatrixSet &s);

} // namespace grpcomb
