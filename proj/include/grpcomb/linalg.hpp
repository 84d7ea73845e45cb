#pragma once

#include <optional>
#include <vector>

#include "grpcomb/field.hpp"

namespace grpcomb {

// Dense matrix over a Field (the field is passed to each operation).
struct Mat {
  int rows = 0, cols = 0;
  std::vector<Elt> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), 0) {}

  Elt &operator()(int i, int j) { return a[size_t(i) * cols + j]; }
  Elt operator()(int i, int j) const { return a[size_t(i) * cols + j]; }

  bool operator==(const Mat &o) const
  { return rows == o.rows && cols == o.cols && a == o.a; }
  bool operator<(const Mat &o) const
  {
    if (rows != o.rows)
      return rows < o.rows;
    if (cols != o.cols)
      return cols < o.cols;
    return a < o.a;
  }

  std::vector<Elt> row(int i) const
  { return {a.begin() + size_t(i) * cols, a.begin() + size_t(i + 1) * cols}; }
  void append_row(const std::vector<Elt> &r);
  bool is_zero() const;
};

Mat identity(int d);
Mat scalar_mat(int d, Elt s);
Mat mat_mul(const Field &F, const Mat &x, const Mat &y);
Mat mat_add(const Field &F, const Mat &x, const Mat &y);
Mat mat_sub(const Field &F, const Mat &x, const Mat &y);
Mat mat_scale(const Field &F, Elt s, const Mat &x);
Mat transpose(const Mat &x);
Mat vstack(const Mat &x, const Mat &y);
Elt trace(const Field &F, const Mat &x);
std::vector<Elt> mat_vec(const Field &F, const Mat &x, const std::vector<Elt> &v);
Mat apply_map(const Mat &x, const std::vector<Elt> &map);

// Reduced row echelon form in place; returns the pivot columns.
std::vector<int> rref(const Field &F, Mat &m);
int rank(const Field &F, Mat m);
// basis (as rows, reduced) of the row space
Mat row_basis(const Field &F, Mat m);
// basis (rows) of {v : m v = 0}
Mat kernel(const Field &F, const Mat &m);
Elt det(const Field &F, Mat m);
std::optional<Mat> inverse(const Field &F, const Mat &m);
// some x with m x = b, if any
std::optional<std::vector<Elt>> solve(const Field &F, const Mat &m,
                                      const std::vector<Elt> &b);

// Subspaces of F^n are stored as Mat with `cols == n` whose rows are a
// reduced echelon basis, so equal subspaces compare equal.
using Subspace = Mat;

Subspace zero_space(int n);
Subspace full_space(int n);
Subspace span_rows(const Field &F, const Mat &rows);
Subspace space_sum(const Field &F, const Subspace &u, const Subspace &v);
Subspace space_intersect(const Field &F, const Subspace &u, const Subspace &v);
bool space_contains(const Field &F, const Subspace &u, const std::vector<Elt> &v);
bool space_leq(const Field &F, const Subspace &u, const Subspace &v);
// {x : u.x = 0 for all rows u}
Subspace annihilator(const Field &F, const Subspace &u);
// m(U) and {v : m v in U}
Subspace image_of(const Field &F, const Mat &m, const Subspace &u);
Subspace preimage_of(const Field &F, const Mat &m, const Subspace &u);
inline int dim(const Subspace &u) { return u.rows; }

// flattening of square matrices to vectors of length d^2 (row-major)
std::vector<Elt> flatten(const Mat &x);
Mat unflatten(const std::vector<Elt> &v, int d);

} // namespace grpcomb
