#include "grpcomb/error.hpp"
#include "grpcomb/linalg.hpp"

namespace grpcomb {

void Mat::append_row(const std::vector<Elt> &r)
{
  if (rows == 0 && cols == 0)
    cols = int(r.size());
  require(int(r.size()) == cols, ErrorCode::invalid_argument, "row width");
  a.insert(a.end(), r.begin(), r.end());
  ++rows;
}

bool Mat::is_zero() const
{
  for (Elt v : a)
    if (v)
      return false;
  return true;
}

Mat identity(int d) { return scalar_mat(d, 1); }

Mat scalar_mat(int d, Elt s)
{
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    m(i, i) = s;
  return m;
}

Mat mat_mul(const Field &F, const Mat &x, const Mat &y)
{
  require(x.cols == y.rows, ErrorCode::invalid_argument, "shape mismatch");
  Mat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int l = 0; l < x.cols; ++l) {
      Elt v = x(i, l);
      if (!v)
        continue;
      for (int j = 0; j < y.cols; ++j)
        r(i, j) = F.add(r(i, j), F.mul(v, y(l, j)));
    }
  return r;
}

Mat mat_add(const Field &F, const Mat &x, const Mat &y)
{
  require(x.rows == y.rows && x.cols == y.cols, ErrorCode::invalid_argument,
          "shape mismatch");
  Mat r = x;
  for (size_t i = 0; i < r.a.size(); ++i)
    r.a[i] = F.add(x.a[i], y.a[i]);
  return r;
}

Mat mat_sub(const Field &F, const Mat &x, const Mat &y)
{
  require(x.rows == y.rows && x.cols == y.cols, ErrorCode::invalid_argument,
          "shape mismatch");
  Mat r = x;
  for (size_t i = 0; i < r.a.size(); ++i)
    r.a[i] = F.sub(x.a[i], y.a[i]);
  return r;
}

Mat mat_scale(const Field &F, Elt s, const Mat &x)
{
  Mat r = x;
  for (auto &v : r.a)
    v = F.mul(s, v);
  return r;
}

Mat transpose(const Mat &x)
{
  Mat r(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j)
      r(j, i) = x(i, j);
  return r;
}

Mat vstack(const Mat &x, const Mat &y)
{
  if (x.rows == 0 && x.cols == 0)
    return y;
  if (y.rows == 0 && y.cols == 0)
    return x;
  require(x.cols == y.cols, ErrorCode::invalid_argument, "vstack width");
  Mat r = x;
  r.a.insert(r.a.end(), y.a.begin(), y.a.end());
  r.rows += y.rows;
  return r;
}

Elt trace(const Field &F, const Mat &x)
{
  Elt t = 0;
  for (int i = 0; i < std::min(x.rows, x.cols); ++i)
    t = F.add(t, x(i, i));
  return t;
}

std::vector<Elt> mat_vec(const Field &F, const Mat &x, const std::vector<Elt> &v)
{
  std::vector<Elt> r(x.rows, 0);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j)
      r[i] = F.add(r[i], F.mul(x(i, j), v[j]));
  return r;
}

Mat apply_map(const Mat &x, const std::vector<Elt> &map)
{
  Mat r = x;
  for (auto &v : r.a)
    v = map[v];
  return r;
}

std::vector<int> rref(const Field &F, Mat &m)
{
  std::vector<int> piv;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int sel = -1;
    for (int i = r; i < m.rows; ++i)
      if (m(i, c)) {
        sel = i;
        break;
      }
    if (sel < 0)
      continue;
    if (sel != r)
      for (int j = 0; j < m.cols; ++j)
        std::swap(m(sel, j), m(r, j));
    Elt s = F.inv(m(r, c));
    for (int j = c; j < m.cols; ++j)
      m(r, j) = F.mul(m(r, j), s);
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || !m(i, c))
        continue;
      Elt f = F.neg(m(i, c));
      for (int j = c; j < m.cols; ++j)
        if (m(r, j))
          m(i, j) = F.add(m(i, j), F.mul(f, m(r, j)));
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

int rank(const Field &F, Mat m) { return int(rref(F, m).size()); }

Mat row_basis(const Field &F, Mat m)
{
  int r = int(rref(F, m).size());
  m.a.resize(size_t(r) * m.cols);
  m.rows = r;
  return m;
}

Mat kernel(const Field &F, const Mat &m)
{
  Mat e = m;
  auto piv = rref(F, e);
  std::vector<int> is_piv(m.cols, -1);
  for (size_t i = 0; i < piv.size(); ++i)
    is_piv[piv[i]] = int(i);
  Mat k(0, m.cols);
  for (int f = 0; f < m.cols; ++f) {
    if (is_piv[f] >= 0)
      continue;
    std::vector<Elt> v(m.cols, 0);
    v[f] = 1;
    for (size_t i = 0; i < piv.size(); ++i)
      v[piv[i]] = F.neg(e(int(i), f));
    k.append_row(v);
  }
  return row_basis(F, k);
}

Elt det(const Field &F, Mat m)
{
  require(m.rows == m.cols, ErrorCode::invalid_argument, "det of non-square");
  Elt d = 1;
  int n = m.rows;
  for (int c = 0; c < n; ++c) {
    int sel = -1;
    for (int i = c; i < n; ++i)
      if (m(i, c)) {
        sel = i;
        break;
      }
    if (sel < 0)
      return 0;
    if (sel != c) {
      for (int j = 0; j < n; ++j)
        std::swap(m(sel, j), m(c, j));
      d = F.neg(d);
    }
    d = F.mul(d, m(c, c));
    Elt s = F.inv(m(c, c));
    for (int i = c + 1; i < n; ++i) {
      if (!m(i, c))
        continue;
      Elt f = F.neg(F.mul(m(i, c), s));
      for (int j = c; j < n; ++j)
        m(i, j) = F.add(m(i, j), F.mul(f, m(c, j)));
    }
  }
  return d;
}

std::optional<Mat> inverse(const Field &F, const Mat &m)
{
  require(m.rows == m.cols, ErrorCode::invalid_argument, "inverse of non-square");
  int n = m.rows;
  Mat aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto piv = rref(F, aug);
  if (int(piv.size()) < n || piv[n - 1] != n - 1)
    return std::nullopt;
  Mat r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r(i, j) = aug(i, n + j);
  return r;
}

std::optional<std::vector<Elt>> solve(const Field &F, const Mat &m,
                                      const std::vector<Elt> &b)
{
  Mat aug(m.rows, m.cols + 1);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j)
      aug(i, j) = m(i, j);
    aug(i, m.cols) = b[i];
  }
  auto piv = rref(F, aug);
  if (!piv.empty() && piv.back() == m.cols)
    return std::nullopt;
  std::vector<Elt> x(m.cols, 0);
  for (size_t i = 0; i < piv.size(); ++i)
    x[piv[i]] = aug(int(i), m.cols);
  return x;
}

Subspace zero_space(int n) { return Mat(0, n); }

Subspace full_space(int n) { return identity(n); }

Subspace span_rows(const Field &F, const Mat &rows) { return row_basis(F, rows); }

Subspace space_sum(const Field &F, const Subspace &u, const Subspace &v)
{
  return row_basis(F, vstack(u, v));
}

Subspace space_intersect(const Field &F, const Subspace &u, const Subspace &v)
{
  if (u.rows == 0 || v.rows == 0)
    return zero_space(u.cols);
  // (x, y) with x U + y V = 0 gives x U in both
  Mat k = kernel(F, transpose(vstack(u, v)));
  Mat out(0, u.cols);
  for (int r = 0; r < k.rows; ++r) {
    std::vector<Elt> w(u.cols, 0);
    for (int i = 0; i < u.rows; ++i) {
      Elt c = k(r, i);
      if (!c)
        continue;
      for (int j = 0; j < u.cols; ++j)
        w[j] = F.add(w[j], F.mul(c, u(i, j)));
    }
    out.append_row(w);
  }
  return row_basis(F, out);
}

bool space_contains(const Field &F, const Subspace &u, const std::vector<Elt> &v)
{
  Mat m = u;
  m.append_row(v);
  return rank(F, m) == u.rows;
}

bool space_leq(const Field &F, const Subspace &u, const Subspace &v)
{
  return rank(F, vstack(v, u)) == v.rows;
}

Subspace annihilator(const Field &F, const Subspace &u)
{
  if (u.rows == 0)
    return full_space(u.cols);
  return kernel(F, u);
}

Subspace image_of(const Field &F, const Mat &m, const Subspace &u)
{
  Mat out(0, m.rows);
  for (int i = 0; i < u.rows; ++i)
    out.append_row(mat_vec(F, m, u.row(i)));
  return row_basis(F, out);
}

Subspace preimage_of(const Field &F, const Mat &m, const Subspace &u)
{
  Mat c = annihilator(F, u);
  if (c.rows == 0)
    return full_space(m.cols);
  return kernel(F, mat_mul(F, c, m));
}

std::vector<Elt> flatten(const Mat &x) { return x.a; }

Mat unflatten(const std::vector<Elt> &v, int d)
{
  Mat m(d, d);
  m.a = v;
  return m;
}

} // namespace grpcomb
