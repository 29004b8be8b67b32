#include "bbafem/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace bbafem {

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets)
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= rows || static_cast<std::size_t>(t.col) >= cols)
      throw std::out_of_range("triplet outside matrix bounds");
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  CsrMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_ptr_.assign(rows + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    std::size_t j = i;
    double v = 0.0;
    while (j < triplets.size() && triplets[j].row == triplets[i].row && triplets[j].col == triplets[i].col) v += triplets[j++].value;
    m.col_idx_.push_back(triplets[i].col);
    m.values_.push_back(v);
    ++m.row_ptr_[static_cast<std::size_t>(triplets[i].row) + 1];
    i = j;
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

double CsrMatrix::at(Index r, Index c) const {
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(first, last, c);
  return (it != last && *it == c) ? values_[static_cast<std::size_t>(it - col_idx_.begin())] : 0.0;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_));
  for (std::size_t r = 0; r < d.size(); ++r) d[r] = at(static_cast<Index>(r), static_cast<Index>(r));
  return d;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k] * x[static_cast<std::size_t>(col_idx_[k])];
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0, scale = 0.0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      scale = std::max(scale, std::abs(values_[k]));
      worst = std::max(worst, std::abs(values_[k] - at(col_idx_[k], static_cast<Index>(r))));
    }
  return scale > 0.0 ? worst / scale : 0.0;
}

namespace {

double pairwise_dot(const double* a, const double* b, std::size_t n) {
  if (n <= 64) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_dot(a, b, half) + pairwise_dot(a + half, b + half, n - half);
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) { return pairwise_dot(a.data(), b.data(), a.size()); }
double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

CgReport pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x, const CgOptions& options) {
  const std::size_t n = b.size();
  CgReport report;
  if (n == 0) return report;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return report;
  }
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw SolverError("matrix has a non-positive diagonal entry");
    d = 1.0 / d;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  double rnorm = norm2(r);
  const double target = options.rel_tol * bnorm;
  for (std::size_t i = 0; i < n; ++i) p[i] = z[i] = inv_diag[i] * r[i];
  double rz = dot(r, z);
  const std::size_t cap = options.max_iter_factor * n;
  while (rnorm > target) {
    if (report.iterations >= cap)
      throw SolverError("conjugate gradients did not converge in " + std::to_string(cap) + " iterations (relative residual " +
                        std::to_string(rnorm / bnorm) + ")");
    a.multiply(p, q);
    const double curvature = dot(p, q);
    if (!(curvature > 0.0)) throw SolverError("conjugate gradients broke down: matrix is not positive definite");
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = inv_diag[i] * r[i];
    }
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = norm2(r);
    ++report.iterations;
  }
  report.relative_residual = rnorm / bnorm;
  return report;
}

}  // namespace bbafem
