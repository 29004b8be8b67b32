#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbafem/mesh.hpp"

namespace bbafem {

/// Raised when an iterative solve does not reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

/// Compressed sparse row matrix with sorted column indices.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  /// Duplicate entries are summed in input order.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const Index> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  double at(Index r, Index c) const;
  std::vector<double> diagonal() const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  /// Largest |A_ij - A_ji| relative to the largest |A_ij|.
  double asymmetry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Reduced symmetric positive definite system.
struct SparseSpdSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
  std::size_t dimension() const { return rhs.size(); }
};

/// Pairwise-reduced dot product (deterministic summation order).
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct CgOptions {
  double rel_tol = 1e-12;
  /// Iteration cap as a multiple of the system dimension.
  std::size_t max_iter_factor = 10;
};

struct CgReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients; `x` holds the initial guess.
/// Throws SolverError when ||r|| <= rel_tol ||b|| is not reached in time.
CgReport pcg(const CsrMatrix& a, std::span<const double> b, std::span<double> x, const CgOptions& options = {});

}  // namespace bbafem
