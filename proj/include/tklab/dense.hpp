#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tklab/parallel.hpp"

namespace tklab {

/// Square dense matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

  static DenseMatrix identity(int n);

  int size() const { return n_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  std::span<double> row(int i) { return {a_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)}; }
  std::span<const double> row(int i) const {
    return {a_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
  }

  double one_norm() const;      // max column sum of |a_ij|
  double inf_norm() const;      // max row sum of |a_ij|
  double min_entry() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);
  void add_scaled_identity(double s);  // A += s*I

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// C = A*B. Serial reference and OpenMP-blocked path agree bitwise: each
/// entry of C is accumulated by a single worker in the same k-order.
void matmul(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b,
            ExecMode mode = default_exec_mode());
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b,
                   ExecMode mode = default_exec_mode());

/// C = A*B where A and B are banded (half-bandwidths bw_a, bw_b) but stored
/// dense. Cost O(n * bw_a * bw_b) instead of O(n^3).
void band_matmul(DenseMatrix& c, const DenseMatrix& a, int bw_a, const DenseMatrix& b,
                 int bw_b, ExecMode mode = default_exec_mode());

/// y = A*x.
void matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> y,
            ExecMode mode = default_exec_mode());

/// In-place LU factorization with partial pivoting. Returns the pivot row
/// chosen at each step. Throws std::runtime_error on exact singularity.
std::vector<int> lu_factor(DenseMatrix& a, ExecMode mode = default_exec_mode());

/// Solves (LU) X = B for all columns of B in place, given lu_factor output.
void lu_solve_inplace(const DenseMatrix& lu, const std::vector<int>& pivots, DenseMatrix& b,
                      ExecMode mode = default_exec_mode());

}  // namespace tklab
