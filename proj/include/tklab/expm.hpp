#pragma once

#include "tklab/dense.hpp"
#include "tklab/parallel.hpp"

namespace tklab {

struct ExpmOptions {
  /// Half-bandwidth of the input when it is banded; -1 means treat as dense.
  /// Banded inputs get O(n*bw^2) Pade assembly instead of dense products.
  int bandwidth = -1;
  /// Input is symmetric with real spectrum in (-inf, 0]. Enables the banded
  /// Cholesky solve of the Pade denominator (its spectrum is then positive)
  /// and half-cost symmetric squaring. Falls back to LU if a pivot fails.
  bool symmetric_nonpositive = false;
  ExecMode mode = default_exec_mode();
};

/// Matrix exponential by Pade approximation with scaling and squaring
/// (degree 3/5/7/9/13 chosen from the 1-norm).
DenseMatrix expm(const DenseMatrix& a, const ExpmOptions& opts = {});

/// C = A*B when the product is known to be symmetric (commuting symmetric
/// factors): computes the lower triangle and mirrors, halving the flops.
void matmul_symmetric_result(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b,
                             ExecMode mode = default_exec_mode());

/// C = A*A for symmetric A.
void symmetric_square(DenseMatrix& c, const DenseMatrix& a, ExecMode mode = default_exec_mode());

/// Banded Cholesky A = L L^T within half-bandwidth bw; L overwrites the lower
/// band. Returns false if a pivot is not strictly positive.
bool band_cholesky_factor(DenseMatrix& a, int bw);

/// Solves L L^T X = B in place given band_cholesky_factor output.
void band_cholesky_solve_inplace(const DenseMatrix& l, int bw, DenseMatrix& b);

}  // namespace tklab
