#include "tklab/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace tklab {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double DenseMatrix::one_norm() const {
  std::vector<double> col_sums(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const double* r = data() + static_cast<std::size_t>(i) * n_;
    for (int j = 0; j < n_; ++j) col_sums[j] += std::abs(r[j]);
  }
  double m = 0.0;
  for (double s : col_sums) m = std::max(m, s);
  return m;
}

double DenseMatrix::inf_norm() const {
  double m = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double* r = data() + static_cast<std::size_t>(i) * n_;
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += std::abs(r[j]);
    m = std::max(m, s);
  }
  return m;
}

double DenseMatrix::min_entry() const {
  double m = a_.empty() ? 0.0 : a_[0];
  for (double v : a_) m = std::min(m, v);
  return m;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= other.a_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

void DenseMatrix::add_scaled_identity(double s) {
  for (int i = 0; i < n_; ++i) (*this)(i, i) += s;
}

namespace {

// Blocked i-k-j kernel. Each C row is accumulated by exactly one worker in
// the same (kb outer, k inner) order, so serial and parallel results are
// bit-identical.
constexpr int kBlockI = 64;
constexpr int kBlockK = 64;
constexpr int kBlockJ = 256;

void matmul_rows(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c, int ib) {
  const int n = a.size();
  const int iend = std::min(ib + kBlockI, n);
  for (int kb = 0; kb < n; kb += kBlockK) {
    const int kend = std::min(kb + kBlockK, n);
    for (int jb = 0; jb < n; jb += kBlockJ) {
      const int jend = std::min(jb + kBlockJ, n);
      for (int i = ib; i < iend; ++i) {
        double* crow = c.data() + static_cast<std::size_t>(i) * n;
        for (int k = kb; k < kend; ++k) {
          const double aik = a(i, k);
          const double* brow = b.data() + static_cast<std::size_t>(k) * n;
#pragma omp simd
          for (int j = jb; j < jend; ++j) crow[j] += aik * brow[j];
        }
      }
    }
  }
}

}  // namespace

void matmul(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b, ExecMode mode) {
  const int n = a.size();
  if (b.size() != n) throw std::invalid_argument("matmul: size mismatch");
  if (c.size() != n) c = DenseMatrix(n);
  std::memset(c.data(), 0, sizeof(double) * static_cast<std::size_t>(n) * n);
  const std::int64_t nblocks = (n + kBlockI - 1) / kBlockI;
  parallel_for(
      nblocks, [&](std::int64_t blk) { matmul_rows(a, b, c, static_cast<int>(blk) * kBlockI); },
      mode);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, ExecMode mode) {
  DenseMatrix c(a.size());
  matmul(c, a, b, mode);
  return c;
}

void band_matmul(DenseMatrix& c, const DenseMatrix& a, int bw_a, const DenseMatrix& b, int bw_b,
                 ExecMode mode) {
  const int n = a.size();
  if (b.size() != n) throw std::invalid_argument("band_matmul: size mismatch");
  if (c.size() != n) c = DenseMatrix(n);
  std::memset(c.data(), 0, sizeof(double) * static_cast<std::size_t>(n) * n);
  parallel_for(
      n,
      [&](std::int64_t i) {
        double* crow = c.data() + static_cast<std::size_t>(i) * n;
        const int klo = std::max<int>(0, static_cast<int>(i) - bw_a);
        const int khi = std::min<int>(n - 1, static_cast<int>(i) + bw_a);
        for (int k = klo; k <= khi; ++k) {
          const double aik = a(static_cast<int>(i), k);
          if (aik == 0.0) continue;
          const double* brow = b.data() + static_cast<std::size_t>(k) * n;
          const int jlo = std::max(0, k - bw_b);
          const int jhi = std::min(n - 1, k + bw_b);
          for (int j = jlo; j <= jhi; ++j) crow[j] += aik * brow[j];
        }
      },
      mode);
}

void matvec(const DenseMatrix& a, std::span<const double> x, std::span<double> y, ExecMode mode) {
  const int n = a.size();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n)
    throw std::invalid_argument("matvec: size mismatch");
  parallel_for(
      n,
      [&](std::int64_t i) {
        const double* row = a.data() + static_cast<std::size_t>(i) * n;
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += row[j] * x[j];
        y[i] = s;
      },
      mode);
}

std::vector<int> lu_factor(DenseMatrix& a, ExecMode mode) {
  const int n = a.size();
  std::vector<int> pivots(n);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    pivots[k] = piv;
    if (best == 0.0) throw std::runtime_error("lu_factor: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
    }
    const double akk = a(k, k);
    const std::int64_t rows_below = n - 1 - k;
    parallel_for(
        rows_below,
        [&](std::int64_t r) {
          const int i = k + 1 + static_cast<int>(r);
          const double lik = a(i, k) / akk;
          a(i, k) = lik;
          const double* krow = a.data() + static_cast<std::size_t>(k) * n;
          double* irow = a.data() + static_cast<std::size_t>(i) * n;
#pragma omp simd
          for (int j = k + 1; j < n; ++j) irow[j] -= lik * krow[j];
        },
        mode);
  }
  return pivots;
}

void lu_solve_inplace(const DenseMatrix& lu, const std::vector<int>& pivots, DenseMatrix& b,
                      ExecMode mode) {
  const int n = lu.size();
  if (b.size() != n) throw std::invalid_argument("lu_solve_inplace: size mismatch");
  for (int k = 0; k < n; ++k) {
    if (pivots[k] != k) {
      for (int j = 0; j < n; ++j) std::swap(b(k, j), b(pivots[k], j));
    }
  }
  // L y = P b (unit lower triangular)
  for (int k = 0; k < n; ++k) {
    const double* brow = b.data() + static_cast<std::size_t>(k) * n;
    const std::int64_t rows_below = n - 1 - k;
    parallel_for(
        rows_below,
        [&](std::int64_t r) {
          const int i = k + 1 + static_cast<int>(r);
          const double lik = lu(i, k);
          if (lik == 0.0) return;
          double* irow = b.data() + static_cast<std::size_t>(i) * n;
#pragma omp simd
          for (int j = 0; j < n; ++j) irow[j] -= lik * brow[j];
        },
        mode);
  }
  // U x = y
  for (int k = n - 1; k >= 0; --k) {
    double* krow = b.data() + static_cast<std::size_t>(k) * n;
    const double inv = 1.0 / lu(k, k);
    for (int j = 0; j < n; ++j) krow[j] *= inv;
    const std::int64_t rows_above = k;
    parallel_for(
        rows_above,
        [&](std::int64_t i) {
          const double uik = lu(static_cast<int>(i), k);
          if (uik == 0.0) return;
          double* irow = b.data() + static_cast<std::size_t>(i) * n;
#pragma omp simd
          for (int j = 0; j < n; ++j) irow[j] -= uik * krow[j];
        },
        mode);
  }
}

}  // namespace tklab
