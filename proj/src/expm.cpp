#include "tklab/expm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace tklab {

namespace {

constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

const std::vector<double>& pade_coeffs(int m) {
  static const std::vector<double> b3 = {120, 60, 12, 1};
  static const std::vector<double> b5 = {30240, 15120, 3360, 420, 30, 1};
  static const std::vector<double> b7 = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
  static const std::vector<double> b9 = {17643225600, 8821612800, 2075673600, 302702400,
                                         30270240,    2162160,    110880,     3960,
                                         90,          1};
  static const std::vector<double> b13 = {64764752532480000.0,
                                          32382376266240000.0,
                                          7771770303897600.0,
                                          1187353796428800.0,
                                          129060195264000.0,
                                          10559470521600.0,
                                          670442572800.0,
                                          33522128640.0,
                                          1323241920.0,
                                          40840800.0,
                                          960960.0,
                                          16380.0,
                                          182.0,
                                          1.0};
  switch (m) {
    case 3: return b3;
    case 5: return b5;
    case 7: return b7;
    case 9: return b9;
    default: return b13;
  }
}

// C = alpha2*A2 [+ alpha4*A4 [+ alpha6*A6]] + alpha0*I over preallocated C.
void linear_combo(DenseMatrix& c, double alpha0, const DenseMatrix* a2, double alpha2,
                  const DenseMatrix* a4, double alpha4, const DenseMatrix* a6, double alpha6) {
  const int n = c.size();
  const std::size_t total = static_cast<std::size_t>(n) * n;
  double* cd = c.data();
  std::memset(cd, 0, total * sizeof(double));
  if (a2) {
    const double* p = a2->data();
    for (std::size_t i = 0; i < total; ++i) cd[i] += alpha2 * p[i];
  }
  if (a4) {
    const double* p = a4->data();
    for (std::size_t i = 0; i < total; ++i) cd[i] += alpha4 * p[i];
  }
  if (a6) {
    const double* p = a6->data();
    for (std::size_t i = 0; i < total; ++i) cd[i] += alpha6 * p[i];
  }
  c.add_scaled_identity(alpha0);
}

void add_into(DenseMatrix& c, const DenseMatrix& x) { c += x; }

void do_matmul(DenseMatrix& c, const DenseMatrix& a, int bw_a, const DenseMatrix& b, int bw_b,
               bool banded, ExecMode mode) {
  if (banded)
    band_matmul(c, a, bw_a, b, bw_b, mode);
  else
    matmul(c, a, b, mode);
}

void symmetrize(DenseMatrix& a) {
  const int n = a.size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

}  // namespace

void matmul_symmetric_result(DenseMatrix& c, const DenseMatrix& a, const DenseMatrix& b,
                             ExecMode mode) {
  const int n = a.size();
  if (b.size() != n) throw std::invalid_argument("matmul_symmetric_result: size mismatch");
  if (c.size() != n) c = DenseMatrix(n);
  std::memset(c.data(), 0, sizeof(double) * static_cast<std::size_t>(n) * n);
  constexpr int kBI = 64, kBK = 64, kBJ = 256;
  const std::int64_t nblocks = (n + kBI - 1) / kBI;
  parallel_for(
      nblocks,
      [&](std::int64_t blk) {
        const int ib = static_cast<int>(blk) * kBI;
        const int iend = std::min(ib + kBI, n);
        for (int kb = 0; kb < n; kb += kBK) {
          const int kend = std::min(kb + kBK, n);
          for (int jb = 0; jb <= iend - 1; jb += kBJ) {
            const int jend_block = std::min(jb + kBJ, n);
            for (int i = ib; i < iend; ++i) {
              const int jend = std::min(jend_block, i + 1);
              if (jb >= jend) continue;
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
      },
      mode);
  // mirror the strict lower triangle
  parallel_for(
      n,
      [&](std::int64_t i) {
        for (int j = static_cast<int>(i) + 1; j < n; ++j)
          c(static_cast<int>(i), j) = c(j, static_cast<int>(i));
      },
      mode);
}

void symmetric_square(DenseMatrix& c, const DenseMatrix& a, ExecMode mode) {
  matmul_symmetric_result(c, a, a, mode);
}

bool band_cholesky_factor(DenseMatrix& a, int bw) {
  const int n = a.size();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    const int klo = std::max(0, j - bw);
    for (int k = klo; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    const int ihi = std::min(n - 1, j + bw);
    for (int i = j + 1; i <= ihi; ++i) {
      double s = a(i, j);
      const int k0 = std::max(0, i - bw);
      for (int k = std::max(k0, klo); k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
  }
  return true;
}

void band_cholesky_solve_inplace(const DenseMatrix& l, int bw, DenseMatrix& b) {
  const int n = l.size();
  if (b.size() != n) throw std::invalid_argument("band_cholesky_solve_inplace: size mismatch");
  // forward: L y = b
  for (int k = 0; k < n; ++k) {
    double* krow = b.data() + static_cast<std::size_t>(k) * n;
    const int jlo = std::max(0, k - bw);
    for (int j = jlo; j < k; ++j) {
      const double lkj = l(k, j);
      if (lkj == 0.0) continue;
      const double* jrow = b.data() + static_cast<std::size_t>(j) * n;
#pragma omp simd
      for (int c = 0; c < n; ++c) krow[c] -= lkj * jrow[c];
    }
    const double inv = 1.0 / l(k, k);
    for (int c = 0; c < n; ++c) krow[c] *= inv;
  }
  // backward: L^T x = y
  for (int k = n - 1; k >= 0; --k) {
    double* krow = b.data() + static_cast<std::size_t>(k) * n;
    const int ihi = std::min(n - 1, k + bw);
    for (int i = k + 1; i <= ihi; ++i) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      const double* irow = b.data() + static_cast<std::size_t>(i) * n;
#pragma omp simd
      for (int c = 0; c < n; ++c) krow[c] -= lik * irow[c];
    }
    const double inv = 1.0 / l(k, k);
    for (int c = 0; c < n; ++c) krow[c] *= inv;
  }
}

DenseMatrix expm(const DenseMatrix& a, const ExpmOptions& opts) {
  const int n = a.size();
  if (n == 0) return a;
  const double norm = a.one_norm();

  int m = 13;
  int s = 0;
  if (norm <= kTheta3)
    m = 3;
  else if (norm <= kTheta5)
    m = 5;
  else if (norm <= kTheta7)
    m = 7;
  else if (norm <= kTheta9)
    m = 9;
  else if (norm > kTheta13)
    s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));

  DenseMatrix as = a;
  if (s > 0) as *= std::ldexp(1.0, -s);

  const int bw = opts.bandwidth;
  const bool banded = bw >= 0 && static_cast<std::int64_t>(bw) * (m + 1) < n;
  const ExecMode mode = opts.mode;
  const auto& b = pade_coeffs(m);

  DenseMatrix u(n), v(n);
  if (m == 13) {
    DenseMatrix a2(n), a4(n), a6(n), w(n), tmp(n);
    do_matmul(a2, as, bw, as, bw, banded, mode);
    do_matmul(a4, a2, 2 * bw, a2, 2 * bw, banded, mode);
    do_matmul(a6, a2, 2 * bw, a4, 4 * bw, banded, mode);
    // U = A*(A6*(b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    linear_combo(w, 0.0, &a2, b[9], &a4, b[11], &a6, b[13]);
    do_matmul(tmp, a6, 6 * bw, w, 6 * bw, banded, mode);
    linear_combo(w, b[1], &a2, b[3], &a4, b[5], &a6, b[7]);
    add_into(tmp, w);
    do_matmul(u, as, bw, tmp, banded ? 12 * bw : -1, banded, mode);
    // V = A6*(b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    linear_combo(w, 0.0, &a2, b[8], &a4, b[10], &a6, b[12]);
    do_matmul(tmp, a6, 6 * bw, w, 6 * bw, banded, mode);
    linear_combo(v, b[0], &a2, b[2], &a4, b[4], &a6, b[6]);
    add_into(v, tmp);
  } else {
    // even powers up to A^(m-1)
    std::vector<DenseMatrix> evens;  // A2, A4, ...
    std::vector<int> ebw;
    const int npow = (m - 1) / 2;
    evens.reserve(npow);
    for (int p = 0; p < npow; ++p) {
      DenseMatrix next(n);
      if (p == 0) {
        do_matmul(next, as, bw, as, bw, banded, mode);
        ebw.push_back(2 * bw);
      } else {
        do_matmul(next, evens[p - 1], ebw[p - 1], evens[0], 2 * bw, banded, mode);
        ebw.push_back(ebw[p - 1] + 2 * bw);
      }
      evens.push_back(std::move(next));
    }
    DenseMatrix w(n);
    const DenseMatrix* e2 = npow >= 1 ? &evens[0] : nullptr;
    const DenseMatrix* e4 = npow >= 2 ? &evens[1] : nullptr;
    const DenseMatrix* e6 = npow >= 3 ? &evens[2] : nullptr;
    linear_combo(w, b[1], e2, npow >= 1 ? b[3] : 0.0, e4, npow >= 2 ? b[5] : 0.0, e6,
                 npow >= 3 ? b[7] : 0.0);
    if (npow >= 4) {
      const double* p = evens[3].data();
      double* wd = w.data();
      const std::size_t total = static_cast<std::size_t>(n) * n;
      for (std::size_t i = 0; i < total; ++i) wd[i] += b[9] * p[i];
    }
    do_matmul(u, as, bw, w, banded ? (m - 1) * bw : -1, banded, mode);
    linear_combo(v, b[0], e2, npow >= 1 ? b[2] : 0.0, e4, npow >= 2 ? b[4] : 0.0, e6,
                 npow >= 3 ? b[6] : 0.0);
    if (npow >= 4) {
      const double* p = evens[3].data();
      double* vd = v.data();
      const std::size_t total = static_cast<std::size_t>(n) * n;
      for (std::size_t i = 0; i < total; ++i) vd[i] += b[8] * p[i];
    }
  }

  DenseMatrix q = v;
  q -= u;  // denominator
  DenseMatrix x = v;
  x += u;  // numerator, becomes the solution in place

  bool solved = false;
  if (opts.symmetric_nonpositive && banded) {
    const int qbw = m * std::max(bw, 0);
    DenseMatrix chol = q;
    if (band_cholesky_factor(chol, qbw)) {
      band_cholesky_solve_inplace(chol, qbw, x);
      solved = true;
    }
  }
  if (!solved) {
    auto pivots = lu_factor(q, mode);
    lu_solve_inplace(q, pivots, x, mode);
  }
  if (opts.symmetric_nonpositive) symmetrize(x);

  DenseMatrix tmp(n);
  for (int i = 0; i < s; ++i) {
    if (opts.symmetric_nonpositive)
      symmetric_square(tmp, x, mode);
    else
      matmul(tmp, x, x, mode);
    std::swap(tmp, x);
  }
  return x;
}

}  // namespace tklab
