#include "tklab/tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace tklab {

GridVector TridiagOperator::apply(const GridVector& u) const {
  if (!(u.grid == grid)) throw std::invalid_argument("TridiagOperator::apply: grid mismatch");
  const std::int64_t n = grid.size();
  GridVector out(grid);
  for (std::int64_t i = 0; i < n; ++i) {
    double v = diag[i] * u.values[i];
    if (i > 0) v += sub[i - 1] * u.values[i - 1];
    if (i + 1 < n) v += super[i] * u.values[i + 1];
    out.values[i] = v;
  }
  return out;
}

DenseMatrix TridiagOperator::to_dense() const {
  const auto n = static_cast<int>(grid.size());
  DenseMatrix m(n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i > 0) m(i, i - 1) = sub[i - 1];
    if (i + 1 < n) m(i, i + 1) = super[i];
  }
  return m;
}

TridiagOperator build_generator(const GridSpec& g) {
  const std::int64_t n = g.size();
  const double inv_dx2 = static_cast<double>(g.nodes_per_unit) * g.nodes_per_unit;
  TridiagOperator a;
  a.grid = g;
  a.sub.assign(n - 1, inv_dx2);
  a.diag.assign(n, -2.0 * inv_dx2);
  a.super.assign(n - 1, inv_dx2);
  return a;
}

GridVector shifted_solve(const TridiagOperator& a, double alpha, double beta,
                         const GridVector& rhs) {
  if (!(alpha > 0.0) || beta < 0.0)
    throw std::invalid_argument("shifted_solve: requires alpha > 0 and beta >= 0");
  if (!(rhs.grid == a.grid)) throw std::invalid_argument("shifted_solve: grid mismatch");
  const std::int64_t n = a.grid.size();
  std::vector<double> c_prime(n - 1);
  GridVector u(a.grid);
  // Thomas sweep on (alpha I - beta A); strict diagonal dominance keeps it
  // stable without pivoting.
  double denom = alpha - beta * a.diag[0];
  c_prime[0] = -beta * a.super[0] / denom;
  u.values[0] = rhs.values[0] / denom;
  for (std::int64_t i = 1; i < n; ++i) {
    const double lower = -beta * a.sub[i - 1];
    denom = (alpha - beta * a.diag[i]) - lower * c_prime[i - 1];
    if (i < n - 1) c_prime[i] = -beta * a.super[i] / denom;
    u.values[i] = (rhs.values[i] - lower * u.values[i - 1]) / denom;
  }
  for (std::int64_t i = n - 2; i >= 0; --i) u.values[i] -= c_prime[i] * u.values[i + 1];
  return u;
}

GridVector resolvent_solve(const TridiagOperator& a, double lambda, const GridVector& rhs) {
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_solve: lambda must be positive");
  return shifted_solve(a, lambda, 1.0, rhs);
}

std::int64_t sup_argmax_index(const GridVector& u) {
  const std::int64_t n = u.grid.size();
  std::int64_t best = 0;
  double best_abs = std::abs(u.values[0]);
  for (std::int64_t i = 1; i < n; ++i) {
    const double v = std::abs(u.values[i]);
    if (v > best_abs) {
      best_abs = v;
      best = i;
    }
  }
  return u.grid.k_min() + best;
}

double duality_pairing(const TridiagOperator& a, const GridVector& u) {
  const double norm = u.sup_norm();
  if (norm == 0.0) throw std::invalid_argument("duality_pairing: u must be nonzero");
  const std::int64_t k = sup_argmax_index(u);
  const std::int64_t i = k - u.grid.k_min();
  const std::int64_t n = u.grid.size();
  double au = a.diag[i] * u.values[i];
  if (i > 0) au += a.sub[i - 1] * u.values[i - 1];
  if (i + 1 < n) au += a.super[i] * u.values[i + 1];
  const double sign = u.values[i] > 0.0 ? 1.0 : (u.values[i] < 0.0 ? -1.0 : 0.0);
  return au * norm * sign;
}

}  // namespace tklab
