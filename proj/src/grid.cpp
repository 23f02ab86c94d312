#include "tklab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

#include "tklab/parallel.hpp"

namespace tklab {

GridSpec make_grid(int l, int N) {
  if (l < 1) throw std::invalid_argument("make_grid: window halfwidth l must be >= 1");
  if (N < 1) throw std::invalid_argument("make_grid: nodes per unit N must be >= 1");
  const std::int64_t n = 2LL * l * N;
  if (n > (1LL << 26)) throw std::invalid_argument("make_grid: grid size overflows the desk-scale cap");
  return GridSpec{l, N};
}

double GridVector::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

GridVector sample(const ContinuousFunction& f, const GridSpec& g) {
  GridVector u(g);
  const std::int64_t n = g.size();
  u.values = parallel_map(n, [&](std::int64_t i) { return f.eval(g.node(g.k_min() + i)); });
  for (std::int64_t i = 0; i < n; ++i)
    if (!std::isfinite(u.values[i])) throw EvaluationError(f.name, g.node(g.k_min() + i));
  return u;
}

ContinuousFunction prolong(const GridVector& u) {
  const GridSpec g = u.grid;
  auto values = std::make_shared<const std::vector<double>>(u.values);
  const std::int64_t k_min = g.k_min();
  const std::int64_t k_max = g.k_max();
  const double N = g.nodes_per_unit;

  ContinuousFunction f;
  f.name = "E_n[u]";
  f.eval = [values, k_min, k_max, N](double x) {
    const double s = x * N;  // node coordinate: s = k at x_k
    if (s <= static_cast<double>(k_min) - 1.0 || s >= static_cast<double>(k_max) + 1.0) return 0.0;
    const double fl = std::floor(s);
    const auto j = static_cast<std::int64_t>(fl);
    const double theta = s - fl;
    const double left = (j >= k_min && j <= k_max) ? (*values)[j - k_min] : 0.0;
    if (theta == 0.0) return left;
    const double right = (j + 1 >= k_min && j + 1 <= k_max) ? (*values)[j + 1 - k_min] : 0.0;
    return (1.0 - theta) * left + theta * right;
  };
  f.sup_bound = u.sup_norm();
  f.decays_at_infinity = true;
  f.probe_window = Interval{-static_cast<double>(g.window_halfwidth),
                            static_cast<double>(g.window_halfwidth) + g.dx()};
  return f;
}

void write_grid_csv(const GridVector& u, std::ostream& out) {
  out << "k,x_k,value\n";
  char buf[80];
  for (std::int64_t k = u.grid.k_min(); k <= u.grid.k_max(); ++k) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(k),
                  u.grid.node(k), u.at_k(k));
    out << buf;
  }
}

GridVector random_grid_vector(const GridSpec& g, std::mt19937_64& rng) {
  GridVector u(g);
  for (double& v : u.values) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    v = 2.0 * unit - 1.0;
  }
  return u;
}

}  // namespace tklab
