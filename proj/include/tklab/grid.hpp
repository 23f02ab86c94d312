#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "tklab/function.hpp"

namespace tklab {

/// Uniform grid on [-l, l]: dx = 1/N, nodes x_k = k dx for
/// k = -lN+1 .. lN, so n = 2lN and the rightmost node is exactly l.
struct GridSpec {
  int window_halfwidth = 1;  // l
  int nodes_per_unit = 2;    // N

  double dx() const { return 1.0 / nodes_per_unit; }
  std::int64_t k_min() const {
    return -static_cast<std::int64_t>(window_halfwidth) * nodes_per_unit + 1;
  }
  std::int64_t k_max() const {
    return static_cast<std::int64_t>(window_halfwidth) * nodes_per_unit;
  }
  std::int64_t size() const { return k_max() - k_min() + 1; }  // n = 2 l N
  double node(std::int64_t k) const { return static_cast<double>(k) / nodes_per_unit; }

  bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int l, int N);

/// Real vector over a grid's index range, k = k_min .. k_max.
struct GridVector {
  GridSpec grid;
  std::vector<double> values;  // values[k - k_min]

  GridVector() = default;
  explicit GridVector(const GridSpec& g) : grid(g), values(static_cast<std::size_t>(g.size()), 0.0) {}

  double& at_k(std::int64_t k) { return values[static_cast<std::size_t>(k - grid.k_min())]; }
  double at_k(std::int64_t k) const { return values[static_cast<std::size_t>(k - grid.k_min())]; }
  /// Discrete sup norm ||u||_n = max_k |u_k|.
  double sup_norm() const;
};

/// The sampling operator: (P_n f)_k = f(x_k). Throws EvaluationError naming
/// the node on a non-finite sample.
GridVector sample(const ContinuousFunction& f, const GridSpec& g);

/// The prolongation operator: hat-function interpolant through the nodal
/// values, ramping to 0 over one cell at both ends ([-l, -l+dx] uses the
/// ghost node at -l, [l, l+dx] tapers so the range stays inside C_{b,0}),
/// identically 0 outside [-l, l+dx].
ContinuousFunction prolong(const GridVector& u);

/// Debugging/serialization format: header "k,x_k,value".
void write_grid_csv(const GridVector& u, std::ostream& out);

/// Entries uniform in [-1, 1]; bit-stable across platforms (explicit
/// mantissa mapping rather than std::uniform_real_distribution).
GridVector random_grid_vector(const GridSpec& g, std::mt19937_64& rng);

}  // namespace tklab
