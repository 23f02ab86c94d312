#include "tklab/evolve.hpp"

#include <cmath>

namespace tklab {

const char* to_string(EvolveMethod m) {
  switch (m) {
    case EvolveMethod::backward_euler: return "backward_euler";
    case EvolveMethod::crank_nicolson: return "crank_nicolson";
    default: return "pade_expm";
  }
}

EvolveMethod evolve_method_from_string(const std::string& s) {
  if (s == "backward_euler") return EvolveMethod::backward_euler;
  if (s == "crank_nicolson") return EvolveMethod::crank_nicolson;
  if (s == "pade_expm") return EvolveMethod::pade_expm;
  throw std::invalid_argument("unknown evolve method: " + s);
}

int default_substeps(EvolveMethod method, double t, const GridSpec& g) {
  if (method == EvolveMethod::pade_expm) return 1;
  const double n2 = static_cast<double>(g.nodes_per_unit) * g.nodes_per_unit;
  return std::max(1, static_cast<int>(std::ceil(4.0 * t * n2)));
}

namespace {

void check_finite(const GridVector& u, EvolveMethod method, int substeps) {
  for (double v : u.values)
    if (!std::isfinite(v)) throw StabilityError(method, substeps);
}

}  // namespace

EvolveResult evolve_discrete(const TridiagOperator& a, const GridVector& u0, double t,
                             EvolveMethod method, std::optional<int> substeps) {
  if (t < 0.0) throw std::invalid_argument("evolve_discrete: t must be >= 0");
  if (t == 0.0) return {u0, method, 0};
  const int m = substeps.value_or(default_substeps(method, t, a.grid));
  if (m < 1) throw std::invalid_argument("evolve_discrete: substeps must be >= 1");
  const double dt = t / m;

  switch (method) {
    case EvolveMethod::backward_euler: {
      GridVector u = u0;
      for (int step = 0; step < m; ++step) {
        u = shifted_solve(a, 1.0, dt, u);
        check_finite(u, method, m);
      }
      return {std::move(u), method, m};
    }
    case EvolveMethod::crank_nicolson: {
      GridVector u = u0;
      for (int step = 0; step < m; ++step) {
        GridVector half = a.apply(u);
        GridVector rhs(a.grid);
        for (std::size_t i = 0; i < rhs.values.size(); ++i)
          rhs.values[i] = u.values[i] + 0.5 * dt * half.values[i];
        u = shifted_solve(a, 1.0, 0.5 * dt, rhs);
        check_finite(u, method, m);
      }
      return {std::move(u), method, m};
    }
    default: {
      DiscretePropagator p(a, t);
      GridVector u = p.apply(u0);
      check_finite(u, method, 1);
      return {std::move(u), method, 1};
    }
  }
}

DiscretePropagator::DiscretePropagator(const TridiagOperator& a, double dt, ExecMode mode)
    : grid_(a.grid), dt_(dt), mode_(mode) {
  if (!(dt > 0.0)) throw std::invalid_argument("DiscretePropagator: dt must be positive");
  bool symmetric_nsd = a.sub == a.super;
  for (double d : a.diag)
    if (d > 0.0) symmetric_nsd = false;
  DenseMatrix m = a.to_dense();
  m *= dt;
  ExpmOptions opts;
  opts.bandwidth = 1;
  opts.symmetric_nonpositive = symmetric_nsd;
  opts.mode = mode;
  e_ = expm(m, opts);
}

GridVector DiscretePropagator::apply(const GridVector& u) const {
  if (!(u.grid == grid_)) throw std::invalid_argument("DiscretePropagator::apply: grid mismatch");
  GridVector out(grid_);
  matvec(e_, u.values, out.values, mode_);
  return out;
}

}  // namespace tklab
