#include "tklab/heat_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "tklab/parallel.hpp"

namespace tklab {

namespace {

// e^{-s^2} window: erfc(7.5) ~ 1e-25, far below any rel_tol in range.
constexpr double kGaussWindow = 7.5;

double kernel_window(const QuadratureSpec& q) {
  if (q.window_halfwidth) return *q.window_halfwidth;
  return std::max(32.0, -std::log(0.05 * q.rel_tol));
}

}  // namespace

ContinuousFunction evolve_by_quadrature(const ContinuousFunction& f, double t,
                                        const QuadratureSpec& q) {
  validate(q);
  if (t < 0.0) throw std::invalid_argument("evolve_by_quadrature: t must be >= 0");
  if (t == 0.0) return f;
  ContinuousFunction g;
  g.name = "T(" + std::to_string(t) + ")[" + f.name + "]";
  const double spread = 2.0 * std::sqrt(t);
  const double s_max = q.window_halfwidth.value_or(kGaussWindow);
  const double abs_floor = q.rel_tol * 1e-4 * std::max(1.0, f.sup_bound);
  auto base = f.eval;
  const QuadratureSpec spec = q;
  g.eval = [base, spread, s_max, abs_floor, spec](double x) {
    const double value = integrate(
        [&](double s) { return std::exp(-s * s) * base(x - spread * s); }, -s_max, s_max, spec,
        abs_floor, {0.0});
    return value * std::numbers::inv_sqrtpi;
  };
  g.sup_bound = f.sup_bound;
  g.decays_at_infinity = f.decays_at_infinity;
  if (f.probe_window)
    g.probe_window =
        Interval{f.probe_window->lo - spread * s_max, f.probe_window->hi + spread * s_max};
  return g;
}

ContinuousFunction evolve_exact(const ContinuousFunction& f, double t, const QuadratureSpec& q) {
  if (t < 0.0) throw std::invalid_argument("evolve_exact: t must be >= 0");
  if (t == 0.0) return f;
  if (f.has_exact_evolution()) return f.exact_evolution(t);
  return evolve_by_quadrature(f, t, q);
}

ContinuousFunction apply_generator(const ContinuousFunction& f) {
  if (!f.has_second_derivative())
    throw UnsupportedFunction("apply_generator: " + f.name + " has no closed-form second derivative");
  ContinuousFunction g;
  g.name = "A[" + f.name + "]";
  g.eval = f.second_derivative;
  g.decays_at_infinity = f.decays_at_infinity;
  g.probe_window = f.probe_window;
  if (f.has_fourth_derivative()) g.second_derivative = f.fourth_derivative;
  g.sup_bound = sup_norm_estimate(g);
  return g;
}

ContinuousFunction shift_minus_generator(const ContinuousFunction& f, double lambda) {
  if (!f.has_second_derivative())
    throw UnsupportedFunction("shift_minus_generator: " + f.name +
                              " has no closed-form second derivative");
  ContinuousFunction g;
  g.name = "(lambda-A)[" + f.name + "]";
  auto base = f.eval;
  auto d2 = f.second_derivative;
  g.eval = [base, d2, lambda](double x) { return lambda * base(x) - d2(x); };
  g.decays_at_infinity = f.decays_at_infinity;
  g.probe_window = f.probe_window;
  if (f.has_fourth_derivative()) {
    auto d4 = f.fourth_derivative;
    g.second_derivative = [d2, d4, lambda](double x) { return lambda * d2(x) - d4(x); };
  }
  g.sup_bound = sup_norm_estimate(g);
  return g;
}

ContinuousFunction resolvent_exact(const ContinuousFunction& f, double lambda,
                                   const QuadratureSpec& q) {
  validate(q);
  if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_exact: lambda must be positive");
  ContinuousFunction g;
  g.name = "R(" + std::to_string(lambda) + ")[" + f.name + "]";
  const double root = std::sqrt(lambda);
  const double u_max = kernel_window(q);
  const double abs_floor = q.rel_tol * 1e-4 * std::max(1.0, f.sup_bound) / lambda;
  auto base = f.eval;
  const QuadratureSpec spec = q;
  auto eval = [base, root, lambda, u_max, abs_floor, spec](double x) {
    const double value =
        integrate([&](double u) { return std::exp(-std::abs(u)) * base(x + u / root); }, -u_max,
                  u_max, spec, abs_floor * lambda, {0.0});
    return value / (2.0 * lambda);
  };
  g.eval = eval;
  g.sup_bound = f.sup_bound / lambda;
  g.decays_at_infinity = f.decays_at_infinity;
  if (f.probe_window)
    g.probe_window =
        Interval{f.probe_window->lo - u_max / root - 1.0, f.probe_window->hi + u_max / root + 1.0};
  // (lambda - A) g = f pins g'' = lambda*g - f.
  g.second_derivative = [eval, base, lambda](double x) { return lambda * eval(x) - base(x); };
  return g;
}

ContinuousFunction laplace_resolvent(const ContinuousFunction& f, double lambda, double t_max,
                                     const QuadratureSpec& q) {
  validate(q);
  if (!(lambda > 0.0)) throw std::invalid_argument("laplace_resolvent: lambda must be positive");
  if (!(lambda * t_max >= 20.0))
    throw std::invalid_argument(
        "laplace_resolvent: lambda * t_max must be >= 20 to push the dropped tail below "
        "testing tolerances");
  ContinuousFunction g;
  g.name = "LaplaceR(" + std::to_string(lambda) + ")[" + f.name + "]";
  const double abs_floor = q.rel_tol * 1e-4 * std::max(1.0, f.sup_bound) / lambda;
  auto source = std::make_shared<ContinuousFunction>(f);
  const QuadratureSpec spec = q;
  g.eval = [source, lambda, t_max, abs_floor, spec](double x) {
    return integrate(
        [&](double t) { return std::exp(-lambda * t) * evolve_exact(*source, t, spec).eval(x); },
        0.0, t_max, spec, abs_floor, {std::min(1.0, 0.5 * t_max)});
  };
  g.sup_bound = f.sup_bound / lambda;
  g.decays_at_infinity = f.decays_at_infinity;
  g.probe_window = f.probe_window;
  return g;
}

double integral_identity_residual(const ContinuousFunction& f, double t, const QuadratureSpec& q,
                                  double probe_halfwidth, double probe_density) {
  validate(q);
  if (!(t > 0.0)) throw std::invalid_argument("integral_identity_residual: t must be positive");
  const ContinuousFunction af = apply_generator(f);
  const ContinuousFunction lhs = evolve_by_quadrature(f, t, q);
  const double abs_floor = q.rel_tol * 1e-3 * std::max(1.0, af.sup_bound) * t;

  const auto count = static_cast<std::int64_t>(std::floor(probe_halfwidth * probe_density)) * 2 + 1;
  const std::vector<double> residuals = parallel_map(count, [&](std::int64_t i) {
    const double x =
        (static_cast<double>(i) - static_cast<double>(count / 2)) / probe_density;
    const double left = lhs.eval(x) - f.eval(x);
    const double right = integrate(
        [&](double s) { return evolve_by_quadrature(af, s, q).eval(x); }, 0.0, t, q, abs_floor);
    return std::abs(left - right);
  });
  double m = 0.0;
  for (double r : residuals) m = std::max(m, r);
  return m;
}

}  // namespace tklab
