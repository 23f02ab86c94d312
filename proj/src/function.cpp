#include "tklab/function.hpp"

#include <algorithm>
#include <cmath>

#include "tklab/parallel.hpp"

namespace tklab {

namespace {

// Largest |x| (relative to the peak) where exp(-a x^2) is still above 1e-16.
double gauss_window(double a) { return std::sqrt(37.0 / a); }

std::vector<double> probe_points(double level, double density) {
  const auto imax = static_cast<long long>(std::floor(level * density + 1e-9));
  std::vector<double> pts;
  pts.reserve(2 * imax + 3);
  for (long long i = -imax; i <= imax; ++i) pts.push_back(static_cast<double>(i) / density);
  if (static_cast<double>(imax) / density < level - 1e-15) {
    pts.insert(pts.begin(), -level);
    pts.push_back(level);
  }
  return pts;
}

double max_abs_over(const ContinuousFunction& f, const std::vector<double>& pts) {
  const std::vector<double> vals =
      parallel_map(static_cast<std::int64_t>(pts.size()), [&](std::int64_t i) { return f.eval(pts[i]); });
  double m = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!std::isfinite(vals[i])) throw EvaluationError(f.name, pts[i]);
    m = std::max(m, std::abs(vals[i]));
  }
  return m;
}

double refined_sup(const ContinuousFunction& f, double lo, double hi, double base_density,
                   double refine_tol, int max_refinements) {
  double density = base_density;
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  auto window_probes = [&](double d) {
    auto pts = probe_points(half, d);
    for (double& x : pts) x += center;
    return pts;
  };
  double value = max_abs_over(f, window_probes(density));
  for (int pass = 0; pass < max_refinements; ++pass) {
    density *= 2.0;
    const double next = max_abs_over(f, window_probes(density));
    const bool settled = std::abs(next - value) < refine_tol;
    value = next;
    if (settled) break;
  }
  return value;
}

}  // namespace

ContinuousFunction scaled_gauss(double amplitude, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("scaled_gauss: a must be positive");
  ContinuousFunction f;
  f.name = "gauss(a=" + std::to_string(a) + ")";
  f.eval = [amplitude, a](double x) { return amplitude * std::exp(-a * x * x); };
  f.sup_bound = std::abs(amplitude);
  f.decays_at_infinity = true;
  const double w = gauss_window(a);
  f.probe_window = Interval{-w, w};
  f.second_derivative = [amplitude, a](double x) {
    return amplitude * (4.0 * a * a * x * x - 2.0 * a) * std::exp(-a * x * x);
  };
  f.fourth_derivative = [amplitude, a](double x) {
    const double x2 = x * x;
    return amplitude * (16.0 * a * a * a * a * x2 * x2 - 48.0 * a * a * a * x2 + 12.0 * a * a) *
           std::exp(-a * x2);
  };
  f.exact_evolution = [amplitude, a](double t) {
    const double den = 1.0 + 4.0 * a * t;
    return scaled_gauss(amplitude / std::sqrt(den), a / den);
  };
  return f;
}

ContinuousFunction gauss(double a) { return scaled_gauss(1.0, a); }

ContinuousFunction bump(double center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump: radius must be positive");
  ContinuousFunction f;
  f.name = "bump(center=" + std::to_string(center) + ",radius=" + std::to_string(radius) + ")";
  f.eval = [center, radius](double x) {
    const double y = (x - center) / radius;
    if (std::abs(y) >= 1.0) return 0.0;
    const double q = 1.0 - y * y;
    return q * q * q;
  };
  f.sup_bound = 1.0;
  f.decays_at_infinity = true;
  f.probe_window = Interval{center - radius, center + radius};
  f.second_derivative = [center, radius](double x) {
    const double y = (x - center) / radius;
    if (std::abs(y) >= 1.0) return 0.0;
    return (1.0 - y * y) * (30.0 * y * y - 6.0) / (radius * radius);
  };
  return f;
}

ContinuousFunction runge() {
  ContinuousFunction f;
  f.name = "runge";
  f.eval = [](double x) { return 1.0 / (1.0 + x * x); };
  f.sup_bound = 1.0;
  f.decays_at_infinity = true;
  f.probe_window = Interval{-8.0, 8.0};
  f.second_derivative = [](double x) {
    const double d = 1.0 + x * x;
    return (6.0 * x * x - 2.0) / (d * d * d);
  };
  f.fourth_derivative = [](double x) {
    const double x2 = x * x;
    const double d = 1.0 + x2;
    return 24.0 * (5.0 * x2 * x2 - 10.0 * x2 + 1.0) / (d * d * d * d * d);
  };
  return f;
}

namespace {

ContinuousFunction chirp_evolved(double t) {
  ContinuousFunction f;
  f.name = t == 0.0 ? "chirp" : "T(" + std::to_string(t) + ")[chirp]";
  const double den = 1.0 + 16.0 * t * t;
  const double amplitude = std::pow(den, -0.25);
  const double phase0 = 0.5 * std::atan(4.0 * t);
  f.eval = [t, den, amplitude, phase0](double x) {
    const double x2 = x * x;
    return amplitude * std::exp(-4.0 * t * x2 / den) * std::sin(x2 / den + phase0);
  };
  f.sup_bound = amplitude;
  if (t > 0.0) {
    f.decays_at_infinity = true;
    const double w = std::min(512.0, std::sqrt(37.0 * den / (4.0 * t)));
    f.probe_window = Interval{-w, w};
  } else {
    f.decays_at_infinity = false;
    f.second_derivative = [](double x) {
      const double x2 = x * x;
      return 2.0 * std::cos(x2) - 4.0 * x2 * std::sin(x2);
    };
  }
  f.exact_evolution = [t](double s) { return chirp_evolved(t + s); };
  return f;
}

}  // namespace

ContinuousFunction chirp() { return chirp_evolved(0.0); }

ContinuousFunction plateau(double halfwidth, double ramp) {
  if (!(halfwidth > 0.0) || !(ramp > 0.0))
    throw std::invalid_argument("plateau: halfwidth and ramp must be positive");
  ContinuousFunction f;
  f.name = "plateau(w=" + std::to_string(halfwidth) + ")";
  f.eval = [halfwidth, ramp](double x) {
    const double ax = std::abs(x);
    if (ax <= halfwidth) return 1.0;
    if (ax >= halfwidth + ramp) return 0.0;
    return (halfwidth + ramp - ax) / ramp;
  };
  f.sup_bound = 1.0;
  f.decays_at_infinity = true;
  f.probe_window = Interval{-halfwidth - ramp, halfwidth + ramp};
  // piecewise linear: vanishing second derivative away from the kinks
  f.second_derivative = [](double) { return 0.0; };
  f.fourth_derivative = [](double) { return 0.0; };
  return f;
}

ContinuousFunction zero_function() {
  ContinuousFunction f;
  f.name = "zero";
  f.eval = [](double) { return 0.0; };
  f.sup_bound = 0.0;
  f.decays_at_infinity = true;
  f.probe_window = Interval{-1.0, 1.0};
  f.second_derivative = [](double) { return 0.0; };
  f.fourth_derivative = [](double) { return 0.0; };
  f.exact_evolution = [](double) { return zero_function(); };
  return f;
}

ContinuousFunction translate(const ContinuousFunction& f, double shift) {
  ContinuousFunction g;
  g.name = f.name + "@" + std::to_string(shift);
  auto base = f.eval;
  g.eval = [base, shift](double x) { return base(x - shift); };
  g.sup_bound = f.sup_bound;
  g.decays_at_infinity = f.decays_at_infinity;
  if (f.probe_window) g.probe_window = Interval{f.probe_window->lo + shift, f.probe_window->hi + shift};
  if (f.second_derivative) {
    auto d2 = f.second_derivative;
    g.second_derivative = [d2, shift](double x) { return d2(x - shift); };
  }
  if (f.fourth_derivative) {
    auto d4 = f.fourth_derivative;
    g.fourth_derivative = [d4, shift](double x) { return d4(x - shift); };
  }
  if (f.exact_evolution) {
    auto ev = f.exact_evolution;
    g.exact_evolution = [ev, shift](double t) { return translate(ev(t), shift); };
  }
  return g;
}

ContinuousFunction difference(const ContinuousFunction& f, const ContinuousFunction& g) {
  ContinuousFunction d;
  d.name = f.name + " - " + g.name;
  auto fe = f.eval, ge = g.eval;
  d.eval = [fe, ge](double x) { return fe(x) - ge(x); };
  d.sup_bound = f.sup_bound + g.sup_bound;
  d.decays_at_infinity = f.decays_at_infinity && g.decays_at_infinity;
  if (f.probe_window && g.probe_window)
    d.probe_window = Interval{std::min(f.probe_window->lo, g.probe_window->lo),
                              std::max(f.probe_window->hi, g.probe_window->hi)};
  if (f.second_derivative && g.second_derivative) {
    auto fd = f.second_derivative, gd = g.second_derivative;
    d.second_derivative = [fd, gd](double x) { return fd(x) - gd(x); };
  }
  if (f.fourth_derivative && g.fourth_derivative) {
    auto fd = f.fourth_derivative, gd = g.fourth_derivative;
    d.fourth_derivative = [fd, gd](double x) { return fd(x) - gd(x); };
  }
  if (f.exact_evolution && g.exact_evolution) {
    auto fe2 = f.exact_evolution, ge2 = g.exact_evolution;
    d.exact_evolution = [fe2, ge2](double t) { return difference(fe2(t), ge2(t)); };
  }
  return d;
}

std::map<std::string, ContinuousFunction> catalog() {
  std::map<std::string, ContinuousFunction> m;
  m.emplace("gauss1", gauss(1.0));
  m.emplace("gauss2", gauss(2.0));
  m.emplace("bump", bump());
  m.emplace("runge", runge());
  m.emplace("chirp", chirp());
  m.emplace("plateau", plateau());
  return m;
}

double seminorm(const ContinuousFunction& f, double level, const SeminormFamily& family) {
  if (!(level > 0.0)) throw std::invalid_argument("seminorm: level must be positive");
  return refined_sup(f, -level, level, family.probe_density, family.refine_tol,
                     family.max_refinements);
}

double seminorm_fixed(const ContinuousFunction& f, double level, double density) {
  if (!(level > 0.0)) throw std::invalid_argument("seminorm_fixed: level must be positive");
  return max_abs_over(f, probe_points(level, density));
}

double sup_norm_estimate(const ContinuousFunction& f) {
  double lo, hi;
  if (f.probe_window) {
    lo = f.probe_window->lo - 1.0;
    hi = f.probe_window->hi + 1.0;
  } else if (f.decays_at_infinity) {
    lo = -16.0;
    hi = 16.0;
  } else {
    lo = -32.0;
    hi = 32.0;
  }
  return refined_sup(f, lo, hi, 64.0, 1e-10, 8);
}

double modulus_of_continuity(const ContinuousFunction& f, double delta, Interval window) {
  if (!(delta > 0.0)) throw std::invalid_argument("modulus_of_continuity: delta must be positive");
  const int substeps = 8;
  const double h = delta / substeps;
  const auto count = static_cast<std::int64_t>(std::floor(window.width() / h)) + 1;
  const std::vector<double> local = parallel_map(count, [&](std::int64_t i) {
    const double x = window.lo + static_cast<double>(i) * h;
    const double fx = f.eval(x);
    double m = 0.0;
    for (int k = 1; k <= substeps; ++k) {
      const double y = x + k * h;
      if (y > window.hi) break;
      m = std::max(m, std::abs(f.eval(y) - fx));
    }
    return m;
  });
  double m = 0.0;
  for (double v : local) m = std::max(m, v);
  return m;
}

TauTable tau_convergence_table(const std::vector<ContinuousFunction>& seq,
                               const ContinuousFunction& limit, const SeminormFamily& family) {
  if (seq.empty()) throw std::invalid_argument("tau_convergence_table: empty sequence");
  TauTable table;
  table.levels = family.levels;
  table.errors.resize(seq.size());
  table.sup_norm_errors.resize(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const ContinuousFunction diff = difference(seq[i], limit);
    table.errors[i].reserve(family.levels.size());
    for (double l : family.levels) table.errors[i].push_back(seminorm(diff, l, family));
    table.sup_norm_errors[i] = sup_norm_estimate(diff);
  }
  table.monotone_tail.resize(family.levels.size());
  const std::size_t tail_start = seq.size() / 2;
  for (std::size_t j = 0; j < family.levels.size(); ++j) {
    bool mono = true;
    for (std::size_t i = tail_start; i + 1 < seq.size(); ++i)
      if (table.errors[i + 1][j] > table.errors[i][j] * (1.0 + 1e-12) + 1e-300) mono = false;
    table.monotone_tail[j] = mono;
  }
  return table;
}

}  // namespace tklab
