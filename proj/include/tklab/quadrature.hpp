#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tklab {

/// Controls the quadrature backing the continuous-side oracles. The oracle
/// must stay several digits ahead of the discretization errors it judges,
/// hence the hard cap on rel_tol.
struct QuadratureSpec {
  enum class Rule { adaptive, fixed_gauss };
  Rule rule = Rule::adaptive;
  double rel_tol = 1e-10;
  std::optional<double> window_halfwidth;  // override for kernel integrals
  int fixed_panels = 64;
  int max_panels = 4000;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved, double requested)
      : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved) +
                           ", requested " + std::to_string(requested) + ")"),
        achieved_tolerance(achieved),
        requested_tolerance(requested) {}
  double achieved_tolerance;
  double requested_tolerance;
};

inline void validate(const QuadratureSpec& q) {
  if (!(q.rel_tol > 0.0) || q.rel_tol >= 1e-6)
    throw std::invalid_argument("QuadratureSpec: rel_tol must be in (0, 1e-6)");
  if (q.fixed_panels < 1) throw std::invalid_argument("QuadratureSpec: fixed_panels must be >= 1");
}

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (positive half).
inline constexpr double kXgk[8] = {0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
                                   0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
                                   0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
                                   0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
                                   0.2044329400752989, 0.2094821410847278};
inline constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                                  0.4179591836734694};

struct PanelResult {
  double integral;
  double error;
};

template <class F>
PanelResult gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_g = kWg[3] * fc;
  double res_k = kWgk[7] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double s = f(c - x) + f(c + x);
    res_k += kWgk[i] * s;
    if (i % 2 == 1) res_g += kWg[i / 2] * s;
  }
  return {res_k * h, std::abs(res_k - res_g) * std::abs(h)};
}

}  // namespace detail

/// Integrates f over [a, b]. Adaptive rule bisects the worst panel until the
/// summed error estimate is below max(abs_floor, rel_tol*|I|); throws
/// QuadratureError with the achieved tolerance when the panel budget runs
/// out. `breaks` seeds panel boundaries (kernel kinks and similar).
template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& q, double abs_floor = 0.0,
                 std::vector<double> breaks = {}) {
  validate(q);
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate: requires b > a");
  }

  struct Segment {
    double a, b, integral, error;
  };
  std::vector<Segment> segments;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = breaks[i], hi = breaks[i + 1];
    if (!(hi > lo) || hi < a || lo > b) continue;
    auto [integral, error] = detail::gk15(f, std::max(lo, a), std::min(hi, b));
    segments.push_back({std::max(lo, a), std::min(hi, b), integral, error});
  }

  if (q.rule == QuadratureSpec::Rule::fixed_gauss) {
    // composite fixed rule: split every seeded segment into equal panels
    double total = 0.0;
    for (const auto& seg : segments) {
      const double step = (seg.b - seg.a) / q.fixed_panels;
      for (int p = 0; p < q.fixed_panels; ++p)
        total += detail::gk15(f, seg.a + p * step, seg.a + (p + 1) * step).integral;
    }
    if (!std::isfinite(total))
      throw QuadratureError("integrate: non-finite integrand", INFINITY, q.rel_tol);
    return total;
  }

  while (true) {
    double total = 0.0, err = 0.0;
    for (const auto& seg : segments) {
      total += seg.integral;
      err += seg.error;
    }
    if (!std::isfinite(total) || !std::isfinite(err))
      throw QuadratureError("integrate: non-finite integrand", INFINITY, q.rel_tol);
    const double target = std::max(abs_floor, q.rel_tol * std::abs(total));
    if (err <= target) return total;
    if (static_cast<int>(segments.size()) >= q.max_panels)
      throw QuadratureError("integrate: panel budget exhausted",
                            std::abs(total) > 0 ? err / std::abs(total) : err, q.rel_tol);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segments.size(); ++i)
      if (segments[i].error > segments[worst].error) worst = i;
    const Segment s = segments[worst];
    const double mid = 0.5 * (s.a + s.b);
    auto [il, el] = detail::gk15(f, s.a, mid);
    auto [ir, er] = detail::gk15(f, mid, s.b);
    segments[worst] = {s.a, mid, il, el};
    segments.push_back({mid, s.b, ir, er});
  }
}

}  // namespace tklab
