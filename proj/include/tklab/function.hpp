#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tklab {

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& fn, double x)
      : std::runtime_error("non-finite evaluation of " + fn + " at x = " + std::to_string(x)),
        where(x) {}
  double where;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// A bounded continuous function on the line, with whatever closed-form
/// extras the catalog can supply. Immutable value; everything here is pure.
struct ContinuousFunction {
  std::string name;
  std::function<double(double)> eval;
  double sup_bound = 0.0;
  bool decays_at_infinity = false;
  /// Region outside which |f| is negligible (or where the sup is attained,
  /// for slowly decaying entries). Used to size probe windows.
  std::optional<Interval> probe_window;
  std::function<double(double)> second_derivative;  // empty when unknown
  std::function<double(double)> fourth_derivative;  // empty when unknown
  /// t -> heat flow of this function at time t, when known in closed form.
  std::function<ContinuousFunction(double)> exact_evolution;

  double operator()(double x) const { return eval(x); }
  bool has_second_derivative() const { return static_cast<bool>(second_derivative); }
  bool has_fourth_derivative() const { return static_cast<bool>(fourth_derivative); }
  bool has_exact_evolution() const { return static_cast<bool>(exact_evolution); }
};

// --- catalog ---------------------------------------------------------------

/// c * exp(-a x^2) with closed-form derivatives and heat evolution.
ContinuousFunction scaled_gauss(double amplitude, double a);
ContinuousFunction gauss(double a);

/// C^2 compactly supported bump ((1-y^2)^3 on |y|<1, y=(x-center)/radius).
ContinuousFunction bump(double center = 0.0, double radius = 1.0);

/// 1/(1+x^2).
ContinuousFunction runge();

/// sin(x^2): bounded, not uniformly continuous, does not vanish at infinity.
ContinuousFunction chirp();

/// 1 on [-w, w], linear ramp to 0 over `ramp` on each side.
ContinuousFunction plateau(double halfwidth = 8.0, double ramp = 1.0);

ContinuousFunction zero_function();

/// f(. - shift); carries the shifted derivatives/evolution along.
ContinuousFunction translate(const ContinuousFunction& f, double shift);

/// f - g (derivatives combined when both sides have them).
ContinuousFunction difference(const ContinuousFunction& f, const ContinuousFunction& g);

/// Named default entries: gauss1, gauss2, bump, runge, chirp, plateau.
std::map<std::string, ContinuousFunction> catalog();

// --- seminorm family -------------------------------------------------------

/// The local-sup seminorms sn_l(f) = sup_{|x|<=l} |f(x)|, approximated on
/// nested probe grids (multiples of 1/density) so that sn is exactly
/// monotone in l at fixed density. Densities double until the value settles.
struct SeminormFamily {
  std::vector<double> levels = {1.0, 2.0, 4.0, 8.0};
  double probe_density = 64.0;
  double refine_tol = 1e-10;
  int max_refinements = 6;
};

double seminorm(const ContinuousFunction& f, double level, const SeminormFamily& family = {});

/// Single-pass variant at a pinned density; harness suites use this with a
/// density tied to the grid schedule so probe points always straddle cells.
double seminorm_fixed(const ContinuousFunction& f, double level, double density);

/// Wide-window sup estimate; honors probe_window / decays_at_infinity.
double sup_norm_estimate(const ContinuousFunction& f);

/// sup over |x-y| <= delta (window-restricted) of |f(x)-f(y)|.
double modulus_of_continuity(const ContinuousFunction& f, double delta, Interval window);

struct TauTable {
  std::vector<double> levels;
  std::vector<std::vector<double>> errors;    // [sequence index][level]
  std::vector<double> sup_norm_errors;        // per sequence index
  std::vector<bool> monotone_tail;            // per level
};

/// sn_l(seq_n - limit) for every n and level, plus sup-norm gaps to expose
/// tau-vs-norm separation.
TauTable tau_convergence_table(const std::vector<ContinuousFunction>& seq,
                               const ContinuousFunction& limit, const SeminormFamily& family = {});

}  // namespace tklab
