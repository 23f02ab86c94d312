#pragma once

#include "tklab/function.hpp"
#include "tklab/quadrature.hpp"

namespace tklab {

/// Exponential bound ||T(t)|| <= M e^{omega t}; the heat flow is a
/// contraction, so the stability suite asserts (M, omega) = (1, 0).
struct GrowthBound {
  double M = 1.0;
  double omega = 0.0;
};

class UnsupportedFunction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Heat flow at time t. Uses the catalog's closed-form evolution when
/// present; otherwise falls back to Gauss-Weierstrass quadrature.
ContinuousFunction evolve_exact(const ContinuousFunction& f, double t,
                                const QuadratureSpec& q = {});

/// Always evaluates the Gauss-Weierstrass convolution
///   (T(t)f)(x) = pi^{-1/2} Int e^{-s^2} f(x - 2 sqrt(t) s) ds
/// by quadrature; kept separate so closed forms can be cross-validated.
ContinuousFunction evolve_by_quadrature(const ContinuousFunction& f, double t,
                                        const QuadratureSpec& q = {});

/// A f = f'' (forward heat flow convention). Needs the closed-form second
/// derivative; throws UnsupportedFunction otherwise.
ContinuousFunction apply_generator(const ContinuousFunction& f);

/// (lambda - A) f = lambda f - f''. Carries the second derivative along when
/// f has a fourth derivative, so the operator can be applied twice.
ContinuousFunction shift_minus_generator(const ContinuousFunction& f, double lambda);

/// R(lambda, A) f via the closed kernel
///   (R f)(x) = (2 sqrt(lambda))^{-1} Int e^{-sqrt(lambda)|x-y|} f(y) dy.
/// The result carries its exact second derivative lambda*g - f.
ContinuousFunction resolvent_exact(const ContinuousFunction& f, double lambda,
                                   const QuadratureSpec& q = {});

/// Resolvent realized directly as the truncated Laplace transform
///   Int_0^{t_max} e^{-lambda t} (T(t)f)(x) dt.
/// Requires lambda * t_max >= 20 so the dropped tail (bounded by
/// e^{-lambda t_max} sup|f| / lambda) is below testing tolerances.
ContinuousFunction laplace_resolvent(const ContinuousFunction& f, double lambda, double t_max,
                                     const QuadratureSpec& q = {});

/// max over |x| <= probe_halfwidth of |T(t)f - f - Int_0^t T(s)(Af) ds|,
/// both sides by quadrature.
double integral_identity_residual(const ContinuousFunction& f, double t,
                                  const QuadratureSpec& q = {}, double probe_halfwidth = 8.0,
                                  double probe_density = 8.0);

}  // namespace tklab
