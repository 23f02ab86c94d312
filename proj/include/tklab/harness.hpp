#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tklab/evolve.hpp"
#include "tklab/function.hpp"
#include "tklab/grid.hpp"
#include "tklab/heat_oracle.hpp"
#include "tklab/tridiag.hpp"

namespace tklab {

using GridSchedule = std::vector<GridSpec>;

/// Doubling family; the window grows with the resolution so the Dirichlet
/// truncation error stays subdominant.
GridSchedule default_schedule();

/// Pass thresholds shared by the harness, the CLI and the acceptance suite.
namespace thresholds {
inline constexpr double kPairing = 1e-12;          // normalized duality pairing
inline constexpr double kContraction = 1e-10;      // growth-ratio slack
inline constexpr double kOperatorRatio = 1e-12;    // sampling/prolongation norm slack
inline constexpr double kIdempotency = 1e-12;      // pi_n^2 = pi_n on probe grids
inline constexpr double kOrderLo = 1.7;
inline constexpr double kOrderHi = 2.3;
inline constexpr double kOrderLevelCap = 4.0;      // orders asserted at levels <= 4
inline constexpr double kResolventFinest = 5e-4;
inline constexpr double kSemigroupFinest = 1e-3;
inline constexpr double kDecompositionResidual = 1e-6;
inline constexpr double kOracleAgreement = 1e-6;
inline constexpr double kDemoTail = 1e-8;
inline constexpr double kDemoSupBand = 0.05;
inline constexpr double kChirpSeminormGap = 1e-2;
inline constexpr double kChirpSupGap = 0.1;
inline constexpr double kBoundSlack = 1e-10;       // consistency bound domination slack
}  // namespace thresholds

// --- order estimation --------------------------------------------------------

struct OrderEstimate {
  std::optional<double> slope;       // least-squares slope of log err vs log dx
  bool exact = false;                // every error was zero
  bool monotone = true;              // nonzero errors decrease along the schedule
  std::vector<std::size_t> excluded; // indices dropped because the error was 0
};

OrderEstimate estimate_order(std::span<const double> errors, std::span<const double> dx);

// --- operator identity checks (A1/A3, projections) ---------------------------

struct ProjectionReport {
  struct Row {
    GridSpec grid;
    double max_sample_ratio;    // ||P_n f||_n / ||f||
    double max_prolong_ratio;   // ||E_n u|| / ||u||_n
    double roundtrip_max_err;   // max |P_n E_n u - u|
    double idempotency_max;     // max |pi_n^2 f - pi_n f| on probes
  };
  std::vector<Row> rows;
  double m1_hat = 0.0;
  double m2_hat = 0.0;
  std::vector<std::string> failures;
  bool pass = false;
};

ProjectionReport projection_checks(const GridSchedule& schedule,
                                   const std::vector<ContinuousFunction>& probes,
                                   int random_trials, std::uint64_t seed);

// --- convergence tables -------------------------------------------------------

struct LevelErrorRow {
  GridSpec grid;
  double level;
  double error;
  bool sup_bounded;
};

struct LevelOrder {
  double level;
  OrderEstimate order;
};

struct ConvergenceReport {
  std::string experiment;
  std::vector<LevelErrorRow> rows;   // ordered by (grid, level)
  std::vector<LevelOrder> orders;    // per level across the schedule
  GrowthBound growth{1.0, 0.0};
  bool norm_bounded = false;
  bool pass = false;
  std::vector<std::string> notes;
};

/// sn_l(E_n P_n f - f) over the schedule: realizes the tau-limit half of (A2)
/// with the norm bound reported alongside.
ConvergenceReport interpolation_convergence(const ContinuousFunction& f,
                                            const GridSchedule& schedule,
                                            const SeminormFamily& family);

/// sn_l(E_n (lambda I_n - A_n)^{-1} P_n f - R(lambda, A) f) against the
/// closed-kernel quadrature oracle.
ConvergenceReport resolvent_convergence(const ContinuousFunction& f, double lambda0,
                                        const GridSchedule& schedule, const SeminormFamily& family,
                                        const QuadratureSpec& q = {});

/// max over a uniform time list in [0, t0] of sn_l(E_n T_n(t) P_n f - T(t) f).
ConvergenceReport semigroup_convergence(const ContinuousFunction& f, double t0, int time_points,
                                        const GridSchedule& schedule, const SeminormFamily& family,
                                        const QuadratureSpec& q = {},
                                        EvolveMethod method = EvolveMethod::pade_expm);

// --- generator consistency ----------------------------------------------------

struct ConsistencyRow {
  GridSpec grid;
  double level;
  double interp_error;     // sn_l(E_n P_n u - u)
  double generator_error;  // sn_l(E_n A_n P_n u - A u)
  double bound;            // interpolation error of u'' plus modulus term
};

struct ConsistencyReport {
  std::string experiment;
  std::vector<ConsistencyRow> rows;
  std::vector<LevelOrder> orders;  // generator column
  bool bound_dominates = false;
  bool pass = false;
};

ConsistencyReport generator_consistency(const ContinuousFunction& u, const GridSchedule& schedule,
                                        const SeminormFamily& family);

// --- stability ------------------------------------------------------------------

struct StabilityReport {
  struct Row {
    GridSpec grid;
    double max_pairing;        // max <A_n u, v> / ||u||_n^2
    double growth_backward_euler;
    double growth_crank_nicolson;
    double growth_pade;        // max matvec ratio over sampled vectors
    double pade_min_entry;     // min entry of exp(t A_n) over tested t
    double pade_max_row_sum;   // max row sum over tested t
  };
  std::vector<Row> rows;
  double m_hat = 1.0;
  double omega_hat = 0.0;
  bool pass = false;
  std::vector<std::string> failures;
  std::optional<GridVector> witness;
};

/// Dissipativity of the duality pairing plus sup-norm contraction of every
/// stepper; trials >= 100 random vectors per grid feed the pairing check.
StabilityReport stability_suite(const GridSchedule& schedule, int trials,
                                std::span<const double> t_list, std::uint64_t seed);

// --- error representation -------------------------------------------------------

struct ErrorDecompositionResult {
  GridSpec grid;
  double t = 0.0;
  double lambda0 = 1.0;
  GridVector term1, term2, term3, reconstructed, measured;
  double term1_norm = 0.0, term2_norm = 0.0, term3_norm = 0.0, measured_norm = 0.0;
  double residual = 0.0;           // max |reconstructed - measured|
  double residual_relative = 0.0;  // residual / (1 + measured_norm)
};

/// Splits e_n(t) = (S_n(t) pi_n - pi_n S(t)) x into the three shifted terms of
/// the discrete-vs-continuous error representation, with S(t) = e^{-lambda0 t} T(t)
/// and Delta_n = (lambda0 - A)^{-1} - (lambda0 - A_n)^{-1} pi_n. The time
/// integral uses composite Simpson with 64 intervals and the discrete
/// propagator inside. Requires closed-form evolution with second and fourth
/// derivatives (catalog Gaussians).
ErrorDecompositionResult error_decomposition(const ContinuousFunction& x, double t,
                                             const GridSpec& grid, double lambda0,
                                             const QuadratureSpec& q = {});

// --- locality demos ---------------------------------------------------------------

struct TranslationDemoReport {
  struct Row {
    double shift;
    double level;
    double max_sn_exact;     // max over t in [0, t0] of sn_l(T(t) f(. - shift))
    double max_sn_discrete;  // same for the discretized flow
    double sup_exact;        // sup-norm estimate of T(t0) f(. - shift)
  };
  std::vector<Row> rows;
  double t0 = 0.0;
  double far_shift_margin = 0.0;  // level + support radius + 6 sqrt(4 t0)
  bool pass = false;
};

/// Translated bumps: tau-null sequences with constant sup norm, under both
/// the exact and the discrete flow.
TranslationDemoReport translation_demo(const ContinuousFunction& compact_bump,
                                       std::span<const double> shifts, double t0,
                                       const GridSpec& grid, const SeminormFamily& family,
                                       const QuadratureSpec& q = {});

struct ChirpDemoReport {
  struct Row {
    double t;
    double seminorm_gap;   // sn_2(T(t) f - f)
    double far_field_gap;  // max |T(t) f - f| sampled around x = 1/(2 sqrt(t))
  };
  std::vector<Row> rows;
  bool pass = false;
};

/// Local continuity of the orbit at t -> 0 against the persistent far-field
/// sup-norm gap for the chirp.
ChirpDemoReport chirp_demo(std::span<const double> t_list, const QuadratureSpec& q = {});

}  // namespace tklab
