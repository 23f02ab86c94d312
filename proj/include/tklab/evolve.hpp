#pragma once

#include <optional>
#include <string>

#include "tklab/expm.hpp"
#include "tklab/tridiag.hpp"

namespace tklab {

enum class EvolveMethod { backward_euler, crank_nicolson, pade_expm };

const char* to_string(EvolveMethod m);
EvolveMethod evolve_method_from_string(const std::string& s);

class StabilityError : public std::runtime_error {
 public:
  StabilityError(EvolveMethod m, int substeps)
      : std::runtime_error(std::string("non-finite state during ") + to_string(m) + " with m = " +
                           std::to_string(substeps)) {}
};

/// Substep defaults: m = ceil(4 t N^2) keeps the Crank-Nicolson step inside
/// dt <= dx^2/4, where (I + dt A/2) is nonnegative with row sums <= 1 and the
/// step is a sup-norm contraction. Backward Euler contracts for every m.
int default_substeps(EvolveMethod method, double t, const GridSpec& g);

struct EvolveResult {
  GridVector state;
  EvolveMethod method;
  int substeps;
};

/// T_n(t) u0, realized by the selected method. t = 0 returns u0 unchanged.
EvolveResult evolve_discrete(const TridiagOperator& a, const GridVector& u0, double t,
                             EvolveMethod method = EvolveMethod::pade_expm,
                             std::optional<int> substeps = {});

/// exp(dt A_n) held as a dense matrix for repeated stepping.
class DiscretePropagator {
 public:
  DiscretePropagator(const TridiagOperator& a, double dt, ExecMode mode = default_exec_mode());
  double dt() const { return dt_; }
  const DenseMatrix& matrix() const { return e_; }
  const GridSpec& grid() const { return grid_; }
  GridVector apply(const GridVector& u) const;

 private:
  GridSpec grid_;
  double dt_;
  DenseMatrix e_;
  ExecMode mode_;
};

}  // namespace tklab
