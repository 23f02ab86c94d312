#pragma once

#include "tklab/dense.hpp"
#include "tklab/grid.hpp"

namespace tklab {

/// Symmetric tridiagonal operator over a grid's index range with Dirichlet
/// ghost values u_{k_min-1} = u_{k_max+1} = 0.
struct TridiagOperator {
  GridSpec grid;
  std::vector<double> sub;    // size n-1
  std::vector<double> diag;   // size n
  std::vector<double> super;  // size n-1

  GridVector apply(const GridVector& u) const;
  DenseMatrix to_dense() const;
};

/// The discrete Laplacian A_n: (A_n u)_k = (u_{k+1} - 2 u_k + u_{k-1}) / dx^2
/// (forward heat-flow sign), Dirichlet ghosts at both ends.
TridiagOperator build_generator(const GridSpec& g);

/// Solves (alpha I - beta A) u = rhs by the Thomas algorithm. Requires
/// alpha > 0, beta >= 0 so the system is strictly diagonally dominant.
GridVector shifted_solve(const TridiagOperator& a, double alpha, double beta,
                         const GridVector& rhs);

/// (lambda I - A_n)^{-1} rhs, lambda > 0.
GridVector resolvent_solve(const TridiagOperator& a, double lambda, const GridVector& rhs);

/// Index of the first entry attaining max |u_k| (smallest-index tie-break).
std::int64_t sup_argmax_index(const GridVector& u);

/// <A_n u, v> for the duality vector v supported at the argmax index with
/// value ||u||_n sgn(u_i). The dissipativity estimate says this is <= 0.
double duality_pairing(const TridiagOperator& a, const GridVector& u);

}  // namespace tklab
