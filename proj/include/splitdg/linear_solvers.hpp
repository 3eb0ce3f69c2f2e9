#pragma once

#include <functional>
#include <string>
#include <vector>

#include "splitdg/space.hpp"

namespace splitdg {

/// Matrix-free operator: y = A x on fixed-size DoF arrays.
struct LinearOperator {
  std::size_t n = 0;
  std::function<void(const double*, double*)> apply;
  bool symmetric = false;
};

struct SolverSettings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  int max_iter = 1000;
  int restart = 30;  // GMRES only
};

enum class StopReason { rel, abs, maxit, breakdown, stagnation, nan };

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  StopReason stop = StopReason::maxit;
  std::string detail;
};

std::string to_string(StopReason r);

struct Preconditioner {
  std::function<void(const double*, double*)> apply;  // z = M^{-1} r
};

Preconditioner identity_preconditioner(std::size_t n);

/// M^{-1} = diag(A)^{-1}; non-positive-diagonal guard replaces entries by 1.
Preconditioner jacobi_preconditioner(const std::vector<double>& diagonal,
                                     int* guarded_entries = nullptr);

/// Exact block inverse of the cell-wise mass matrix of `space`.
Preconditioner inverse_mass_preconditioner(const FunctionSpace& space);

/// Nullspace handling for the singular all-Neumann pressure problem:
/// compatibility projection of the right-hand side (moments) and L2-mean
/// removal from iterates.
class MeanProjector {
 public:
  explicit MeanProjector(const FunctionSpace& space);
  /// remove the constant-moment component: b -= (1^T b / 1^T 1) * 1
  void project_rhs(std::vector<double>& b) const;
  /// remove the L2 mean: x -= (integral(x)/|Omega|) * 1
  void project_solution(std::vector<double>& x) const;
  double solution_mean(const std::vector<double>& x) const;
  double rhs_mean(const std::vector<double>& b) const;

 private:
  std::size_t n_;
  double measure_;
  std::vector<double> int_weights_;  // integral of each basis function
};

/// project_out_constants: returned array has zero L2 mean over the mesh.
std::vector<double> project_out_constants(const std::vector<double>& x,
                                          const FunctionSpace& space);

SolveReport cg_solve(const LinearOperator& A, const std::vector<double>& b,
                     const Preconditioner& M, const SolverSettings& settings,
                     std::vector<double>& x, const MeanProjector* nullspace = nullptr);

SolveReport gmres_solve(const LinearOperator& A, const std::vector<double>& b,
                        const Preconditioner& M, const SolverSettings& settings,
                        std::vector<double>& x);

}  // namespace splitdg
