#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "splitdg/space.hpp"

namespace splitdg {

using GradientFn =
    std::function<std::array<std::array<double, 3>, 3>(const std::array<double, 3>&, double)>;
/// Traction-type data: depends on the outward normal of the face.
using TractionFn = std::function<std::array<double, 3>(
    const std::array<double, 3>&, double, const std::array<double, 3>&)>;

/// Exact solution with the analytic derivatives needed for residual checks.
/// velocity_grad returns grad[i][j] = d u_i / d x_j.
struct ExactSolution {
  VectorFn velocity;
  ScalarFn pressure;
  VectorFn velocity_dt;
  GradientFn velocity_grad;
  VectorFn velocity_laplacian;
  VectorFn pressure_grad;
};

/// Continuous problem data: viscosity, forcing, boundary and initial data.
/// On Neumann segments the full traction is h = h_u - g_p n with
/// h_u = nu (grad u) n and g_p = p.
struct ProblemSpec {
  std::string name;
  int dim = 2;
  double viscosity = 1.0;
  VectorFn forcing;             // f(x,t); empty means zero
  VectorFn initial_velocity;    // u0(x)
  ScalarFn initial_pressure;    // optional, diagnostics only
  VectorFn dirichlet_velocity;   // g(x,t)
  ScalarFn boundary_pressure;    // g_p(x,t) on Neumann segments
  TractionFn traction_viscous;   // h_u(x,t,n) on Neumann segments
  std::optional<ExactSolution> exact;

  std::array<double, 3> eval_forcing(const std::array<double, 3>& x, double t) const {
    return forcing ? forcing(x, t) : std::array<double, 3>{0.0, 0.0, 0.0};
  }
};

/// Max norm of the momentum residual  du/dt + (u.grad)u - nu lap(u) + grad p - f
/// of the problem's exact solution at `n_samples` seeded random points in
/// `mesh_box` x [0, t_max].
double manufactured_forcing_check(const ProblemSpec& problem,
                                  const std::array<double, 3>& box_lower,
                                  const std::array<double, 3>& box_upper, double t_max,
                                  int n_samples = 100, unsigned seed = 42);

/// Residual of the traction split h - (h_u - g_p n) against the exact fields
/// at one point, maximized over components.
double traction_split_residual(const ProblemSpec& problem, const std::array<double, 3>& x,
                               double t, const std::array<double, 3>& normal);

}  // namespace splitdg
