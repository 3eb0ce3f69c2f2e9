#pragma once

#include <span>
#include <vector>

#include "splitdg/space.hpp"

namespace splitdg {

/// BDF time integration constants for a uniform step:
/// (gamma0 u^{n+1} - sum_i alpha_i u^{n+1-i}) / dt  approximates  u'(t^{n+1}).
struct BDFScheme {
  int order = 1;
  double gamma0 = 1.0;
  std::vector<double> alpha;
};

BDFScheme bdf_coefficients(int order);

/// Extrapolation to t^{n+1} from m previous levels: sum_i beta_i u^{n+1-i};
/// exact for polynomials in t of degree <= m-1.
std::vector<double> extrapolation_coefficients(int m);

/// dt = cfl * h_min / (k_u^{1.5} * max(||u||_inf, 1e-12)).
double compute_cfl_time_step(const Mesh& mesh, const DGField& u, int k_u, double cfl);

/// BDF approximation of d/dt g at t^{n+1} from samples g^{n+1}, g^n, ...
/// (newest first, J+1 entries used).
double boundary_time_derivative(std::span<const double> g_newest_first, int order, double dt);

enum class StartupPolicy { exact_interpolation, increasing_order };

struct StartupStep {
  int bdf_order;
  int conv_order;         // J_c for this step
  int pressure_bc_order;  // J_p for this step
};

/// Ramp plan for the first J-1 steps. Empty for exact-interpolation startup
/// (the history ring is prefilled) and for J = 1.
std::vector<StartupStep> startup_sequence(StartupPolicy policy, int order, bool have_exact);

}  // namespace splitdg
