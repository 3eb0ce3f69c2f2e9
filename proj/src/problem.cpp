#include "splitdg/problem.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace splitdg {

double manufactured_forcing_check(const ProblemSpec& problem,
                                  const std::array<double, 3>& box_lower,
                                  const std::array<double, 3>& box_upper, double t_max,
                                  int n_samples, unsigned seed) {
  if (!problem.exact) throw std::invalid_argument("manufactured_forcing_check: no exact solution");
  const ExactSolution& ex = *problem.exact;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double max_res = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < problem.dim; ++a)
      x[a] = box_lower[a] + unit(rng) * (box_upper[a] - box_lower[a]);
    const double t = t_max * unit(rng);
    const auto u = ex.velocity(x, t);
    const auto ut = ex.velocity_dt(x, t);
    const auto gu = ex.velocity_grad(x, t);
    const auto lu = ex.velocity_laplacian(x, t);
    const auto gp = ex.pressure_grad(x, t);
    const auto f = problem.eval_forcing(x, t);
    for (int i = 0; i < problem.dim; ++i) {
      double conv = 0.0;
      for (int j = 0; j < problem.dim; ++j) conv += u[j] * gu[i][j];
      const double r = ut[i] + conv - problem.viscosity * lu[i] + gp[i] - f[i];
      max_res = std::max(max_res, std::abs(r));
    }
  }
  return max_res;
}

double traction_split_residual(const ProblemSpec& problem, const std::array<double, 3>& x,
                               double t, const std::array<double, 3>& normal) {
  if (!problem.exact || !problem.boundary_pressure || !problem.traction_viscous)
    throw std::invalid_argument("traction_split_residual: missing callables");
  const ExactSolution& ex = *problem.exact;
  const auto gu = ex.velocity_grad(x, t);
  const double p = ex.pressure(x, t);
  const auto hu = problem.traction_viscous(x, t, normal);
  const double gp = problem.boundary_pressure(x, t);
  double res = 0.0;
  for (int i = 0; i < problem.dim; ++i) {
    double full = -p * normal[i];  // (nu grad u - p I) n
    for (int j = 0; j < problem.dim; ++j) full += problem.viscosity * gu[i][j] * normal[j];
    const double split = hu[i] - gp * normal[i];
    res = std::max(res, std::abs(full - split));
  }
  return res;
}

}  // namespace splitdg
