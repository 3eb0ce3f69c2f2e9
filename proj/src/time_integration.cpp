#include "splitdg/time_integration.hpp"

#include <cmath>
#include <stdexcept>

#include "splitdg/field_ops.hpp"
#include "splitdg/small_dense.hpp"

namespace splitdg {

BDFScheme bdf_coefficients(int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("bdf_coefficients: order must be in 1..4");
  // order conditions on q(t) = t^m, m = 0..J, with t^{n+1} = 0 and history at -i:
  //   gamma0 q(0) - sum_i alpha_i q(-i) = q'(0)
  const int J = order;
  DenseMatrix A(J + 1, J + 1);
  std::vector<double> rhs(J + 1, 0.0);
  for (int m = 0; m <= J; ++m) {
    A(m, 0) = m == 0 ? 1.0 : 0.0;  // gamma0 column
    for (int i = 1; i <= J; ++i) A(m, i) = -std::pow(-static_cast<double>(i), m);
    rhs[m] = m == 1 ? 1.0 : 0.0;
  }
  const auto sol = solve_dense(A, rhs);
  BDFScheme s;
  s.order = J;
  s.gamma0 = sol[0];
  s.alpha.assign(sol.begin() + 1, sol.end());
  return s;
}

std::vector<double> extrapolation_coefficients(int m) {
  if (m < 1 || m > 4) throw std::invalid_argument("extrapolation_coefficients: order must be in 1..4");
  // sum_i beta_i (-i)^p = 0^p for p = 0..m-1
  DenseMatrix A(m, m);
  std::vector<double> rhs(m, 0.0);
  for (int p = 0; p < m; ++p) {
    for (int i = 1; i <= m; ++i) A(p, i - 1) = std::pow(-static_cast<double>(i), p);
    rhs[p] = p == 0 ? 1.0 : 0.0;
  }
  return solve_dense(A, rhs);
}

double compute_cfl_time_step(const Mesh& mesh, const DGField& u, int k_u, double cfl) {
  const double umax = std::max(max_nodal_norm(u), 1e-12);
  return cfl * mesh.h_min() / (std::pow(static_cast<double>(k_u), 1.5) * umax);
}

double boundary_time_derivative(std::span<const double> g_newest_first, int order, double dt) {
  const BDFScheme s = bdf_coefficients(order);
  if (static_cast<int>(g_newest_first.size()) < order + 1)
    throw std::invalid_argument("boundary_time_derivative: insufficient history");
  double v = s.gamma0 * g_newest_first[0];
  for (int i = 1; i <= order; ++i) v -= s.alpha[i - 1] * g_newest_first[i];
  return v / dt;
}

std::vector<StartupStep> startup_sequence(StartupPolicy policy, int order, bool have_exact) {
  if (policy == StartupPolicy::exact_interpolation) {
    if (!have_exact)
      throw std::invalid_argument("startup_sequence: exact-interpolation requires an exact solution");
    return {};
  }
  std::vector<StartupStep> plan;
  for (int j = 1; j < order; ++j) plan.push_back({j, j, j});
  return plan;
}

}  // namespace splitdg
