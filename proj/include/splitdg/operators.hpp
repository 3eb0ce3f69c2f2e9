#pragma once

#include <memory>
#include <vector>

#include "splitdg/linear_solvers.hpp"
#include "splitdg/problem.hpp"
#include "splitdg/space.hpp"

namespace splitdg {

struct PenaltyConfig {
  double zeta_d = 1.0;
  double zeta_c = 1.0;
  double zeta_lf = 0.5;
};

enum class ConvectiveForm { convective, divergence };
enum class ConvectionMode { explicit_mode, semi_implicit, implicit };

/// Interior-face flux used when assembling the convective PPE right-hand side.
/// The scheme itself uses the central (average) flux; the upwind variant
/// exists as a sensitivity probe for the dual-splitting equivalence check.
enum class PPEConvectiveFlux { central, upwind };

struct OperatorConfig {
  PenaltyConfig penalty;
  ConvectiveForm form = ConvectiveForm::convective;
  bool divergence_penalty = true;
  bool continuity_penalty = true;
  int n_q_linear = 0;     // 0: degree + 1
  int n_q_nonlinear = 0;  // 0: degree + 2
  int threads = 1;
};

/// Interior-penalty stabilization parameter for one side of a face:
/// (k+1)^2 * |face| / |cell|. Interior faces take the max over both sides.
double sipg_tau(int degree, double face_area, double cell_volume);

/// omega = elementwise L2 projection of curl(u) into omega_space
/// (scalar for 2D fields, vector for 3D).
DGField vorticity_projection(const DGField& u, const FunctionSpace& omega_space);

/// SIPG discretization of the pressure Poisson problem: the stationary
/// left-hand side l_p and the consistent right-hand side pieces r_f, r_conv,
/// r_Leray and r_SIPG. All rhs routines accumulate moment vectors in the
/// pressure space.
class PressurePoissonOperator {
 public:
  PressurePoissonOperator(const FunctionSpace& pressure_space,
                          const FunctionSpace& velocity_space, const ProblemSpec& problem,
                          const OperatorConfig& cfg);
  ~PressurePoissonOperator();

  std::size_t n() const;
  void apply(const double* p, double* y) const;
  LinearOperator linear_operator() const;
  std::vector<double> diagonal() const;
  /// dense cell-diagonal blocks of l_p, row-major npc x npc per cell
  std::vector<double> cell_blocks() const;
  /// exact inverse of the cell-diagonal blocks (block-Jacobi)
  Preconditioner block_jacobi_preconditioner() const;
  /// true when no Neumann (open) boundary exists: constants are in the kernel
  bool singular() const;

  void add_rhs_forcing(double t, std::vector<double>& rhs) const;
  void add_rhs_convective(const DGField& u, double scale, std::vector<double>& rhs,
                          PPEConvectiveFlux flux = PPEConvectiveFlux::central) const;
  void add_rhs_leray(const DGField& u, double scale, std::vector<double>& rhs) const;
  /// r_SIPG at t^{n+1}; u_extrapolated is the beta_hat-weighted history sum
  /// used for the curl-curl boundary term (ignored without Dirichlet faces).
  void add_rhs_sipg(double t, const DGField* u_extrapolated, double gamma0_over_dt,
                    std::vector<double>& rhs) const;

  const FunctionSpace& pressure_space() const;
  const FunctionSpace& velocity_space() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Discrete momentum operators: m, c_conv/c_div, v, a_div, a_cont and the
/// right-hand sides f, m_r, b_p, c_r, v_r. Apply routines accumulate into
/// velocity-space moment vectors.
class MomentumOperator {
 public:
  MomentumOperator(const FunctionSpace& velocity_space, const FunctionSpace& pressure_space,
                   const ProblemSpec& problem, const OperatorConfig& cfg);
  ~MomentumOperator();

  std::size_t n() const;

  /// configure the lhs for the current step/solve
  void set_time_factor(double gamma0_over_dt);
  void set_linearization(const DGField& u_star);

  /// full left-hand side m + c + v + a_div + a_cont with the configured
  /// linearization (convection omitted in explicit mode)
  void apply(const double* u, double* y) const;
  LinearOperator linear_operator(ConvectionMode mode) const;

  void apply_mass(const DGField& u, double gamma0, double dt, std::vector<double>& y) const;
  void apply_convective(const DGField& u, const DGField& u_star, std::vector<double>& y,
                        double scale = 1.0) const;
  void apply_viscous(const DGField& u, std::vector<double>& y) const;
  void apply_divergence_penalty(const DGField& u, const DGField& u_star,
                                std::vector<double>& y) const;
  void apply_continuity_penalty(const DGField& u, const DGField& u_star,
                                std::vector<double>& y) const;

  void add_rhs_forcing(double t, std::vector<double>& rhs) const;
  /// (scale * u_combined, v); callers pass sum_i alpha_i/dt u^{n+1-i}
  void add_rhs_mass_history(const DGField& u_combined, double scale,
                            std::vector<double>& rhs) const;
  void add_rhs_pressure(const DGField& p_hat, double t, std::vector<double>& rhs) const;
  void add_rhs_convective_data(const DGField& u_star, double t, double scale,
                               std::vector<double>& rhs) const;
  void add_rhs_viscous_data(double t, std::vector<double>& rhs) const;
  void add_rhs_continuity_penalty_data(const DGField& u_star, double t,
                                       std::vector<double>& rhs) const;

  const FunctionSpace& velocity_space() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace splitdg
