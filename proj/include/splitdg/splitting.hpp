#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "splitdg/operators.hpp"
#include "splitdg/problem.hpp"
#include "splitdg/time_integration.hpp"

namespace splitdg {

enum class PPEPreconditioner { jacobi, block_jacobi };

struct SchemeConfig {
  int bdf_order = 2;
  int conv_extrap_order = 0;         // J_c; 0 selects J for J<=2, J-1 otherwise
  int pressure_bc_extrap_order = 0;  // J_p; same default rule
  ConvectiveForm form = ConvectiveForm::convective;
  ConvectionMode mode = ConvectionMode::semi_implicit;
  bool leray = true;
  bool divergence_penalty = true;
  bool continuity_penalty = true;
  PenaltyConfig penalty;
  SolverSettings ppe_solver{1e-6, 1e-12, 10000, 30};
  SolverSettings momentum_solver{1e-6, 1e-12, 2000, 40};
  StartupPolicy startup = StartupPolicy::increasing_order;
  bool warm_start = true;
  int picard_max = 25;
  double picard_tol = 1e-8;
  int n_q_linear = 0;
  int n_q_nonlinear = 0;
  int threads = 1;
  bool step_diagnostics = true;  // divergence norm and energy in StepStats
  PPEPreconditioner ppe_preconditioner = PPEPreconditioner::block_jacobi;
};

inline int default_extrapolation_order(int bdf_order) {
  return bdf_order <= 2 ? bdf_order : bdf_order - 1;
}

/// Velocity history ring (newest first), the modified pressure, and the clock.
struct SplittingState {
  std::vector<DGField> velocity;  // velocity[i] = u^{n-i}
  DGField pressure;               // modified pressure p_hat^n
  DGField pressure_prev;
  bool has_pressure_prev = false;
  double time = 0.0;
  double dt = 0.0;
  long step = 0;
};

struct StepStats {
  double t = 0.0;
  int active_order = 1;
  SolveReport ppe;
  SolveReport momentum;
  int picard_iterations = 0;
  double divergence_norm = 0.0;
  double kinetic_energy = 0.0;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(std::string stage, long step, double time, SolveReport report,
                const std::string& what)
      : std::runtime_error(what), stage(std::move(stage)), step(step), time(time),
        report(std::move(report)) {}
  std::string stage;
  long step;
  double time;
  SolveReport report;
};

/// Time-step driver: pressure step, extrapolation, momentum step, history
/// rotation. Owns the function spaces and the discrete operators.
class SplittingDriver {
 public:
  SplittingDriver(const Mesh& mesh, int velocity_degree, const ProblemSpec& problem,
                  const SchemeConfig& config);
  ~SplittingDriver();

  const FunctionSpace& velocity_space() const;
  const FunctionSpace& pressure_space() const;
  const SchemeConfig& config() const;
  const ProblemSpec& problem() const;
  PressurePoissonOperator& ppe_operator();
  MomentumOperator& momentum_operator();

  /// Build the initial state at t0 with step size dt. Exact-interpolation
  /// startup prefills the whole history ring; otherwise it holds only the
  /// projected initial condition and the order ramps up.
  SplittingState initialize(double dt, double t0 = 0.0) const;

  /// Solve the modified PPE for p_hat^{n+1}; stats.ppe is filled.
  DGField pressure_step(const SplittingState& state, StepStats* stats = nullptr) const;

  /// Solve the momentum system for u^{n+1} given p_hat^{n+1}.
  DGField momentum_step(const SplittingState& state, const DGField& pressure_new,
                        StepStats* stats = nullptr) const;

  /// One full step of the splitting scheme; mutates the state.
  StepStats advance(SplittingState& state) const;

  /// Max relative discrepancy between the composed dual-splitting PPE
  /// right-hand side and the consistent-splitting one. Requires a fully
  /// periodic mesh and explicit convection. The flux probe replaces the
  /// central flux in r_conv to confirm the check is non-vacuous.
  double dual_splitting_equivalence_check(
      const SplittingState& state,
      PPEConvectiveFlux flux = PPEConvectiveFlux::central) const;

  /// Orders in effect for the next step of `state`.
  struct ActiveOrders {
    int bdf, conv, pressure_bc;
  };
  ActiveOrders active_orders(const SplittingState& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace splitdg
