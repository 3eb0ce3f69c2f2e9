#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitdg/splitting.hpp"

namespace splitdg {

/// Decaying 2D vortex on [-0.5, 0.5]^2, zero forcing:
///   u = (-sin(2 pi x2), sin(2 pi x1)) exp(-4 nu pi^2 t)
///   p = -cos(2 pi x1) cos(2 pi x2) exp(-8 nu pi^2 t)
ProblemSpec make_tgv2d(double nu = 0.025);

/// Steady variant of the 2D vortex (no decay) with the matching forcing term.
ProblemSpec make_tgv2d_steady(double nu = 0.025);

/// 3D Taylor-Green vortex on [-pi, pi]^3 (fully periodic), Re = 1/nu.
ProblemSpec make_tgv3d(double nu = 1.0 / 1600.0);

std::array<double, 3> tgv2d_exact_velocity(const std::array<double, 3>& x, double t, double nu);
double tgv2d_exact_pressure(const std::array<double, 3>& x, double t, double nu);
std::array<double, 3> tgv3d_initial_velocity(const std::array<double, 3>& x);
double tgv3d_initial_pressure(const std::array<double, 3>& x);

/// Problem registry ("custom" problems are registered at build time).
using ProblemFactory = std::function<ProblemSpec(double viscosity)>;
void register_problem(const std::string& name, ProblemFactory factory);
ProblemSpec make_problem(const std::string& name, double viscosity);
std::vector<std::string> registered_problems();

/// E = (1/|Omega|) integral of u.u/2, over-integrated with degree+2 points.
double kinetic_energy(const DGField& u);
/// eps = (nu/|Omega|) integral of grad u : grad u, broken gradients.
double dissipation_rate(const DGField& u, double nu);

struct DissipationSeries {
  std::vector<double> numerical;  // -dE/dt - eps per sample
  double total = 0.0;             // -(E(T)-E(0)) - trapezoid(eps)
};

/// Second-order finite differences for dE/dt (one-sided at the ends);
/// requires >= 3 uniformly spaced samples.
DissipationSeries numerical_dissipation(const std::vector<double>& t,
                                        const std::vector<double>& energy,
                                        const std::vector<double>& eps);

// ---------------------------------------------------------------------------

struct MeshSpec {
  int dim = 2;
  std::array<double, 3> lower{-0.5, -0.5, 0.0};
  std::array<double, 3> upper{0.5, 0.5, 1.0};
  std::array<int, 3> cells{8, 8, 1};
  std::array<SideSpec, 6> sides{SideSpec::Dirichlet(), SideSpec::Dirichlet(),
                                SideSpec::Dirichlet(), SideSpec::Dirichlet(),
                                SideSpec::Dirichlet(), SideSpec::Dirichlet()};
  Mesh build() const { return Mesh::cartesian(dim, lower, upper, cells, sides); }
};

struct RunRequest {
  MeshSpec mesh;
  int velocity_degree = 4;
  ProblemSpec problem;
  SchemeConfig scheme;
  double end_time = 1.0;
  double dt = 0.0;          // <= 0: use cfl
  double cfl = 0.4;
  int sample_stride = 1;    // diagnostics every n-th step
  bool collect_series = true;
};

struct StepRecord {
  double t, dt;
  int order;
  int ppe_iterations, momentum_iterations;
  double divergence_norm, kinetic_energy;
};

struct RunResult {
  double end_time = 0.0;
  double dt = 0.0;
  long steps = 0;
  std::optional<double> eps_u, eps_p;  // relative L2 errors vs exact, at T
  std::vector<StepRecord> log;
  std::vector<double> sample_t, sample_energy, sample_eps;
  double final_divergence_norm = 0.0;
};

/// Run one simulation to end_time; throws SolverFailure on divergence.
RunResult run_simulation(const RunRequest& request);

// ---------------------------------------------------------------------------

struct ConvergenceRow {
  double parameter;  // dt or h
  double eps_u, eps_p;
  double order_u, order_p;  // log2 ratio to previous row; 0 for the first
};

struct StudyResult {
  std::vector<ConvergenceRow> rows;
  bool failed = false;
  std::string failure_context;
  double fitted_order_u = 0.0, fitted_order_p = 0.0;
};

/// Least-squares slope of log(eps) against log(parameter).
double fitted_order(const std::vector<double>& parameter, const std::vector<double>& eps);

struct TemporalStudyConfig {
  MeshSpec mesh;
  int velocity_degree = 4;
  double viscosity = 0.025;
  double end_time = 1.0;
  std::vector<double> dts;
  SchemeConfig scheme;
};

StudyResult temporal_convergence_study(const TemporalStudyConfig& cfg);

struct SpatialStudyConfig {
  int velocity_degree = 3;
  double viscosity = 0.025;
  double end_time = 1.0;
  double dt = 1e-3;
  std::vector<int> meshes;  // cells per axis
  SchemeConfig scheme;
};

StudyResult spatial_convergence_study(const SpatialStudyConfig& cfg);

// CSV helpers (deterministic formatting)
void write_study_csv(const std::string& path, const std::string& parameter_name,
                     const StudyResult& study);
void write_series_csv(const std::string& path, const RunResult& run);
void write_step_log_csv(const std::string& path, const RunResult& run);

/// FNV-1a hash of a canonical config string; used to derive output names.
std::string config_hash(const std::string& canonical);

}  // namespace splitdg
