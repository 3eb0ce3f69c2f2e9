#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitdg/benchmarks.hpp"
#include "splitdg/config.hpp"
#include "splitdg/field_ops.hpp"
#include "splitdg/operators.hpp"
#include "splitdg/time_integration.hpp"

namespace {

using namespace splitdg;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitVerify = 4;

void write_failure_record(const std::string& dir, const std::string& mode,
                          const SolverFailure& f) {
  nlohmann::json j;
  j["mode"] = mode;
  j["stage"] = f.stage;
  j["step"] = f.step;
  j["time"] = f.time;
  j["stop_reason"] = to_string(f.report.stop);
  j["iterations"] = f.report.iterations;
  j["final_residual"] = f.report.final_residual;
  j["message"] = f.what();
  std::ofstream out(dir + "/failure.json");
  out << j.dump(2) << "\n";
}

RunRequest request_from_config(const RunConfig& rc) {
  RunRequest req;
  req.problem = make_problem(rc.problem, rc.viscosity);
  req.mesh = rc.mesh;
  req.mesh.dim = req.problem.dim;
  if (!rc.mesh_bounds_set) {
    if (rc.problem == "tgv3d") {
      const double pi = std::acos(-1.0);
      req.mesh.lower = {-pi, -pi, -pi};
      req.mesh.upper = {pi, pi, pi};
    } else {
      req.mesh.lower = {-0.5, -0.5, 0.0};
      req.mesh.upper = {0.5, 0.5, 1.0};
    }
  }
  if (req.mesh.dim == 3 && req.mesh.cells[2] == 1) req.mesh.cells[2] = req.mesh.cells[0];
  req.velocity_degree = rc.velocity_degree;
  req.scheme = rc.scheme;
  if (!req.problem.exact && req.scheme.startup == StartupPolicy::exact_interpolation)
    req.scheme.startup = StartupPolicy::increasing_order;
  req.end_time = rc.end_time;
  req.dt = rc.dt;
  req.cfl = rc.cfl;
  req.sample_stride = rc.sampling_stride;
  return req;
}

int run_single(const RunConfig& rc, const std::string& tag) {
  RunRequest req = request_from_config(rc);
  const std::string base = rc.output_dir + "/" + tag + "_" + rc.config_digest;
  try {
    RunResult result = run_simulation(req);
    write_series_csv(base + "_series.csv", result);
    if (rc.verbose_logging) write_step_log_csv(base + "_steps.csv", result);
    std::cout << "steps=" << result.steps << " dt=" << result.dt
              << " div_norm=" << result.final_divergence_norm;
    if (result.eps_u) std::cout << " eps_u=" << *result.eps_u << " eps_p=" << *result.eps_p;
    std::cout << "\nseries: " << base + "_series.csv" << "\n";
    return kExitOk;
  } catch (const SolverFailure& f) {
    write_failure_record(rc.output_dir, tag, f);
    std::cerr << "solver failure: " << f.what() << "\n";
    return kExitSolver;
  }
}

int run_temporal_study(const RunConfig& rc) {
  TemporalStudyConfig cfg;
  cfg.mesh = rc.mesh;
  cfg.velocity_degree = rc.velocity_degree;
  cfg.viscosity = rc.viscosity;
  cfg.end_time = rc.end_time;
  cfg.dts = rc.dt_sweep;
  if (cfg.dts.empty())
    for (const double d : {1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320})
      cfg.dts.push_back(d * rc.end_time);
  cfg.scheme = rc.scheme;
  StudyResult study = temporal_convergence_study(cfg);
  const std::string path =
      rc.output_dir + "/temporal_convergence_" + rc.config_digest + ".csv";
  write_study_csv(path, "dt", study);
  std::cout << "rows=" << study.rows.size() << " fitted_order_u=" << study.fitted_order_u
            << " fitted_order_p=" << study.fitted_order_p << "\ncsv: " << path << "\n";
  if (study.failed) {
    nlohmann::json j;
    j["mode"] = "temporal_study";
    j["message"] = study.failure_context;
    std::ofstream out(rc.output_dir + "/failure.json");
    out << j.dump(2) << "\n";
    std::cerr << "study aborted: " << study.failure_context << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run_spatial_study(const RunConfig& rc) {
  SpatialStudyConfig cfg;
  cfg.velocity_degree = rc.velocity_degree;
  cfg.viscosity = rc.viscosity;
  cfg.end_time = rc.end_time;
  cfg.dt = rc.dt > 0 ? rc.dt : 1e-3;
  for (const long n : rc.mesh_sweep) cfg.meshes.push_back(static_cast<int>(n));
  if (cfg.meshes.empty()) cfg.meshes = {4, 8, 16, 32};
  cfg.scheme = rc.scheme;
  StudyResult study = spatial_convergence_study(cfg);
  const std::string path = rc.output_dir + "/spatial_convergence_" + rc.config_digest + ".csv";
  write_study_csv(path, "h", study);
  std::cout << "rows=" << study.rows.size() << " fitted_order_u=" << study.fitted_order_u
            << " fitted_order_p=" << study.fitted_order_p << "\ncsv: " << path << "\n";
  if (study.failed) {
    std::cerr << "study aborted: " << study.failure_context << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run_equivalence_check(const RunConfig& rc) {
  const double pi = std::acos(-1.0);
  MeshSpec ms;
  ms.dim = 2;
  ms.cells = {rc.mesh.cells[0], rc.mesh.cells[1], 1};
  ms.lower = {-pi, -pi, 0};
  ms.upper = {pi, pi, 0};
  ms.sides.fill(SideSpec::Periodic());
  Mesh mesh = ms.build();
  ProblemSpec prob = make_problem("tgv3d", rc.viscosity);  // f = 0, periodic-compatible
  prob.dim = 2;
  SchemeConfig sc = rc.scheme;
  sc.mode = ConvectionMode::explicit_mode;
  sc.divergence_penalty = sc.continuity_penalty = false;
  SplittingDriver driver(mesh, rc.velocity_degree, prob, sc);
  // random smooth periodic history: low-mode Fourier synthesis
  std::mt19937 rng(rc.seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  SplittingState state;
  state.dt = rc.dt > 0 ? rc.dt : 1e-2;
  for (int i = 0; i < sc.bdf_order; ++i) {
    std::array<std::array<double, 8>, 2> a{};
    for (auto& row : a)
      for (auto& v : row) v = amp(rng);
    VectorFn f = [a](const std::array<double, 3>& x, double) {
      std::array<double, 3> u{0, 0, 0};
      for (int c = 0; c < 2; ++c)
        u[c] = a[c][0] * std::sin(x[0]) * std::cos(x[1]) + a[c][1] * std::cos(x[0]) +
               a[c][2] * std::sin(x[1]) + a[c][3] * std::sin(x[0] + x[1]) +
               a[c][4] * std::cos(2 * x[0]) * std::sin(x[1]) + a[c][5] * std::cos(x[1] + x[0]) +
               a[c][6] * std::sin(2 * x[1]) + a[c][7];
      return u;
    };
    state.velocity.push_back(l2_project(driver.velocity_space(), f, 0.0));
  }
  const double central = driver.dual_splitting_equivalence_check(state);
  const double upwind =
      driver.dual_splitting_equivalence_check(state, PPEConvectiveFlux::upwind);
  std::cout << "central_flux_discrepancy=" << central
            << " upwind_probe_discrepancy=" << upwind << "\n";
  const bool pass = central <= 1e-11 && upwind > 1e-6;
  std::cout << (pass ? "PASS" : "FAIL") << " dual-splitting equivalence\n";
  return pass ? kExitOk : kExitVerify;
}

int run_verify(const RunConfig& rc) {
  int failures = 0;
  auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };
  // coefficient exactness
  for (int j = 1; j <= 4; ++j) {
    const BDFScheme s = bdf_coefficients(j);
    double sum = s.gamma0;
    for (double a : s.alpha) sum -= a;
    check(std::abs(sum) < 1e-13, "bdf-" + std::to_string(j) + " annihilates constants");
    const auto beta = extrapolation_coefficients(j);
    double bs = -1.0;
    for (double b : beta) bs += b;
    check(std::abs(bs) < 1e-13, "extrapolation-" + std::to_string(j) + " reproduces constants");
  }
  // quadrature exactness
  {
    const auto rule = gauss_legendre(4);
    double s7 = 0, s6 = 0;
    for (int q = 0; q < rule.n; ++q) {
      s7 += rule.weights[q] * std::pow(rule.points[q], 7);
      s6 += rule.weights[q] * std::pow(rule.points[q], 6);
    }
    check(std::abs(s7) < 1e-14 && std::abs(s6 - 2.0 / 7.0) < 1e-14,
          "gauss-legendre(4) integrates degree 7");
  }
  // PPE symmetry probe on a small mixed-boundary mesh
  {
    MeshSpec ms;
    ms.cells = {3, 3, 1};
    ms.sides.fill(SideSpec::Dirichlet());
    ms.sides[1] = SideSpec::Neumann();
    Mesh mesh = ms.build();
    ProblemSpec prob = make_tgv2d(rc.viscosity);
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    OperatorConfig oc;
    PressurePoissonOperator ppe(ps, vs, prob, oc);
    std::mt19937 rng(1234);
    std::normal_distribution<double> dist;
    bool sym = true;
    for (int probe = 0; probe < 5; ++probe) {
      std::vector<double> x(ppe.n()), y(ppe.n()), ax(ppe.n()), ay(ppe.n());
      for (auto& v : x) v = dist(rng);
      for (auto& v : y) v = dist(rng);
      ppe.apply(x.data(), ax.data());
      ppe.apply(y.data(), ay.data());
      double xay = 0, yax = 0, scale = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        xay += x[i] * ay[i];
        yax += y[i] * ax[i];
        scale += std::abs(x[i] * ay[i]);
      }
      if (std::abs(xay - yax) > 1e-11 * std::max(1.0, scale)) sym = false;
    }
    check(sym, "PPE operator symmetry probes");
  }
  // dual-splitting equivalence at a small size
  {
    RunConfig sub = rc;
    sub.mesh.cells = {4, 4, 1};
    sub.velocity_degree = std::min(rc.velocity_degree, 3);
    sub.scheme.bdf_order = 2;
    sub.scheme.conv_extrap_order = 2;
    sub.scheme.pressure_bc_extrap_order = 2;
    failures += run_equivalence_check(sub) == kExitOk ? 0 : 1;
  }
  std::cout << (failures == 0 ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
  return failures == 0 ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-order DG incompressible Navier-Stokes solver (consistent splitting)"};
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  int threads = 0;
  bool print_reference = false;
  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--set", overrides, "override: key=value (repeatable)");
  app.add_option("--output", output_dir, "output directory (overrides config)");
  app.add_option("--threads", threads, "worker threads (overrides config)");
  app.add_flag("--print-config-reference", print_reference,
               "print the generated configuration reference and exit");
  CLI11_PARSE(app, argc, argv);

  if (print_reference) {
    std::cout << splitdg::config_reference_markdown();
    return kExitOk;
  }

  splitdg::RunConfig rc;
  try {
    if (config_path.empty()) {
      splitdg::ConfigMap map = splitdg::ConfigMap::from_string("", "<empty>");
      for (const auto& o : overrides) map.apply_override(o);
      rc = splitdg::RunConfig::from_map(std::move(map));
    } else {
      rc = splitdg::RunConfig::load(config_path, overrides);
    }
    if (!output_dir.empty()) rc.output_dir = output_dir;
    if (threads > 0) {
      rc.threads = threads;
      rc.scheme.threads = threads;
    }
    std::filesystem::create_directories(rc.output_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    switch (rc.mode) {
      case splitdg::RunMode::single:
        return run_single(rc, "run_" + rc.problem);
      case splitdg::RunMode::temporal_study:
        return run_temporal_study(rc);
      case splitdg::RunMode::spatial_study:
        return run_spatial_study(rc);
      case splitdg::RunMode::tgv3d_diagnostics: {
        splitdg::RunConfig sub = rc;
        sub.problem = "tgv3d";
        return run_single(sub, "tgv3d");
      }
      case splitdg::RunMode::equivalence_check:
        return run_equivalence_check(rc);
      case splitdg::RunMode::verify:
        return run_verify(rc);
    }
  } catch (const splitdg::SolverFailure& f) {
    write_failure_record(rc.output_dir, "run", f);
    std::cerr << "solver failure: " << f.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
