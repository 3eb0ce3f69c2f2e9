#include "splitdg/benchmarks.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "splitdg/cell_eval.hpp"
#include "splitdg/field_ops.hpp"
#include "splitdg/time_integration.hpp"

namespace splitdg {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::array<double, 3> tgv2d_exact_velocity(const std::array<double, 3>& x, double t, double nu) {
  const double decay = std::exp(-4.0 * nu * kPi * kPi * t);
  return {-std::sin(2.0 * kPi * x[1]) * decay, std::sin(2.0 * kPi * x[0]) * decay, 0.0};
}

double tgv2d_exact_pressure(const std::array<double, 3>& x, double t, double nu) {
  const double decay = std::exp(-8.0 * nu * kPi * kPi * t);
  return -std::cos(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]) * decay;
}

std::array<double, 3> tgv3d_initial_velocity(const std::array<double, 3>& x) {
  return {std::sin(x[0]) * std::cos(x[1]) * std::cos(x[2]),
          -std::cos(x[0]) * std::sin(x[1]) * std::cos(x[2]), 0.0};
}

double tgv3d_initial_pressure(const std::array<double, 3>& x) {
  return (std::cos(2.0 * x[0]) + std::cos(2.0 * x[1])) * (std::cos(2.0 * x[2]) + 2.0) / 16.0;
}

namespace {

ExactSolution tgv2d_exact_solution(double nu) {
  ExactSolution ex;
  ex.velocity = [nu](const std::array<double, 3>& x, double t) {
    return tgv2d_exact_velocity(x, t, nu);
  };
  ex.pressure = [nu](const std::array<double, 3>& x, double t) {
    return tgv2d_exact_pressure(x, t, nu);
  };
  ex.velocity_dt = [nu](const std::array<double, 3>& x, double t) {
    auto u = tgv2d_exact_velocity(x, t, nu);
    const double f = -4.0 * nu * kPi * kPi;
    return std::array<double, 3>{f * u[0], f * u[1], 0.0};
  };
  ex.velocity_grad = [nu](const std::array<double, 3>& x, double t) {
    const double decay = std::exp(-4.0 * nu * kPi * kPi * t);
    std::array<std::array<double, 3>, 3> g{};
    g[0][0] = 0.0;
    g[0][1] = -2.0 * kPi * std::cos(2.0 * kPi * x[1]) * decay;
    g[1][0] = 2.0 * kPi * std::cos(2.0 * kPi * x[0]) * decay;
    g[1][1] = 0.0;
    return g;
  };
  ex.velocity_laplacian = [nu](const std::array<double, 3>& x, double t) {
    auto u = tgv2d_exact_velocity(x, t, nu);
    const double f = -4.0 * kPi * kPi;
    return std::array<double, 3>{f * u[0], f * u[1], 0.0};
  };
  ex.pressure_grad = [nu](const std::array<double, 3>& x, double t) {
    const double decay = std::exp(-8.0 * nu * kPi * kPi * t);
    return std::array<double, 3>{
        2.0 * kPi * std::sin(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]) * decay,
        2.0 * kPi * std::cos(2.0 * kPi * x[0]) * std::sin(2.0 * kPi * x[1]) * decay, 0.0};
  };
  return ex;
}

}  // namespace

ProblemSpec make_tgv2d(double nu) {
  ProblemSpec p;
  p.name = "tgv2d";
  p.dim = 2;
  p.viscosity = nu;
  p.exact = tgv2d_exact_solution(nu);
  const ExactSolution& ex = *p.exact;
  p.initial_velocity = [v = ex.velocity](const std::array<double, 3>& x, double) {
    return v(x, 0.0);
  };
  p.initial_pressure = [q = ex.pressure](const std::array<double, 3>& x, double) {
    return q(x, 0.0);
  };
  p.dirichlet_velocity = ex.velocity;
  p.boundary_pressure = ex.pressure;  // g_p = p on open segments
  p.traction_viscous = [nu, g = ex.velocity_grad](const std::array<double, 3>& x, double t,
                                                  const std::array<double, 3>& n) {
    const auto gu = g(x, t);  // h_u = nu (grad u) n
    std::array<double, 3> h{0, 0, 0};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) h[i] += nu * gu[i][j] * n[j];
    return h;
  };
  return p;
}

ProblemSpec make_tgv2d_steady(double nu) {
  ProblemSpec p;
  p.name = "tgv2d_steady";
  p.dim = 2;
  p.viscosity = nu;
  ExactSolution ex;
  ex.velocity = [](const std::array<double, 3>& x, double) {
    return std::array<double, 3>{-std::sin(2.0 * kPi * x[1]), std::sin(2.0 * kPi * x[0]), 0.0};
  };
  ex.pressure = [](const std::array<double, 3>& x, double) {
    return -std::cos(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]);
  };
  ex.velocity_dt = [](const std::array<double, 3>&, double) {
    return std::array<double, 3>{0.0, 0.0, 0.0};
  };
  ex.velocity_grad = [](const std::array<double, 3>& x, double) {
    std::array<std::array<double, 3>, 3> g{};
    g[0][1] = -2.0 * kPi * std::cos(2.0 * kPi * x[1]);
    g[1][0] = 2.0 * kPi * std::cos(2.0 * kPi * x[0]);
    return g;
  };
  ex.velocity_laplacian = [](const std::array<double, 3>& x, double) {
    const double f = -4.0 * kPi * kPi;
    return std::array<double, 3>{f * -std::sin(2.0 * kPi * x[1]), f * std::sin(2.0 * kPi * x[0]),
                                 0.0};
  };
  ex.pressure_grad = [](const std::array<double, 3>& x, double) {
    return std::array<double, 3>{
        2.0 * kPi * std::sin(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]),
        2.0 * kPi * std::cos(2.0 * kPi * x[0]) * std::sin(2.0 * kPi * x[1]), 0.0};
  };
  p.exact = ex;
  // f = du/dt + (u.grad)u - nu lap u + grad p with du/dt = 0
  p.forcing = [nu, ex](const std::array<double, 3>& x, double t) {
    const auto u = ex.velocity(x, t);
    const auto gu = ex.velocity_grad(x, t);
    const auto lu = ex.velocity_laplacian(x, t);
    const auto gp = ex.pressure_grad(x, t);
    std::array<double, 3> f{0, 0, 0};
    for (int i = 0; i < 2; ++i) {
      double conv = 0.0;
      for (int j = 0; j < 2; ++j) conv += u[j] * gu[i][j];
      f[i] = conv - nu * lu[i] + gp[i];
    }
    return f;
  };
  p.initial_velocity = [v = ex.velocity](const std::array<double, 3>& x, double) {
    return v(x, 0.0);
  };
  p.dirichlet_velocity = ex.velocity;
  p.boundary_pressure = ex.pressure;
  p.traction_viscous = [nu, g = ex.velocity_grad](const std::array<double, 3>& x, double t,
                                                  const std::array<double, 3>& n) {
    const auto gu = g(x, t);
    std::array<double, 3> h{0, 0, 0};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) h[i] += nu * gu[i][j] * n[j];
    return h;
  };
  return p;
}

ProblemSpec make_tgv3d(double nu) {
  ProblemSpec p;
  p.name = "tgv3d";
  p.dim = 3;
  p.viscosity = nu;
  p.initial_velocity = [](const std::array<double, 3>& x, double) {
    return tgv3d_initial_velocity(x);
  };
  p.initial_pressure = [](const std::array<double, 3>& x, double) {
    return tgv3d_initial_pressure(x);
  };
  return p;
}

namespace {
std::map<std::string, ProblemFactory>& registry() {
  static std::map<std::string, ProblemFactory> r = {
      {"tgv2d", [](double nu) { return make_tgv2d(nu); }},
      {"tgv2d_steady", [](double nu) { return make_tgv2d_steady(nu); }},
      {"tgv3d", [](double nu) { return make_tgv3d(nu); }},
  };
  return r;
}
}  // namespace

void register_problem(const std::string& name, ProblemFactory factory) {
  registry()[name] = std::move(factory);
}

ProblemSpec make_problem(const std::string& name, double viscosity) {
  auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown problem: " + name);
  return it->second(viscosity);
}

std::vector<std::string> registered_problems() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

double kinetic_energy(const DGField& u) {
  const double nrm = l2_norm(u, u.space->degree() + 2);
  return 0.5 * nrm * nrm / u.space->mesh().domain_measure();
}

double dissipation_rate(const DGField& u, double nu) {
  const FunctionSpace& space = *u.space;
  const int dim = space.mesh().dim();
  const int n_q = space.degree() + 2;
  space.warm_tables(n_q);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  std::vector<double> d(nqd);
  double s = 0.0;
  for (int c = 0; c < space.mesh().n_cells(); ++c)
    for (int i = 0; i < dim; ++i)
      for (int a = 0; a < dim; ++a) {
        ev.phys_deriv(u.cell_data(c) + i * space.nodes_per_cell(), a, d.data());
        for (int q = 0; q < nqd; ++q)
          s += d[q] * d[q] * ev.qweights()[q] * ev.volume_jacobian();
      }
  return nu * s / space.mesh().domain_measure();
}

DissipationSeries numerical_dissipation(const std::vector<double>& t,
                                        const std::vector<double>& energy,
                                        const std::vector<double>& eps) {
  const std::size_t n = t.size();
  if (n < 3 || energy.size() != n || eps.size() != n)
    throw std::invalid_argument("numerical_dissipation: need >= 3 uniform samples");
  const double h = t[1] - t[0];
  DissipationSeries out;
  out.numerical.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dEdt;
    if (i == 0) {
      dEdt = (-3.0 * energy[0] + 4.0 * energy[1] - energy[2]) / (2.0 * h);
    } else if (i == n - 1) {
      dEdt = (3.0 * energy[n - 1] - 4.0 * energy[n - 2] + energy[n - 3]) / (2.0 * h);
    } else {
      dEdt = (energy[i + 1] - energy[i - 1]) / (2.0 * h);
    }
    out.numerical[i] = -dEdt - eps[i];
  }
  double eps_int = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) eps_int += 0.5 * (eps[i] + eps[i + 1]) * h;
  out.total = -(energy[n - 1] - energy[0]) - eps_int;
  return out;
}

RunResult run_simulation(const RunRequest& request) {
  Mesh mesh = request.mesh.build();
  SplittingDriver driver(mesh, request.velocity_degree, request.problem, request.scheme);
  double dt = request.dt;
  if (dt <= 0.0) {
    DGField u0 = l2_project(driver.velocity_space(), request.problem.initial_velocity, 0.0);
    dt = compute_cfl_time_step(mesh, u0, request.velocity_degree, request.cfl);
    // land exactly on end_time
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(request.end_time / dt - 1e-9)));
    dt = request.end_time / static_cast<double>(steps);
  }
  const long n_steps = std::max<long>(1, static_cast<long>(std::llround(request.end_time / dt)));
  if (std::abs(n_steps * dt - request.end_time) > 1e-9 * std::max(1.0, request.end_time))
    throw std::invalid_argument("run_simulation: end_time must be a multiple of dt");

  SplittingState state = driver.initialize(dt);
  RunResult result;
  result.dt = dt;
  if (request.collect_series) {
    const DGField& u0 = state.velocity.front();
    result.sample_t.push_back(0.0);
    result.sample_energy.push_back(kinetic_energy(u0));
    result.sample_eps.push_back(dissipation_rate(u0, request.problem.viscosity));
  }
  for (long s = 0; s < n_steps; ++s) {
    StepStats stats = driver.advance(state);
    result.log.push_back({stats.t, dt, stats.active_order, stats.ppe.iterations,
                          stats.momentum.iterations, stats.divergence_norm,
                          stats.kinetic_energy});
    if (request.collect_series && ((s + 1) % request.sample_stride == 0 || s + 1 == n_steps)) {
      result.sample_t.push_back(stats.t);
      result.sample_energy.push_back(kinetic_energy(state.velocity.front()));
      result.sample_eps.push_back(
          dissipation_rate(state.velocity.front(), request.problem.viscosity));
    }
  }
  result.steps = n_steps;
  result.end_time = state.time;
  result.final_divergence_norm = divergence_l2_norm(state.velocity.front());
  if (request.problem.exact) {
    result.eps_u =
        relative_l2_error(state.velocity.front(), request.problem.exact->velocity, state.time);
    result.eps_p = relative_l2_error(state.pressure, request.problem.exact->pressure, state.time);
  }
  return result;
}

double fitted_order(const std::vector<double>& parameter, const std::vector<double>& eps) {
  const std::size_t n = parameter.size();
  if (n < 2 || eps.size() != n) throw std::invalid_argument("fitted_order: need >= 2 rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(parameter[i]);
    const double y = std::log(std::max(eps[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

void finish_orders(StudyResult& study, const std::vector<double>& params) {
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    const double r = std::log(params[i - 1] / params[i]);
    study.rows[i].order_u = std::log(study.rows[i - 1].eps_u / study.rows[i].eps_u) / r;
    study.rows[i].order_p = std::log(study.rows[i - 1].eps_p / study.rows[i].eps_p) / r;
  }
  std::vector<double> eu, ep;
  for (const auto& r : study.rows) {
    eu.push_back(r.eps_u);
    ep.push_back(r.eps_p);
  }
  if (study.rows.size() >= 2) {
    std::vector<double> ps(params.begin(), params.begin() + study.rows.size());
    study.fitted_order_u = fitted_order(ps, eu);
    study.fitted_order_p = fitted_order(ps, ep);
  }
}

}  // namespace

StudyResult temporal_convergence_study(const TemporalStudyConfig& cfg) {
  StudyResult study;
  for (const double dt : cfg.dts) {
    RunRequest req;
    req.mesh = cfg.mesh;
    req.velocity_degree = cfg.velocity_degree;
    req.problem = make_tgv2d(cfg.viscosity);
    req.scheme = cfg.scheme;
    req.scheme.startup = StartupPolicy::exact_interpolation;
    req.scheme.step_diagnostics = false;
    req.end_time = cfg.end_time;
    req.dt = dt;
    req.collect_series = false;
    try {
      RunResult r = run_simulation(req);
      study.rows.push_back({dt, *r.eps_u, *r.eps_p, 0.0, 0.0});
    } catch (const SolverFailure& f) {
      study.failed = true;
      study.failure_context = "dt=" + std::to_string(dt) + ": " + f.what();
      break;
    }
  }
  std::vector<double> params;
  for (const auto& r : study.rows) params.push_back(r.parameter);
  if (study.rows.size() >= 2) finish_orders(study, params);
  return study;
}

StudyResult spatial_convergence_study(const SpatialStudyConfig& cfg) {
  StudyResult study;
  std::vector<double> params;
  for (const int n : cfg.meshes) {
    RunRequest req;
    req.mesh.dim = 2;
    req.mesh.cells = {n, n, 1};
    req.velocity_degree = cfg.velocity_degree;
    req.problem = make_tgv2d(cfg.viscosity);
    req.scheme = cfg.scheme;
    req.scheme.startup = StartupPolicy::exact_interpolation;
    req.scheme.step_diagnostics = false;
    req.end_time = cfg.end_time;
    req.dt = cfg.dt;
    req.collect_series = false;
    try {
      RunResult r = run_simulation(req);
      study.rows.push_back({1.0 / n, *r.eps_u, *r.eps_p, 0.0, 0.0});
      params.push_back(1.0 / n);
    } catch (const SolverFailure& f) {
      study.failed = true;
      study.failure_context = "mesh=" + std::to_string(n) + ": " + f.what();
      break;
    }
  }
  if (study.rows.size() >= 2) finish_orders(study, params);
  return study;
}

namespace {
void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}
std::string fmt(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(12) << v;
  return os.str();
}
}  // namespace

void write_study_csv(const std::string& path, const std::string& parameter_name,
                     const StudyResult& study) {
  std::ostringstream os;
  os << parameter_name << ",eps_u,eps_p,order_u,order_p\n";
  for (const auto& r : study.rows)
    os << fmt(r.parameter) << "," << fmt(r.eps_u) << "," << fmt(r.eps_p) << ","
       << fmt(r.order_u) << "," << fmt(r.order_p) << "\n";
  if (study.failed) os << "# aborted: " << study.failure_context << "\n";
  write_file(path, os.str());
}

void write_series_csv(const std::string& path, const RunResult& run) {
  std::ostringstream os;
  os << "t,energy,eps,num_diss\n";
  DissipationSeries diss;
  if (run.sample_t.size() >= 3)
    diss = numerical_dissipation(run.sample_t, run.sample_energy, run.sample_eps);
  for (std::size_t i = 0; i < run.sample_t.size(); ++i) {
    const double nd = i < diss.numerical.size() ? diss.numerical[i] : 0.0;
    os << fmt(run.sample_t[i]) << "," << fmt(run.sample_energy[i]) << ","
       << fmt(run.sample_eps[i]) << "," << fmt(nd) << "\n";
  }
  write_file(path, os.str());
}

void write_step_log_csv(const std::string& path, const RunResult& run) {
  std::ostringstream os;
  os << "t,dt,order,ppe_iterations,momentum_iterations,div_norm,kinetic_energy\n";
  for (const auto& s : run.log)
    os << fmt(s.t) << "," << fmt(s.dt) << "," << s.order << "," << s.ppe_iterations << ","
       << s.momentum_iterations << "," << fmt(s.divergence_norm) << ","
       << fmt(s.kinetic_energy) << "\n";
  write_file(path, os.str());
}

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(8) << std::setfill('0') << static_cast<std::uint32_t>(h ^ (h >> 32));
  return os.str();
}

}  // namespace splitdg
