#include "splitdg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace splitdg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<ConfigKeyInfo>& config_registry() {
  static const std::vector<ConfigKeyInfo> keys = {
      {"mode", "run", ConfigType::enum_type, "single",
       "run mode",
       {"single", "temporal_study", "spatial_study", "tgv3d_diagnostics", "equivalence_check",
        "verify"}},
      {"problem", "run", ConfigType::string_type, "tgv2d",
       "built-in problem name (tgv2d, tgv2d_steady, tgv3d, or a registered custom problem)", {}},
      {"viscosity", "run", ConfigType::real_type, "0.025", "kinematic viscosity nu", {}},
      {"output_dir", "run", ConfigType::string_type, ".", "directory for CSV outputs", {}},
      {"threads", "run", ConfigType::int_type, "1", "worker threads for cell/face loops", {}},
      {"sampling_stride", "run", ConfigType::int_type, "1",
       "record diagnostics every n-th step", {}},
      {"verbose_logging", "run", ConfigType::bool_type, "false",
       "write the per-step solver log CSV", {}},
      {"seed", "run", ConfigType::int_type, "7",
       "seed for randomized diagnostics (equivalence check history)", {}},

      {"dim", "mesh", ConfigType::int_type, "2", "spatial dimension (2 or 3)", {}},
      {"mesh_cells", "mesh", ConfigType::int_type, "16", "cells per axis", {}},
      {"domain_lower", "mesh", ConfigType::real_list, "",
       "lower domain corner (comma separated); empty: problem default", {}},
      {"domain_upper", "mesh", ConfigType::real_list, "",
       "upper domain corner (comma separated); empty: problem default", {}},
      {"boundary", "mesh", ConfigType::enum_type, "auto",
       "boundary handling: all-Dirichlet, fully periodic, or mixed "
       "(Neumann at the upper x side); auto follows the problem",
       {"auto", "dirichlet", "periodic", "mixed"}},

      {"velocity_degree", "spaces", ConfigType::int_type, "4", "velocity polynomial degree k_u", {}},
      {"pressure_degree", "spaces", ConfigType::int_type, "-1",
       "pressure degree k_p; must equal k_u - 1 (set automatically when -1)", {}},

      {"bdf_order", "scheme", ConfigType::int_type, "2", "BDF order J (1..4)", {}},
      {"convective_extrapolation_order", "scheme", ConfigType::int_type, "0",
       "J_c; 0 selects J for J<=2 and J-1 otherwise", {}},
      {"pressure_bc_extrapolation_order", "scheme", ConfigType::int_type, "0",
       "J_p; 0 selects J for J<=2 and J-1 otherwise", {}},
      {"convective_form", "scheme", ConfigType::enum_type, "convective",
       "convective term form", {"convective", "divergence"}},
      {"convection_mode", "scheme", ConfigType::enum_type, "semi_implicit",
       "linearization of the convective term", {"explicit", "semi_implicit", "implicit"}},
      {"zeta_d", "scheme", ConfigType::real_type, "1.0", "divergence penalty parameter", {}},
      {"zeta_c", "scheme", ConfigType::real_type, "1.0", "continuity penalty parameter", {}},
      {"zeta_lf", "scheme", ConfigType::real_type, "0.5", "Lax-Friedrichs flux parameter", {}},
      {"enable_div_penalty", "scheme", ConfigType::bool_type, "true",
       "divergence penalty term a_div", {}},
      {"enable_cont_penalty", "scheme", ConfigType::bool_type, "true",
       "continuity penalty term a_cont", {}},
      {"enable_leray", "scheme", ConfigType::bool_type, "true",
       "Leray terms in the PPE right-hand side", {}},
      {"overintegration_points", "scheme", ConfigType::int_type, "0",
       "quadrature points per axis for nonlinear terms; 0: degree+2", {}},
      {"startup_policy", "scheme", ConfigType::enum_type, "auto",
       "history startup", {"auto", "exact_interpolation", "increasing_order"}},
      {"warm_start", "scheme", ConfigType::bool_type, "true",
       "use extrapolated initial guesses for the linear solves", {}},

      {"time_step", "time", ConfigType::real_type, "0", "fixed step size; 0: use cfl", {}},
      {"cfl", "time", ConfigType::real_type, "0.4", "target CFL number", {}},
      {"end_time", "time", ConfigType::real_type, "1.0", "final time T", {}},

      {"ppe_preconditioner", "solvers", ConfigType::enum_type, "block_jacobi",
       "CG preconditioner for the pressure Poisson solve",
       {"jacobi", "block_jacobi"}},
      {"ppe_rel_tol", "solvers", ConfigType::real_type, "1e-6", "PPE CG relative tolerance", {}},
      {"ppe_abs_tol", "solvers", ConfigType::real_type, "1e-12", "PPE CG absolute tolerance", {}},
      {"ppe_max_iter", "solvers", ConfigType::int_type, "10000", "PPE CG iteration cap", {}},
      {"momentum_rel_tol", "solvers", ConfigType::real_type, "1e-6",
       "momentum GMRES relative tolerance", {}},
      {"momentum_abs_tol", "solvers", ConfigType::real_type, "1e-12",
       "momentum GMRES absolute tolerance", {}},
      {"momentum_max_iter", "solvers", ConfigType::int_type, "2000",
       "momentum GMRES iteration cap", {}},
      {"gmres_restart", "solvers", ConfigType::int_type, "40", "GMRES restart length", {}},
      {"picard_max", "solvers", ConfigType::int_type, "25",
       "Picard iteration cap (implicit mode)", {}},
      {"picard_tol", "solvers", ConfigType::real_type, "1e-8",
       "Picard increment tolerance (implicit mode)", {}},

      {"dt_sweep", "study", ConfigType::real_list, "",
       "time steps for temporal studies (comma separated)", {}},
      {"mesh_sweep", "study", ConfigType::int_list, "",
       "cells-per-axis sweep for spatial studies (comma separated)", {}},
  };
  return keys;
}

const ConfigKeyInfo* find_config_key(const std::string& name) {
  for (const auto& k : config_registry())
    if (k.name == name) return &k;
  return nullptr;
}

std::string config_reference_markdown() {
  std::ostringstream os;
  os << "# Configuration reference\n\n"
     << "Plain `key = value` lines; `[section]` headers and `#` comments are\n"
     << "allowed; keys are global (sections are cosmetic). Unknown keys are\n"
     << "rejected.\n";
  std::string section;
  for (const auto& k : config_registry()) {
    if (k.section != section) {
      section = k.section;
      os << "\n## " << section << "\n\n";
    }
    os << "- `" << k.name << "` (default `" << (k.default_value.empty() ? "-" : k.default_value)
       << "`): " << k.description;
    if (!k.enum_values.empty()) {
      os << " [";
      for (std::size_t i = 0; i < k.enum_values.size(); ++i)
        os << (i ? ", " : "") << k.enum_values[i];
      os << "]";
    }
    os << "\n";
  }
  return os.str();
}

ConfigMap ConfigMap::from_string(const std::string& text, const std::string& origin) {
  ConfigMap map;
  map.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      continue;  // sections are cosmetic
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!find_config_key(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    map.values_[key] = value;
    map.locations_[key] = origin + ":" + std::to_string(lineno);
  }
  return map;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

void ConfigMap::apply_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
  const std::string key = trim(kv.substr(0, eq));
  const std::string value = trim(kv.substr(eq + 1));
  if (!find_config_key(key)) throw ConfigError("unknown key in override: '" + key + "'");
  values_[key] = value;
  locations_[key] = "<override>";
}

std::string ConfigMap::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  const ConfigKeyInfo* info = find_config_key(key);
  if (!info) throw ConfigError("unregistered key read: " + key);
  return info->default_value;
}

std::string ConfigMap::location(const std::string& key) const {
  const auto it = locations_.find(key);
  return it == locations_.end() ? "<default>" : it->second;
}

std::string ConfigMap::get_string(const std::string& key) const { return raw(key); }

long ConfigMap::get_int(const std::string& key) const {
  const std::string v = raw(key);
  try {
    std::size_t pos = 0;
    const long r = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (const std::exception&) {
    throw ConfigError(location(key) + ": key '" + key + "' expects an integer, got '" + v + "'");
  }
}

double ConfigMap::get_real(const std::string& key) const {
  const std::string v = raw(key);
  try {
    std::size_t pos = 0;
    const double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return r;
  } catch (const std::exception&) {
    throw ConfigError(location(key) + ": key '" + key + "' expects a real, got '" + v + "'");
  }
}

bool ConfigMap::get_bool(const std::string& key) const {
  const std::string v = raw(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(location(key) + ": key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> ConfigMap::get_real_list(const std::string& key) const {
  const std::string v = raw(key);
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::istringstream in(v);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError(location(key) + ": key '" + key + "' expects reals, got '" + tok + "'");
    }
  }
  return out;
}

std::vector<long> ConfigMap::get_int_list(const std::string& key) const {
  const std::string v = raw(key);
  std::vector<long> out;
  if (trim(v).empty()) return out;
  std::istringstream in(v);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    try {
      out.push_back(std::stol(tok));
    } catch (const std::exception&) {
      throw ConfigError(location(key) + ": key '" + key + "' expects integers, got '" + tok + "'");
    }
  }
  return out;
}

std::string ConfigMap::canonical() const {
  std::ostringstream os;
  for (const auto& k : config_registry()) {
    const auto it = values_.find(k.name);
    os << k.name << "=" << (it == values_.end() ? k.default_value : it->second) << "\n";
  }
  return os.str();
}

RunConfig RunConfig::load(const std::string& path, const std::vector<std::string>& overrides) {
  ConfigMap map = ConfigMap::from_file(path);
  for (const auto& o : overrides) map.apply_override(o);
  return from_map(std::move(map));
}

RunConfig RunConfig::from_map(ConfigMap map) {
  RunConfig rc;
  const std::string mode = map.get_string("mode");
  if (mode == "single") rc.mode = RunMode::single;
  else if (mode == "temporal_study") rc.mode = RunMode::temporal_study;
  else if (mode == "spatial_study") rc.mode = RunMode::spatial_study;
  else if (mode == "tgv3d_diagnostics") rc.mode = RunMode::tgv3d_diagnostics;
  else if (mode == "equivalence_check") rc.mode = RunMode::equivalence_check;
  else if (mode == "verify") rc.mode = RunMode::verify;
  else throw ConfigError("key 'mode': unknown value '" + mode + "'");

  rc.problem = map.get_string("problem");
  rc.viscosity = map.get_real("viscosity");
  if (!(rc.viscosity > 0.0)) throw ConfigError("key 'viscosity' must be positive");
  rc.output_dir = map.get_string("output_dir");
  rc.threads = static_cast<int>(map.get_int("threads"));
  if (rc.threads < 1) throw ConfigError("key 'threads' must be >= 1");
  rc.sampling_stride = static_cast<int>(map.get_int("sampling_stride"));
  if (rc.sampling_stride < 1) throw ConfigError("key 'sampling_stride' must be >= 1");
  rc.verbose_logging = map.get_bool("verbose_logging");
  rc.seed = static_cast<unsigned>(map.get_int("seed"));

  const int dim = static_cast<int>(map.get_int("dim"));
  if (dim != 2 && dim != 3) throw ConfigError("key 'dim' must be 2 or 3");
  rc.mesh.dim = dim;
  const int n = static_cast<int>(map.get_int("mesh_cells"));
  if (n < 1) throw ConfigError("key 'mesh_cells' must be >= 1");
  rc.mesh.cells = {n, n, dim == 3 ? n : 1};

  const auto lower = map.get_real_list("domain_lower");
  const auto upper = map.get_real_list("domain_upper");
  if (lower.empty() != upper.empty())
    throw ConfigError("domain_lower and domain_upper must be given together");
  if (!lower.empty()) {
    if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim)
      throw ConfigError("domain bounds must have 'dim' entries");
    for (int a = 0; a < dim; ++a) {
      rc.mesh.lower[a] = lower[a];
      rc.mesh.upper[a] = upper[a];
      if (!(upper[a] > lower[a])) throw ConfigError("domain must have positive extent");
    }
    rc.mesh_bounds_set = true;
  }

  const std::string boundary = map.get_string("boundary");
  auto set_sides = [&](SideSpec s) { rc.mesh.sides.fill(s); };
  if (boundary == "dirichlet") {
    set_sides(SideSpec::Dirichlet());
  } else if (boundary == "periodic") {
    set_sides(SideSpec::Periodic());
  } else if (boundary == "mixed") {
    set_sides(SideSpec::Dirichlet());
    rc.mesh.sides[1] = SideSpec::Neumann();  // upper x side open
  } else if (boundary == "auto") {
    if (rc.problem == "tgv3d") set_sides(SideSpec::Periodic());
    else set_sides(SideSpec::Dirichlet());
  } else {
    throw ConfigError("key 'boundary': unknown value '" + boundary + "'");
  }

  rc.velocity_degree = static_cast<int>(map.get_int("velocity_degree"));
  if (rc.velocity_degree < 2)
    throw ConfigError("key 'velocity_degree' must be >= 2 (k_p = k_u - 1 >= 1)");
  const int kp = static_cast<int>(map.get_int("pressure_degree"));
  if (kp != -1 && kp != rc.velocity_degree - 1)
    throw ConfigError("inf-sup pairing requires pressure_degree = velocity_degree - 1 (k_p = k_u - 1); got k_u = " +
                      std::to_string(rc.velocity_degree) + ", k_p = " + std::to_string(kp));

  SchemeConfig& sc = rc.scheme;
  sc.bdf_order = static_cast<int>(map.get_int("bdf_order"));
  if (sc.bdf_order < 1 || sc.bdf_order > 4) throw ConfigError("key 'bdf_order' must be in 1..4");
  sc.conv_extrap_order = static_cast<int>(map.get_int("convective_extrapolation_order"));
  sc.pressure_bc_extrap_order = static_cast<int>(map.get_int("pressure_bc_extrapolation_order"));
  const std::string form = map.get_string("convective_form");
  sc.form = form == "divergence" ? ConvectiveForm::divergence : ConvectiveForm::convective;
  if (form != "convective" && form != "divergence")
    throw ConfigError("key 'convective_form': unknown value '" + form + "'");
  const std::string cmode = map.get_string("convection_mode");
  if (cmode == "explicit") sc.mode = ConvectionMode::explicit_mode;
  else if (cmode == "semi_implicit") sc.mode = ConvectionMode::semi_implicit;
  else if (cmode == "implicit") sc.mode = ConvectionMode::implicit;
  else throw ConfigError("key 'convection_mode': unknown value '" + cmode + "'");
  sc.penalty.zeta_d = map.get_real("zeta_d");
  sc.penalty.zeta_c = map.get_real("zeta_c");
  sc.penalty.zeta_lf = map.get_real("zeta_lf");
  if (sc.penalty.zeta_d < 0 || sc.penalty.zeta_c < 0 || sc.penalty.zeta_lf < 0)
    throw ConfigError("penalty parameters must be >= 0");
  sc.divergence_penalty = map.get_bool("enable_div_penalty");
  sc.continuity_penalty = map.get_bool("enable_cont_penalty");
  sc.leray = map.get_bool("enable_leray");
  sc.n_q_nonlinear = static_cast<int>(map.get_int("overintegration_points"));
  const std::string startup = map.get_string("startup_policy");
  if (startup == "exact_interpolation") sc.startup = StartupPolicy::exact_interpolation;
  else if (startup == "increasing_order" || startup == "auto")
    sc.startup = StartupPolicy::increasing_order;  // auto resolved per problem later
  else throw ConfigError("key 'startup_policy': unknown value '" + startup + "'");
  rc.scheme.warm_start = map.get_bool("warm_start");
  sc.threads = rc.threads;

  const std::string pprec = map.get_string("ppe_preconditioner");
  if (pprec == "jacobi") sc.ppe_preconditioner = PPEPreconditioner::jacobi;
  else if (pprec == "block_jacobi") sc.ppe_preconditioner = PPEPreconditioner::block_jacobi;
  else throw ConfigError("key 'ppe_preconditioner': unknown value '" + pprec + "'");
  sc.ppe_solver.rel_tol = map.get_real("ppe_rel_tol");
  sc.ppe_solver.abs_tol = map.get_real("ppe_abs_tol");
  sc.ppe_solver.max_iter = static_cast<int>(map.get_int("ppe_max_iter"));
  sc.momentum_solver.rel_tol = map.get_real("momentum_rel_tol");
  sc.momentum_solver.abs_tol = map.get_real("momentum_abs_tol");
  sc.momentum_solver.max_iter = static_cast<int>(map.get_int("momentum_max_iter"));
  sc.momentum_solver.restart = static_cast<int>(map.get_int("gmres_restart"));
  if (sc.ppe_solver.rel_tol <= 0 || sc.ppe_solver.abs_tol <= 0 || sc.momentum_solver.rel_tol <= 0 ||
      sc.momentum_solver.abs_tol <= 0)
    throw ConfigError("solver tolerances must be positive");
  if (sc.momentum_solver.restart < 1) throw ConfigError("key 'gmres_restart' must be >= 1");
  sc.picard_max = static_cast<int>(map.get_int("picard_max"));
  sc.picard_tol = map.get_real("picard_tol");

  rc.dt = map.get_real("time_step");
  rc.cfl = map.get_real("cfl");
  rc.end_time = map.get_real("end_time");
  if (!(rc.end_time > 0.0)) throw ConfigError("key 'end_time' must be positive");
  if (rc.dt < 0.0) throw ConfigError("key 'time_step' must be >= 0");
  if (rc.dt == 0.0 && !(rc.cfl > 0.0)) throw ConfigError("key 'cfl' must be positive");

  rc.dt_sweep = map.get_real_list("dt_sweep");
  rc.mesh_sweep = map.get_int_list("mesh_sweep");

  const std::string startup_raw = map.get_string("startup_policy");
  if (startup_raw == "auto") {
    // manufactured problems can prefill the history ring
    if (rc.problem == "tgv2d" || rc.problem == "tgv2d_steady")
      sc.startup = StartupPolicy::exact_interpolation;
    else
      sc.startup = StartupPolicy::increasing_order;
  }

  rc.config_digest = config_hash(map.canonical());
  return rc;
}

}  // namespace splitdg
