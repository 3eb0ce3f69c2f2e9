#include "splitdg/splitting.hpp"

#include <cmath>
#include <sstream>

#include "splitdg/cell_eval.hpp"
#include "splitdg/field_ops.hpp"
#include "splitdg/parallel.hpp"
#include "operators_common.hpp"

namespace splitdg {

namespace {

DGField combine_history(const FunctionSpace& space, const std::vector<DGField>& hist,
                        const std::vector<double>& coeff, int count) {
  DGField out(space);
  for (int i = 0; i < count; ++i) axpy(coeff[i], hist[i].data, out.data);
  return out;
}

}  // namespace

struct SplittingDriver::Impl {
  const Mesh* mesh;
  const ProblemSpec* problem;
  SchemeConfig cfg;
  std::unique_ptr<FunctionSpace> vel_space;
  std::unique_ptr<FunctionSpace> pres_space;
  std::unique_ptr<PressurePoissonOperator> ppe;
  std::unique_ptr<MomentumOperator> mom;
  std::unique_ptr<MeanProjector> projector;  // set when the PPE is singular
  Preconditioner ppe_precond;
  Preconditioner mass_precond;

  Impl(const Mesh& m, int k_u, const ProblemSpec& prob, const SchemeConfig& config)
      : mesh(&m), problem(&prob), cfg(config) {
    if (k_u < 2) throw std::invalid_argument("splitting: velocity degree must be >= 2 (k_p = k_u - 1 >= 1)");
    if (cfg.bdf_order < 1 || cfg.bdf_order > 4)
      throw std::invalid_argument("splitting: bdf_order must be in 1..4");
    if (cfg.conv_extrap_order == 0) cfg.conv_extrap_order = default_extrapolation_order(cfg.bdf_order);
    if (cfg.pressure_bc_extrap_order == 0)
      cfg.pressure_bc_extrap_order = default_extrapolation_order(cfg.bdf_order);
    if (cfg.conv_extrap_order > cfg.bdf_order || cfg.pressure_bc_extrap_order > cfg.bdf_order)
      throw std::invalid_argument("splitting: J_c and J_p must not exceed J");
    vel_space = std::make_unique<FunctionSpace>(m, k_u, m.dim());
    pres_space = std::make_unique<FunctionSpace>(m, k_u - 1, 1);
    OperatorConfig ocfg;
    ocfg.penalty = cfg.penalty;
    ocfg.form = cfg.form;
    ocfg.divergence_penalty = cfg.divergence_penalty;
    ocfg.continuity_penalty = cfg.continuity_penalty;
    ocfg.n_q_linear = cfg.n_q_linear;
    ocfg.n_q_nonlinear = cfg.n_q_nonlinear;
    ocfg.threads = cfg.threads;
    ppe = std::make_unique<PressurePoissonOperator>(*pres_space, *vel_space, prob, ocfg);
    mom = std::make_unique<MomentumOperator>(*vel_space, *pres_space, prob, ocfg);
    if (ppe->singular()) projector = std::make_unique<MeanProjector>(*pres_space);
    ppe_precond = cfg.ppe_preconditioner == PPEPreconditioner::block_jacobi
                      ? ppe->block_jacobi_preconditioner()
                      : jacobi_preconditioner(ppe->diagonal());
    mass_precond = inverse_mass_preconditioner(*vel_space);
  }

  ActiveOrders orders(const SplittingState& state) const {
    const int filled = static_cast<int>(state.velocity.size());
    const int j = std::min(cfg.bdf_order, filled);
    if (j < cfg.bdf_order) return {j, j, j};  // startup ramp
    return {cfg.bdf_order, cfg.conv_extrap_order, cfg.pressure_bc_extrap_order};
  }
};

SplittingDriver::SplittingDriver(const Mesh& mesh, int velocity_degree,
                                 const ProblemSpec& problem, const SchemeConfig& config)
    : impl_(std::make_unique<Impl>(mesh, velocity_degree, problem, config)) {}

SplittingDriver::~SplittingDriver() = default;

const FunctionSpace& SplittingDriver::velocity_space() const { return *impl_->vel_space; }
const FunctionSpace& SplittingDriver::pressure_space() const { return *impl_->pres_space; }
const SchemeConfig& SplittingDriver::config() const { return impl_->cfg; }
const ProblemSpec& SplittingDriver::problem() const { return *impl_->problem; }
PressurePoissonOperator& SplittingDriver::ppe_operator() { return *impl_->ppe; }
MomentumOperator& SplittingDriver::momentum_operator() { return *impl_->mom; }

SplittingDriver::ActiveOrders SplittingDriver::active_orders(const SplittingState& state) const {
  return impl_->orders(state);
}

SplittingState SplittingDriver::initialize(double dt, double t0) const {
  const Impl& im = *impl_;
  if (!(dt > 0.0)) throw std::invalid_argument("initialize: dt must be positive");
  SplittingState state;
  state.dt = dt;
  state.time = t0;
  state.pressure = DGField(*im.pres_space);
  if (im.cfg.startup == StartupPolicy::exact_interpolation) {
    if (!im.problem->exact)
      throw std::invalid_argument("initialize: exact-interpolation startup requires an exact solution");
    for (int i = 0; i < im.cfg.bdf_order; ++i)
      state.velocity.push_back(
          interpolate_nodal(*im.vel_space, im.problem->exact->velocity, t0 - i * dt));
    state.pressure = interpolate_nodal(*im.pres_space, im.problem->exact->pressure, t0);
    if (im.projector) im.projector->project_solution(state.pressure.data);
  } else {
    if (!im.problem->initial_velocity)
      throw std::invalid_argument("initialize: problem has no initial condition");
    state.velocity.push_back(l2_project(*im.vel_space, im.problem->initial_velocity, t0));
  }
  return state;
}

DGField SplittingDriver::pressure_step(const SplittingState& state, StepStats* stats) const {
  const Impl& im = *impl_;
  const auto ord = im.orders(state);
  const double t_new = state.time + state.dt;
  const BDFScheme bdf = bdf_coefficients(ord.bdf);
  const auto beta_bar = extrapolation_coefficients(ord.conv);
  const auto beta_hat = extrapolation_coefficients(ord.pressure_bc);
  const double g0dt = bdf.gamma0 / state.dt;

  std::vector<double> rhs(im.pres_space->n_dofs(), 0.0);
  im.ppe->add_rhs_forcing(t_new, rhs);
  for (int i = 0; i < ord.conv; ++i)
    im.ppe->add_rhs_convective(state.velocity[i], beta_bar[i], rhs);
  if (im.cfg.leray) {
    for (int i = 0; i < ord.bdf; ++i)
      im.ppe->add_rhs_leray(state.velocity[i], -bdf.alpha[i] / state.dt, rhs);
  }
  DGField u_hat;
  const DGField* u_hat_ptr = nullptr;
  if (im.mesh->has_boundary(BoundaryKind::dirichlet)) {
    u_hat = combine_history(*im.vel_space, state.velocity, beta_hat, ord.pressure_bc);
    u_hat_ptr = &u_hat;
  }
  im.ppe->add_rhs_sipg(t_new, u_hat_ptr, g0dt, rhs);

  SolveReport rep;
  if (im.projector) {
    const double mean = im.projector->rhs_mean(rhs);
    const double scale = norm2(rhs) + 1e-300;
    if (std::abs(mean) > 1e-8 * scale) {
      rep.detail = "incompatible singular system: rhs mean " + std::to_string(mean);
    }
  }
  DGField p_new(*im.pres_space);
  if (im.cfg.warm_start) {
    if (state.has_pressure_prev) {
      for (std::size_t i = 0; i < p_new.data.size(); ++i)
        p_new.data[i] = 2.0 * state.pressure.data[i] - state.pressure_prev.data[i];
    } else {
      p_new.data = state.pressure.data;
    }
  }
  const std::string compat = rep.detail;
  rep = cg_solve(im.ppe->linear_operator(), rhs, im.ppe_precond, im.cfg.ppe_solver, p_new.data,
                 im.projector.get());
  if (!compat.empty()) rep.detail = compat + (rep.detail.empty() ? "" : "; " + rep.detail);
  if (stats) stats->ppe = rep;
  if (!rep.converged) {
    std::ostringstream os;
    os << "pressure step failed at t=" << t_new << " (step " << state.step << "): "
       << to_string(rep.stop) << ", residual " << rep.final_residual << " after "
       << rep.iterations << " iterations";
    throw SolverFailure("pressure", state.step, t_new, rep, os.str());
  }
  return p_new;
}

DGField SplittingDriver::momentum_step(const SplittingState& state, const DGField& pressure_new,
                                       StepStats* stats) const {
  const Impl& im = *impl_;
  const auto ord = im.orders(state);
  const double t_new = state.time + state.dt;
  const BDFScheme bdf = bdf_coefficients(ord.bdf);
  const auto beta = extrapolation_coefficients(ord.bdf);  // u* uses order J
  const double g0dt = bdf.gamma0 / state.dt;

  DGField u_star = combine_history(*im.vel_space, state.velocity, beta, ord.bdf);
  im.mom->set_time_factor(g0dt);

  // rhs pieces that do not depend on the linearization
  std::vector<double> rhs_base(im.vel_space->n_dofs(), 0.0);
  im.mom->add_rhs_forcing(t_new, rhs_base);
  {
    std::vector<double> alpha_scaled(bdf.alpha);
    DGField u_comb = combine_history(*im.vel_space, state.velocity, alpha_scaled, ord.bdf);
    im.mom->add_rhs_mass_history(u_comb, 1.0 / state.dt, rhs_base);
  }
  im.mom->add_rhs_pressure(pressure_new, t_new, rhs_base);
  im.mom->add_rhs_viscous_data(t_new, rhs_base);
  if (im.cfg.mode == ConvectionMode::explicit_mode) {
    for (int i = 0; i < ord.bdf; ++i) {
      im.mom->apply_convective(state.velocity[i], state.velocity[i], rhs_base, -beta[i]);
      im.mom->add_rhs_convective_data(state.velocity[i], state.time - i * state.dt, beta[i],
                                      rhs_base);
    }
  }

  const LinearOperator op = im.mom->linear_operator(im.cfg.mode);
  DGField u_new(*im.vel_space);
  SolveReport rep;
  int picard = 0;
  DGField lin = u_star;
  while (true) {
    im.mom->set_linearization(lin);
    std::vector<double> rhs = rhs_base;
    if (im.cfg.mode != ConvectionMode::explicit_mode)
      im.mom->add_rhs_convective_data(lin, t_new, 1.0, rhs);
    if (im.cfg.continuity_penalty) im.mom->add_rhs_continuity_penalty_data(lin, t_new, rhs);
    u_new.data = im.cfg.warm_start ? u_star.data : std::vector<double>(op.n, 0.0);
    rep = gmres_solve(op, rhs, im.mass_precond, im.cfg.momentum_solver, u_new.data);
    if (!rep.converged) {
      std::ostringstream os;
      os << "momentum step failed at t=" << t_new << " (step " << state.step << "): "
         << to_string(rep.stop) << ", residual " << rep.final_residual << " after "
         << rep.iterations << " iterations";
      if (stats) stats->momentum = rep;
      throw SolverFailure("momentum", state.step, t_new, rep, os.str());
    }
    if (im.cfg.mode != ConvectionMode::implicit) break;
    ++picard;
    double dn = 0.0, un = 0.0;
    for (std::size_t i = 0; i < u_new.data.size(); ++i) {
      const double d = u_new.data[i] - lin.data[i];
      dn += d * d;
      un += u_new.data[i] * u_new.data[i];
    }
    if (std::sqrt(dn) <= im.cfg.picard_tol * std::max(std::sqrt(un), 1e-14)) break;
    if (picard >= im.cfg.picard_max) {
      std::ostringstream os;
      os << "Picard iteration diverged at t=" << t_new << " (step " << state.step << "): "
         << picard << " iterations, increment " << std::sqrt(dn);
      SolveReport prep = rep;
      prep.converged = false;
      prep.detail = "picard divergence";
      if (stats) stats->momentum = prep;
      throw SolverFailure("momentum_picard", state.step, t_new, prep, os.str());
    }
    lin = u_new;
  }
  if (stats) {
    stats->momentum = rep;
    stats->picard_iterations = picard;
  }
  return u_new;
}

StepStats SplittingDriver::advance(SplittingState& state) const {
  const Impl& im = *impl_;
  StepStats stats;
  stats.active_order = im.orders(state).bdf;
  DGField p_new = pressure_step(state, &stats);
  DGField u_new = momentum_step(state, p_new, &stats);
  // rotate history; the newest slot holds u^{n+1} bitwise
  state.velocity.insert(state.velocity.begin(), std::move(u_new));
  while (static_cast<int>(state.velocity.size()) > im.cfg.bdf_order) state.velocity.pop_back();
  state.pressure_prev = std::move(state.pressure);
  state.has_pressure_prev = true;
  state.pressure = std::move(p_new);
  state.time += state.dt;
  state.step += 1;
  stats.t = state.time;
  if (im.cfg.step_diagnostics) {
    const DGField& u = state.velocity.front();
    stats.divergence_norm = divergence_l2_norm(u);
    const double nrm = l2_norm(u, u.space->degree() + 2);
    stats.kinetic_energy = 0.5 * nrm * nrm / im.mesh->domain_measure();
  }
  return stats;
}

double SplittingDriver::dual_splitting_equivalence_check(const SplittingState& state,
                                                         PPEConvectiveFlux flux) const {
  const Impl& im = *impl_;
  const Mesh& mesh = *im.mesh;
  if (!mesh.boundary_faces().empty())
    throw std::invalid_argument("equivalence check requires a fully periodic mesh");
  if (im.cfg.mode != ConvectionMode::explicit_mode)
    throw std::invalid_argument("equivalence check requires explicit convection");
  const int J = im.orders(state).bdf;
  const BDFScheme bdf = bdf_coefficients(J);
  const auto beta = extrapolation_coefficients(J);
  const double dt = state.dt;
  const int dim = mesh.dim();
  const int k_u = im.vel_space->degree();
  const int nq = 2 * k_u + 2;

  // route 1: u* of the dual splitting, as a DG field in a tensor space of
  // degree 2k (where the pointwise convective term is represented exactly),
  // then the weak divergence -(gamma0/dt) div(u*) with central fluxes
  FunctionSpace rich(mesh, 2 * k_u, dim);
  rich.warm_tables(nq);
  im.vel_space->warm_tables(nq);
  im.pres_space->warm_tables(nq);
  CellEval ev_rich(rich, nq);
  CellEval ev_u(*im.vel_space, nq);
  CellEval ev_p(*im.pres_space, nq);
  const int nqd = ev_u.n_qpoints();
  const int nfq = ev_u.n_face_qpoints();
  const int npc_u = im.vel_space->nodes_per_cell();
  const int npc_r = rich.nodes_per_cell();
  const int npc_p = im.pres_space->nodes_per_cell();
  const double jac = ev_u.volume_jacobian();

  std::vector<double> moments(rich.n_dofs(), 0.0);
  std::vector<double> uv(static_cast<std::size_t>(dim) * nqd), gu(static_cast<std::size_t>(dim) * dim * nqd);
  std::vector<double> integrand(static_cast<std::size_t>(dim) * nqd), fw(nqd);
  std::vector<std::array<double, 3>> xq;
  const double t_new = state.time + dt;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    std::fill(integrand.begin(), integrand.end(), 0.0);
    for (int i = 0; i < J; ++i) {
      const double* uc = state.velocity[i].cell_data(c);
      for (int d = 0; d < dim; ++d) {
        ev_u.values(uc + d * npc_u, uv.data() + d * nqd);
        for (int j = 0; j < dim; ++j)
          ev_u.phys_deriv(uc + d * npc_u, j, gu.data() + (d * dim + j) * nqd);
      }
      for (int d = 0; d < dim; ++d)
        for (int q = 0; q < nqd; ++q) {
          double conv = 0.0;
          for (int j = 0; j < dim; ++j) conv += uv[j * nqd + q] * gu[(d * dim + j) * nqd + q];
          integrand[d * nqd + q] +=
              -beta[i] * conv + (bdf.alpha[i] / dt) * uv[d * nqd + q];
        }
    }
    if (im.problem->forcing) {
      detail::volume_quad_coordinates(mesh, c, ev_u.rule(), xq);
      for (int q = 0; q < nqd; ++q) {
        const auto f = im.problem->forcing(xq[q], t_new);
        for (int d = 0; d < dim; ++d) integrand[d * nqd + q] += f[d];
      }
    }
    double* m = moments.data() + static_cast<std::size_t>(c) * rich.dofs_per_cell();
    for (int d = 0; d < dim; ++d) {
      for (int q = 0; q < nqd; ++q)
        fw[q] = (dt / bdf.gamma0) * integrand[d * nqd + q] * ev_rich.qweights()[q] * jac;
      ev_rich.moments_add(fw.data(), m + d * npc_r);
    }
  }
  DGField u_star_rich(rich);
  apply_inverse_mass(rich, moments, u_star_rich.data, 1);

  // weak divergence with central fluxes, scaled by -gamma0/dt
  std::vector<double> lhs(im.pres_space->n_dofs(), 0.0);
  const double scale = -bdf.gamma0 / dt;
  std::vector<double> tm(nfq), tp(nfq);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double* rc = u_star_rich.cell_data(c);
    double* m = lhs.data() + static_cast<std::size_t>(c) * npc_p;
    for (int a = 0; a < dim; ++a) {
      ev_rich.values(rc + a * npc_r, uv.data());
      const double dsc = ev_p.deriv_scale(a) * jac;
      for (int q = 0; q < nqd; ++q) fw[q] = -scale * uv[q] * ev_rich.qweights()[q] * dsc;
      ev_p.deriv_moments_add(fw.data(), a, m);
      const double fj = ev_rich.face_jacobian(a);
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const FaceLink& fl = mesh.interior_faces()[cf.index];
        const int nb = cf.side == 1 ? fl.neighbor : fl.owner;
        const double sgn = side == 0 ? -1.0 : 1.0;
        ev_rich.face_values(rc + a * npc_r, a, side, tm.data());
        ev_rich.face_values(u_star_rich.cell_data(nb) + a * npc_r, a, 1 - side, tp.data());
        for (int q = 0; q < nfq; ++q)
          fw[q] = scale * 0.5 * (tm[q] + tp[q]) * sgn * ev_rich.face_qweights()[q] * fj;
        ev_p.face_moments_add(fw.data(), a, side, m);
      }
    }
  }

  // route 2: the consistent-splitting PPE right-hand side of the modified PPE
  OperatorConfig ocfg;
  ocfg.threads = 1;
  ocfg.n_q_linear = nq;
  ocfg.n_q_nonlinear = nq;
  PressurePoissonOperator ppe_exact(*im.pres_space, *im.vel_space, *im.problem, ocfg);
  std::vector<double> rhs(im.pres_space->n_dofs(), 0.0);
  ppe_exact.add_rhs_forcing(t_new, rhs);
  for (int i = 0; i < J; ++i) ppe_exact.add_rhs_convective(state.velocity[i], beta[i], rhs, flux);
  for (int i = 0; i < J; ++i)
    ppe_exact.add_rhs_leray(state.velocity[i], -bdf.alpha[i] / dt, rhs);

  double max_diff = 0.0, max_ref = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(lhs[i] - rhs[i]));
    max_ref = std::max(max_ref, std::abs(rhs[i]));
  }
  return max_ref > 0.0 ? max_diff / max_ref : max_diff;
}

}  // namespace splitdg
