#include <cmath>
#include <stdexcept>

#include "splitdg/field_ops.hpp"
#include "splitdg/operators.hpp"
#include "splitdg/parallel.hpp"
#include "operators_common.hpp"

namespace splitdg {

namespace {

struct TScratch {
  std::unique_ptr<CellEval> vel_nl;    // velocity space @ nonlinear rule
  std::unique_ptr<CellEval> vel_lin;   // velocity space @ linear rule
  std::unique_ptr<CellEval> pres_lin;  // pressure space @ linear rule
  std::vector<double> va, ga, fw, w1, tm, tp, dm, dp, e1, e2;
};

}  // namespace

struct MomentumOperator::Impl {
  const FunctionSpace* vs;
  const FunctionSpace* ps;
  const ProblemSpec* problem;
  OperatorConfig cfg;
  int dim, npc, nq_nl, nq_lin;
  std::array<double, 3> tau{};  // velocity-degree penalty per axis
  double h_e = 0.0;
  double nu = 0.0;

  // solve-time state
  double gamma0_over_dt = 1.0;
  bool conv_in_lhs = true;
  DGField u_star;
  std::vector<double> star_vals;  // [cell][comp][nqd] at the nonlinear rule
  std::vector<double> star_face;  // [cell][6][comp][nfq]
  std::vector<double> avg_norm;   // [cell]
  bool have_lin = false;

  mutable std::vector<TScratch> ts;
  mutable DGField u_view;

  Impl(const FunctionSpace& velocity_space, const FunctionSpace& pressure_space,
       const ProblemSpec& prob, const OperatorConfig& config)
      : vs(&velocity_space), ps(&pressure_space), problem(&prob), cfg(config) {
    const Mesh& mesh = vs->mesh();
    dim = mesh.dim();
    npc = vs->nodes_per_cell();
    if (vs->components() != dim)
      throw std::invalid_argument("momentum: velocity space must be vector valued");
    nq_nl = cfg.n_q_nonlinear > 0 ? cfg.n_q_nonlinear : vs->degree() + 2;
    nq_lin = cfg.n_q_linear > 0 ? cfg.n_q_linear : vs->degree() + 1;
    const Cell c0 = mesh.cell(0);
    h_e = c0.h;
    nu = prob.viscosity;
    for (int a = 0; a < dim; ++a)
      tau[a] = sipg_tau(vs->degree(), detail::face_area(mesh, a), c0.volume);
    vs->warm_tables(nq_nl);
    vs->warm_tables(nq_lin);
    ps->warm_tables(nq_lin);
    const int nthreads = std::max(1, cfg.threads);
    ts.resize(nthreads);
    for (auto& s : ts) {
      s.vel_nl = std::make_unique<CellEval>(*vs, nq_nl);
      s.vel_lin = std::make_unique<CellEval>(*vs, nq_lin);
      s.pres_lin = std::make_unique<CellEval>(*ps, nq_lin);
      const int nqd = s.vel_nl->n_qpoints();
      const int nfq = s.vel_nl->n_face_qpoints();
      s.va.resize(static_cast<std::size_t>(dim) * nqd);
      s.ga.resize(static_cast<std::size_t>(dim) * dim * nqd);
      s.fw.resize(nqd);
      s.w1.resize(nqd);
      s.tm.resize(static_cast<std::size_t>(dim) * nfq);
      s.tp.resize(static_cast<std::size_t>(dim) * nfq);
      s.dm.resize(static_cast<std::size_t>(dim) * nfq);
      s.dp.resize(static_cast<std::size_t>(dim) * nfq);
      s.e1.resize(nfq);
      s.e2.resize(nfq);
    }
    u_view = DGField(*vs);
  }

  int other_cell(const Mesh::CellFace& cf, int c) const {
    const FaceLink& fl = vs->mesh().interior_faces()[cf.index];
    return cf.side == 1 ? fl.neighbor : fl.owner;
  }

  // (scale * M u_c) added to y_c via the exact tensor-product mass matrix
  void cell_mass_add(const double* uc, double scale, double* y, TScratch& s) const {
    const int n = vs->n1d();
    const double* m1 = vs->mass_1d().data();
    double jac = 1.0;
    for (int a = 0; a < dim; ++a) jac *= 0.5 * vs->mesh().dx()[a];
    const double f = scale * jac;
    for (int comp = 0; comp < dim; ++comp) {
      const double* in = uc + comp * npc;
      double* out = y + comp * npc;
      if (dim == 2) {
        tensor::contract(in, s.fw.data(), 1, n, n, m1, n);
        tensor::contract(s.fw.data(), s.w1.data(), n, n, 1, m1, n);
      } else {
        tensor::contract(in, s.fw.data(), 1, n, n * n, m1, n);
        tensor::contract(s.fw.data(), s.w1.data(), n, n, n, m1, n);
        tensor::contract(s.w1.data(), s.fw.data(), n * n, n, 1, m1, n);
        std::swap(s.fw, s.w1);
      }
      for (int i = 0; i < npc; ++i) out[i] += f * s.w1[i];
    }
  }

  std::vector<double> compute_avg_norms(const DGField& star) const {
    const Mesh& mesh = vs->mesh();
    std::vector<double> out(mesh.n_cells());
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto avg = cell_average(star, c);
      double s = 0.0;
      for (int a = 0; a < dim; ++a) s += avg[a] * avg[a];
      out[c] = std::sqrt(s);
    }
    return out;
  }
};

MomentumOperator::MomentumOperator(const FunctionSpace& velocity_space,
                                   const FunctionSpace& pressure_space,
                                   const ProblemSpec& problem, const OperatorConfig& cfg)
    : impl_(std::make_unique<Impl>(velocity_space, pressure_space, problem, cfg)) {}

MomentumOperator::~MomentumOperator() = default;

std::size_t MomentumOperator::n() const { return impl_->vs->n_dofs(); }
const FunctionSpace& MomentumOperator::velocity_space() const { return *impl_->vs; }

void MomentumOperator::set_time_factor(double gamma0_over_dt) {
  impl_->gamma0_over_dt = gamma0_over_dt;
}

void MomentumOperator::set_linearization(const DGField& u_star) {
  Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  im.u_star = u_star;
  im.avg_norm = im.compute_avg_norms(u_star);
  TScratch& s = im.ts[0];
  CellEval& ev = *s.vel_nl;
  const int nqd = ev.n_qpoints();
  const int nfq = ev.n_face_qpoints();
  im.star_vals.resize(static_cast<std::size_t>(mesh.n_cells()) * im.dim * nqd);
  im.star_face.resize(static_cast<std::size_t>(mesh.n_cells()) * 6 * im.dim * nfq);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t c, int tid) {
    CellEval& e = *im.ts[tid].vel_nl;
    const double* uc = u_star.cell_data(static_cast<int>(c));
    for (int comp = 0; comp < im.dim; ++comp) {
      e.values(uc + comp * im.npc, im.star_vals.data() + (c * im.dim + comp) * nqd);
      for (int a = 0; a < im.dim; ++a)
        for (int side = 0; side < 2; ++side)
          e.face_values(uc + comp * im.npc, a, side,
                        im.star_face.data() + ((c * 6 + 2 * a + side) * im.dim + comp) * nfq);
    }
  });
  im.have_lin = true;
}

// Fused left-hand side: all volume terms in one pass at the nonlinear rule
// (the linear pieces are exactly integrated there as well), then all face
// terms per cell. Verified against the sum of the standalone pieces in tests.
void MomentumOperator::apply(const double* u, double* y) const {
  const Impl& im = *impl_;
  if (!im.have_lin) throw std::logic_error("momentum apply: linearization not set");
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  const bool conv = im.conv_in_lhs;
  const bool div_form = im.cfg.form == ConvectiveForm::divergence;
  const double zlf = im.cfg.penalty.zeta_lf;
  std::fill(y, y + n(), 0.0);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    TScratch& s = im.ts[tid];
    CellEval& ev = *s.vel_nl;
    const int nqd = ev.n_qpoints();
    const int nfq = ev.n_face_qpoints();
    const double jac = ev.volume_jacobian();
    const double* uc = u + static_cast<std::size_t>(c) * dim * npc;
    double* m = y + static_cast<std::size_t>(c) * dim * npc;
    double* uv = s.va.data();
    double* gu = s.ga.data();
    double* fw = s.fw.data();
    for (int i = 0; i < dim; ++i) {
      ev.values(uc + i * npc, uv + i * nqd);
      for (int j = 0; j < dim; ++j) ev.phys_deriv(uc + i * npc, j, gu + (i * dim + j) * nqd);
    }
    const double* sv = im.have_lin ? im.star_vals.data() + static_cast<std::size_t>(c) * dim * nqd
                                   : nullptr;
    // divergence-penalty factor and divergence of u
    double divp_factor = 0.0;
    if (im.cfg.divergence_penalty && im.have_lin)
      divp_factor = im.cfg.penalty.zeta_d * im.h_e * im.avg_norm[c] / (im.vs->degree() + 1.0);
    double* divu = s.w1.data();
    if (divp_factor != 0.0) {
      for (int q = 0; q < nqd; ++q) {
        double d = 0.0;
        for (int a = 0; a < dim; ++a) d += gu[(a * dim + a) * nqd + q];
        divu[q] = d;
      }
    }
    // volume terms
    for (int i = 0; i < dim; ++i) {
      // (gamma0/dt u, v) and convective-form (u*.grad u, v)
      for (int q = 0; q < nqd; ++q) {
        double val = im.gamma0_over_dt * uv[i * nqd + q];
        if (conv && !div_form) {
          double cv = 0.0;
          for (int j = 0; j < dim; ++j) cv += sv[j * nqd + q] * gu[(i * dim + j) * nqd + q];
          val += cv;
        }
        fw[q] = val * ev.qweights()[q] * jac;
      }
      ev.moments_add(fw, m + i * npc);
      // (nu grad u, grad v), divergence-form -(u o u*, grad v), a_div
      for (int a = 0; a < dim; ++a) {
        const double sc = ev.deriv_scale(a) * jac;
        for (int q = 0; q < nqd; ++q) {
          double val = im.nu * gu[(i * dim + a) * nqd + q];
          if (conv && div_form) val -= uv[i * nqd + q] * sv[a * nqd + q];
          if (divp_factor != 0.0 && a == i) val += divp_factor * divu[q];
          fw[q] = val * ev.qweights()[q] * sc;
        }
        ev.deriv_moments_add(fw, a, m + i * npc);
      }
    }
    // face terms
    for (int a = 0; a < dim; ++a) {
      const double fj = ev.face_jacobian(a);
      const double dsc = ev.deriv_scale(a);
      const double tau = im.tau[a];
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const double sgn = side == 0 ? -1.0 : 1.0;
        if (cf.interior) {
          const int nb = im.other_cell(cf, c);
          const int nb_side = 1 - side;
          const double* un = u + static_cast<std::size_t>(nb) * dim * npc;
          for (int i = 0; i < dim; ++i) {
            ev.face_values(uc + i * npc, a, side, s.tm.data() + i * nfq);
            ev.face_values(un + i * npc, a, nb_side, s.tp.data() + i * nfq);
            ev.face_ref_deriv(uc + i * npc, a, side, a, s.dm.data() + i * nfq);
            ev.face_ref_deriv(un + i * npc, a, nb_side, a, s.dp.data() + i * nfq);
          }
          const double* star_m =
              im.have_lin
                  ? im.star_face.data() + ((static_cast<std::size_t>(c) * 6 + 2 * a + side) * dim) * nfq
                  : nullptr;
          const double* star_p =
              im.have_lin
                  ? im.star_face.data() +
                        ((static_cast<std::size_t>(nb) * 6 + 2 * a + nb_side) * dim) * nfq
                  : nullptr;
          double cont_factor = 0.0;
          if (im.cfg.continuity_penalty && im.have_lin)
            cont_factor = im.cfg.penalty.zeta_c * 0.5 * (im.avg_norm[c] + im.avg_norm[nb]);
          for (int i = 0; i < dim; ++i) {
            const double* um = s.tm.data() + i * nfq;
            const double* up = s.tp.data() + i * nfq;
            for (int q = 0; q < nfq; ++q) {
              const double jmp = um[q] - up[q];
              const double avg_dun = 0.5 * (s.dm[i * nfq + q] + s.dp[i * nfq + q]) * dsc * sgn;
              // viscous: -(v, nu({grad u n} - tau [u]))
              double val = -im.nu * (avg_dun - tau * jmp);
              if (conv) {
                if (!div_form) {
                  const double an = 0.5 * (star_m[a * nfq + q] + star_p[a * nfq + q]) * sgn;
                  const double flux = an * 0.5 * (um[q] + up[q]) + 0.5 * std::abs(an) * jmp;
                  val += flux - an * um[q];
                } else {
                  const double am = star_m[a * nfq + q] * sgn;
                  const double ap = star_p[a * nfq + q] * sgn;
                  const double lambda = zlf * std::max(std::abs(am), std::abs(ap));
                  const double flux = 0.5 * (um[q] * am + up[q] * ap) + 0.5 * lambda * jmp;
                  val += flux;
                }
              }
              if (cont_factor != 0.0 && i == a) val += cont_factor * jmp;  // ([u].n)(v.n): sgn^2
              fw[q] = val * ev.face_qweights()[q] * fj;
            }
            ev.face_moments_add(fw, a, side, m + i * npc);
            // viscous symmetric term: -(grad v n, 1/2 nu [u])
            for (int q = 0; q < nfq; ++q) {
              const double jmp = um[q] - up[q];
              fw[q] = -0.5 * im.nu * jmp * sgn * dsc * ev.face_qweights()[q] * fj;
            }
            ev.face_deriv_moments_add(fw, a, side, a, m + i * npc);
          }
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          if (bf.kind == BoundaryKind::dirichlet) {
            const double* star_m =
                im.have_lin
                    ? im.star_face.data() +
                          ((static_cast<std::size_t>(c) * 6 + 2 * a + side) * dim) * nfq
                    : nullptr;
            double cont_factor = 0.0;
            if (im.cfg.continuity_penalty && im.have_lin)
              cont_factor = 2.0 * im.cfg.penalty.zeta_c * im.avg_norm[c];
            for (int i = 0; i < dim; ++i) {
              ev.face_values(uc + i * npc, a, side, s.tm.data());
              ev.face_ref_deriv(uc + i * npc, a, side, a, s.dm.data());
              for (int q = 0; q < nfq; ++q) {
                const double uval = s.tm[q];
                const double dun = s.dm[q] * dsc * sgn;
                // viscous: -(v, nu grad u n - 2 nu tau u)
                double val = -(im.nu * dun - 2.0 * im.nu * tau * uval);
                if (conv) {
                  const double an = star_m[a * nfq + q] * sgn;
                  if (!div_form) {
                    val += (std::abs(an) - an) * uval;
                  } else {
                    val += std::abs(an) * uval;
                  }
                }
                if (cont_factor != 0.0 && i == a) val += cont_factor * uval;
                fw[q] = val * ev.face_qweights()[q] * fj;
              }
              ev.face_moments_add(fw, a, side, m + i * npc);
              // viscous: -(grad v n, nu u)
              for (int q = 0; q < nfq; ++q)
                fw[q] = -im.nu * s.tm[q] * sgn * dsc * ev.face_qweights()[q] * fj;
              ev.face_deriv_moments_add(fw, a, side, a, m + i * npc);
            }
          } else {  // Neumann: divergence-form (v, (u o u*).n); nothing else
            if (conv && div_form) {
              const double* star_m =
                  im.star_face.data() +
                  ((static_cast<std::size_t>(c) * 6 + 2 * a + side) * dim) * nfq;
              for (int i = 0; i < dim; ++i) {
                ev.face_values(uc + i * npc, a, side, s.tm.data());
                for (int q = 0; q < nfq; ++q) {
                  const double an = star_m[a * nfq + q] * sgn;
                  fw[q] = s.tm[q] * an * ev.face_qweights()[q] * fj;
                }
                ev.face_moments_add(fw, a, side, m + i * npc);
              }
            }
          }
        }
      }
    }
  });
}

LinearOperator MomentumOperator::linear_operator(ConvectionMode mode) const {
  impl_->conv_in_lhs = mode != ConvectionMode::explicit_mode;
  LinearOperator op;
  op.n = n();
  op.symmetric = false;
  op.apply = [this](const double* x, double* y) { apply(x, y); };
  return op;
}

void MomentumOperator::apply_mass(const DGField& u, double gamma0, double dt,
                                  std::vector<double>& y) const {
  if (!(dt > 0.0)) throw std::invalid_argument("apply_mass: dt must be positive");
  add_rhs_mass_history(u, gamma0 / dt, y);
}

void MomentumOperator::add_rhs_mass_history(const DGField& u_combined, double scale,
                                            std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  if (rhs.size() != im.vs->n_dofs()) rhs.resize(im.vs->n_dofs(), 0.0);
  parallel_for(im.vs->mesh().n_cells(), im.cfg.threads, [&](std::size_t c, int tid) {
    im.cell_mass_add(u_combined.cell_data(static_cast<int>(c)), scale,
                     rhs.data() + c * im.vs->dofs_per_cell(), im.ts[tid]);
  });
}

void MomentumOperator::apply_convective(const DGField& u, const DGField& u_star,
                                        std::vector<double>& y, double scale) const {
  const Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  const bool div_form = im.cfg.form == ConvectiveForm::divergence;
  const double zlf = im.cfg.penalty.zeta_lf;
  if (y.size() != im.vs->n_dofs()) y.resize(im.vs->n_dofs(), 0.0);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    TScratch& s = im.ts[tid];
    CellEval& ev = *s.vel_nl;
    const int nqd = ev.n_qpoints();
    const int nfq = ev.n_face_qpoints();
    const double jac = ev.volume_jacobian();
    const double* uc = u.cell_data(c);
    const double* sc_ = u_star.cell_data(c);
    double* m = y.data() + static_cast<std::size_t>(c) * dim * npc;
    double* uv = s.va.data();
    double* sv = s.ga.data();  // u* values
    double* fw = s.fw.data();
    double* gr = s.w1.data();
    for (int i = 0; i < dim; ++i) {
      ev.values(uc + i * npc, uv + i * nqd);
      ev.values(sc_ + i * npc, sv + i * nqd);
    }
    if (!div_form) {
      // (u* . grad u, v)
      for (int i = 0; i < dim; ++i) {
        std::fill(fw, fw + nqd, 0.0);
        for (int j = 0; j < dim; ++j) {
          ev.phys_deriv(uc + i * npc, j, gr);
          for (int q = 0; q < nqd; ++q) fw[q] += sv[j * nqd + q] * gr[q];
        }
        for (int q = 0; q < nqd; ++q) fw[q] *= scale * ev.qweights()[q] * jac;
        ev.moments_add(fw, m + i * npc);
      }
    } else {
      // -(u o u*, grad v)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          const double dsc = ev.deriv_scale(j) * jac;
          for (int q = 0; q < nqd; ++q)
            fw[q] = -scale * uv[i * nqd + q] * sv[j * nqd + q] * ev.qweights()[q] * dsc;
          ev.deriv_moments_add(fw, j, m + i * npc);
        }
    }
    // faces
    for (int a = 0; a < dim; ++a) {
      const double fj = ev.face_jacobian(a);
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const double sgn = side == 0 ? -1.0 : 1.0;
        if (cf.interior) {
          const int nb = im.other_cell(cf, c);
          const int nb_side = 1 - side;
          for (int i = 0; i < dim; ++i) {
            ev.face_values(uc + i * npc, a, side, s.tm.data() + i * nfq);
            ev.face_values(u.cell_data(nb) + i * npc, a, nb_side, s.tp.data() + i * nfq);
          }
          ev.face_values(sc_ + a * npc, a, side, s.e1.data());
          ev.face_values(u_star.cell_data(nb) + a * npc, a, nb_side, s.e2.data());
          for (int i = 0; i < dim; ++i) {
            for (int q = 0; q < nfq; ++q) {
              const double um = s.tm[i * nfq + q], up = s.tp[i * nfq + q];
              double val;
              if (!div_form) {
                const double an = 0.5 * (s.e1[q] + s.e2[q]) * sgn;
                val = an * 0.5 * (um + up) + 0.5 * std::abs(an) * (um - up) - an * um;
              } else {
                const double am = s.e1[q] * sgn, ap = s.e2[q] * sgn;
                const double lambda = zlf * std::max(std::abs(am), std::abs(ap));
                val = 0.5 * (um * am + up * ap) + 0.5 * lambda * (um - up);
              }
              fw[q] = scale * val * ev.face_qweights()[q] * fj;
            }
            ev.face_moments_add(fw, a, side, m + i * npc);
          }
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          ev.face_values(sc_ + a * npc, a, side, s.e1.data());
          if (bf.kind == BoundaryKind::dirichlet) {
            for (int i = 0; i < dim; ++i) {
              ev.face_values(uc + i * npc, a, side, s.tm.data());
              for (int q = 0; q < nfq; ++q) {
                const double an = s.e1[q] * sgn;
                const double coeff = div_form ? std::abs(an) : (std::abs(an) - an);
                fw[q] = scale * coeff * s.tm[q] * ev.face_qweights()[q] * fj;
              }
              ev.face_moments_add(fw, a, side, m + i * npc);
            }
          } else if (div_form) {  // Neumann, divergence form: (v, (u o u*).n)
            for (int i = 0; i < dim; ++i) {
              ev.face_values(uc + i * npc, a, side, s.tm.data());
              for (int q = 0; q < nfq; ++q)
                fw[q] = scale * s.tm[q] * s.e1[q] * sgn * ev.face_qweights()[q] * fj;
              ev.face_moments_add(fw, a, side, m + i * npc);
            }
          }
        }
      }
    }
  });
}

void MomentumOperator::apply_viscous(const DGField& u, std::vector<double>& y) const {
  const Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  if (y.size() != im.vs->n_dofs()) y.resize(im.vs->n_dofs(), 0.0);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    TScratch& s = im.ts[tid];
    CellEval& ev = *s.vel_lin;
    const int nqd = ev.n_qpoints();
    const int nfq = ev.n_face_qpoints();
    const double jac = ev.volume_jacobian();
    const double* uc = u.cell_data(c);
    double* m = y.data() + static_cast<std::size_t>(c) * dim * npc;
    double* gr = s.w1.data();
    double* fw = s.fw.data();
    for (int i = 0; i < dim; ++i)
      for (int a = 0; a < dim; ++a) {
        ev.phys_deriv(uc + i * npc, a, gr);
        const double dsc = ev.deriv_scale(a) * jac;
        for (int q = 0; q < nqd; ++q) fw[q] = im.nu * gr[q] * ev.qweights()[q] * dsc;
        ev.deriv_moments_add(fw, a, m + i * npc);
      }
    for (int a = 0; a < dim; ++a) {
      const double fj = ev.face_jacobian(a);
      const double dsc = ev.deriv_scale(a);
      const double tau = im.tau[a];
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const double sgn = side == 0 ? -1.0 : 1.0;
        if (cf.interior) {
          const int nb = im.other_cell(cf, c);
          const int nb_side = 1 - side;
          const double* un = u.cell_data(nb);
          for (int i = 0; i < dim; ++i) {
            ev.face_values(uc + i * npc, a, side, s.tm.data());
            ev.face_values(un + i * npc, a, nb_side, s.tp.data());
            ev.face_ref_deriv(uc + i * npc, a, side, a, s.dm.data());
            ev.face_ref_deriv(un + i * npc, a, nb_side, a, s.dp.data());
            for (int q = 0; q < nfq; ++q) {
              const double jmp = s.tm[q] - s.tp[q];
              const double avg_dun = 0.5 * (s.dm[q] + s.dp[q]) * dsc * sgn;
              fw[q] = -im.nu * (avg_dun - tau * jmp) * ev.face_qweights()[q] * fj;
            }
            ev.face_moments_add(fw, a, side, m + i * npc);
            for (int q = 0; q < nfq; ++q) {
              const double jmp = s.tm[q] - s.tp[q];
              fw[q] = -0.5 * im.nu * jmp * sgn * dsc * ev.face_qweights()[q] * fj;
            }
            ev.face_deriv_moments_add(fw, a, side, a, m + i * npc);
          }
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          if (bf.kind != BoundaryKind::dirichlet) continue;
          for (int i = 0; i < dim; ++i) {
            ev.face_values(uc + i * npc, a, side, s.tm.data());
            ev.face_ref_deriv(uc + i * npc, a, side, a, s.dm.data());
            for (int q = 0; q < nfq; ++q) {
              const double dun = s.dm[q] * dsc * sgn;
              fw[q] = -(im.nu * dun - 2.0 * im.nu * tau * s.tm[q]) * ev.face_qweights()[q] * fj;
            }
            ev.face_moments_add(fw, a, side, m + i * npc);
            for (int q = 0; q < nfq; ++q)
              fw[q] = -im.nu * s.tm[q] * sgn * dsc * ev.face_qweights()[q] * fj;
            ev.face_deriv_moments_add(fw, a, side, a, m + i * npc);
          }
        }
      }
    }
  });
}

void MomentumOperator::apply_divergence_penalty(const DGField& u, const DGField& u_star,
                                                std::vector<double>& y) const {
  const Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  if (y.size() != im.vs->n_dofs()) y.resize(im.vs->n_dofs(), 0.0);
  const auto avg = im.compute_avg_norms(u_star);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    TScratch& s = im.ts[tid];
    CellEval& ev = *s.vel_lin;
    const int nqd = ev.n_qpoints();
    const double jac = ev.volume_jacobian();
    const double factor = im.cfg.penalty.zeta_d * im.h_e * avg[c] / (im.vs->degree() + 1.0);
    if (factor == 0.0) return;
    const double* uc = u.cell_data(c);
    double* m = y.data() + static_cast<std::size_t>(c) * dim * npc;
    double* divu = s.w1.data();
    double* gr = s.fw.data();
    double* fw = s.va.data();
    std::fill(divu, divu + nqd, 0.0);
    for (int a = 0; a < dim; ++a) {
      ev.phys_deriv(uc + a * npc, a, gr);
      for (int q = 0; q < nqd; ++q) divu[q] += gr[q];
    }
    for (int i = 0; i < dim; ++i) {
      const double dsc = ev.deriv_scale(i) * jac;
      for (int q = 0; q < nqd; ++q) fw[q] = factor * divu[q] * ev.qweights()[q] * dsc;
      ev.deriv_moments_add(fw, i, m + i * npc);
    }
  });
}

void MomentumOperator::apply_continuity_penalty(const DGField& u, const DGField& u_star,
                                                std::vector<double>& y) const {
  const Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  if (y.size() != im.vs->n_dofs()) y.resize(im.vs->n_dofs(), 0.0);
  const auto avg = im.compute_avg_norms(u_star);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    TScratch& s = im.ts[tid];
    CellEval& ev = *s.vel_nl;
    const int nfq = ev.n_face_qpoints();
    double* m = y.data() + static_cast<std::size_t>(c) * dim * npc;
    const double* uc = u.cell_data(c);
    double* fw = s.fw.data();
    for (int a = 0; a < dim; ++a) {
      const double fj = ev.face_jacobian(a);
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        if (cf.interior) {
          const int nb = im.other_cell(cf, c);
          const double factor = im.cfg.penalty.zeta_c * 0.5 * (avg[c] + avg[nb]);
          if (factor == 0.0) continue;
          ev.face_values(uc + a * npc, a, side, s.tm.data());
          ev.face_values(u.cell_data(nb) + a * npc, a, 1 - side, s.tp.data());
          for (int q = 0; q < nfq; ++q)
            fw[q] = factor * (s.tm[q] - s.tp[q]) * ev.face_qweights()[q] * fj;
          ev.face_moments_add(fw, a, side, m + a * npc);
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          if (bf.kind != BoundaryKind::dirichlet) continue;
          const double factor = 2.0 * im.cfg.penalty.zeta_c * avg[c];
          if (factor == 0.0) continue;
          ev.face_values(uc + a * npc, a, side, s.tm.data());
          for (int q = 0; q < nfq; ++q)
            fw[q] = factor * s.tm[q] * ev.face_qweights()[q] * fj;
          ev.face_moments_add(fw, a, side, m + a * npc);
        }
      }
    }
  });
}

void MomentumOperator::add_rhs_forcing(double t, std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  if (!im.problem->forcing) return;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  if (rhs.size() != im.vs->n_dofs()) rhs.resize(im.vs->n_dofs(), 0.0);
  TScratch& s = im.ts[0];
  CellEval& ev = *s.vel_lin;
  const int nqd = ev.n_qpoints();
  const double jac = ev.volume_jacobian();
  std::vector<std::array<double, 3>> xq;
  std::vector<double> fvals(static_cast<std::size_t>(dim) * nqd);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    detail::volume_quad_coordinates(mesh, c, ev.rule(), xq);
    for (int q = 0; q < nqd; ++q) {
      const auto f = im.problem->forcing(xq[q], t);
      for (int i = 0; i < dim; ++i) fvals[i * nqd + q] = f[i];
    }
    double* m = rhs.data() + static_cast<std::size_t>(c) * dim * npc;
    for (int i = 0; i < dim; ++i) {
      for (int q = 0; q < nqd; ++q)
        s.fw[q] = fvals[i * nqd + q] * ev.qweights()[q] * jac;
      ev.moments_add(s.fw.data(), m + i * npc);
    }
  }
}

void MomentumOperator::add_rhs_pressure(const DGField& p_hat, double t,
                                        std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  const int npc_p = im.ps->nodes_per_cell();
  if (rhs.size() != im.vs->n_dofs()) rhs.resize(im.vs->n_dofs(), 0.0);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    TScratch& s = im.ts[tid];
    CellEval& evu = *s.vel_lin;
    CellEval& evp = *s.pres_lin;
    const int nqd = evu.n_qpoints();
    const int nfq = evu.n_face_qpoints();
    const double jac = evu.volume_jacobian();
    const double* pc = p_hat.cell_data(c);
    double* m = rhs.data() + static_cast<std::size_t>(c) * dim * npc;
    double* gr = s.w1.data();
    double* fw = s.fw.data();
    // -(grad p, v)
    for (int i = 0; i < dim; ++i) {
      evp.phys_deriv(pc, i, gr);
      for (int q = 0; q < nqd; ++q) fw[q] = -gr[q] * evu.qweights()[q] * jac;
      evu.moments_add(fw, m + i * npc);
    }
    // faces: + (1/2 [p] n, v) interior; + ((p - g_p) n, v) on Gamma_N
    std::vector<std::array<double, 3>> xq;
    for (int a = 0; a < dim; ++a) {
      const double fj = evu.face_jacobian(a);
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const double sgn = side == 0 ? -1.0 : 1.0;
        if (cf.interior) {
          const int nb = im.other_cell(cf, c);
          evp.face_values(pc, a, side, s.e1.data());
          evp.face_values(p_hat.cell_data(nb), a, 1 - side, s.e2.data());
          for (int q = 0; q < nfq; ++q)
            fw[q] = 0.5 * (s.e1[q] - s.e2[q]) * sgn * evu.face_qweights()[q] * fj;
          evu.face_moments_add(fw, a, side, m + a * npc);
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          if (bf.kind != BoundaryKind::neumann) continue;
          evp.face_values(pc, a, side, s.e1.data());
          detail::face_quad_coordinates(mesh, c, a, side, evu.rule(), xq);
          for (int q = 0; q < nfq; ++q) {
            const double gp = im.problem->boundary_pressure(xq[q], t);
            fw[q] = (s.e1[q] - gp) * sgn * evu.face_qweights()[q] * fj;
          }
          evu.face_moments_add(fw, a, side, m + a * npc);
        }
      }
    }
  });
  (void)npc_p;
}

void MomentumOperator::add_rhs_convective_data(const DGField& u_star, double t, double scale,
                                               std::vector<double>& rhs) const {
  // c_r: identical algebra for both forms, Gamma_D only:
  //   (v, (|u*.n| - u*.n) g)
  const Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  if (rhs.size() != im.vs->n_dofs()) rhs.resize(im.vs->n_dofs(), 0.0);
  TScratch& s = im.ts[0];
  CellEval& ev = *s.vel_nl;
  const int nfq = ev.n_face_qpoints();
  std::vector<std::array<double, 3>> xq;
  for (const BoundaryFace& bf : mesh.boundary_faces()) {
    if (bf.kind != BoundaryKind::dirichlet) continue;
    const int a = bf.axis;
    const double sgn = bf.side == 0 ? -1.0 : 1.0;
    const double fj = ev.face_jacobian(a);
    ev.face_values(u_star.cell_data(bf.cell) + a * npc, a, bf.side, s.e1.data());
    detail::face_quad_coordinates(mesh, bf.cell, a, bf.side, ev.rule(), xq);
    double* m = rhs.data() + static_cast<std::size_t>(bf.cell) * dim * npc;
    for (int i = 0; i < dim; ++i) {
      for (int q = 0; q < nfq; ++q) {
        const double an = s.e1[q] * sgn;
        const double g = im.problem->dirichlet_velocity(xq[q], t)[i];
        s.fw[q] = scale * (std::abs(an) - an) * g * ev.face_qweights()[q] * fj;
      }
      ev.face_moments_add(s.fw.data(), a, bf.side, m + i * npc);
    }
  }
}

void MomentumOperator::add_rhs_viscous_data(double t, std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  if (rhs.size() != im.vs->n_dofs()) rhs.resize(im.vs->n_dofs(), 0.0);
  TScratch& s = im.ts[0];
  CellEval& ev = *s.vel_lin;
  const int nfq = ev.n_face_qpoints();
  std::vector<std::array<double, 3>> xq;
  for (const BoundaryFace& bf : mesh.boundary_faces()) {
    const int a = bf.axis;
    const double sgn = bf.side == 0 ? -1.0 : 1.0;
    const double fj = ev.face_jacobian(a);
    const double dsc = ev.deriv_scale(a);
    detail::face_quad_coordinates(mesh, bf.cell, a, bf.side, ev.rule(), xq);
    double* m = rhs.data() + static_cast<std::size_t>(bf.cell) * dim * npc;
    if (bf.kind == BoundaryKind::dirichlet) {
      for (int i = 0; i < dim; ++i) {
        // (v, 2 nu tau g)
        for (int q = 0; q < nfq; ++q) {
          const double g = im.problem->dirichlet_velocity(xq[q], t)[i];
          s.fw[q] = 2.0 * im.nu * im.tau[a] * g * ev.face_qweights()[q] * fj;
        }
        ev.face_moments_add(s.fw.data(), a, bf.side, m + i * npc);
        // -(grad v n, nu g)
        for (int q = 0; q < nfq; ++q) {
          const double g = im.problem->dirichlet_velocity(xq[q], t)[i];
          s.fw[q] = -im.nu * g * sgn * dsc * ev.face_qweights()[q] * fj;
        }
        ev.face_deriv_moments_add(s.fw.data(), a, bf.side, a, m + i * npc);
      }
    } else {
      // (h_u, v)
      std::array<double, 3> normal{0, 0, 0};
      normal[a] = sgn;
      for (int i = 0; i < dim; ++i) {
        for (int q = 0; q < nfq; ++q) {
          const double h = im.problem->traction_viscous(xq[q], t, normal)[i];
          s.fw[q] = h * ev.face_qweights()[q] * fj;
        }
        ev.face_moments_add(s.fw.data(), a, bf.side, m + i * npc);
      }
    }
  }
}

void MomentumOperator::add_rhs_continuity_penalty_data(const DGField& u_star, double t,
                                                       std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  if (!im.cfg.continuity_penalty) return;
  const Mesh& mesh = im.vs->mesh();
  const int dim = im.dim;
  const int npc = im.npc;
  if (rhs.size() != im.vs->n_dofs()) rhs.resize(im.vs->n_dofs(), 0.0);
  const auto avg = im.compute_avg_norms(u_star);
  TScratch& s = im.ts[0];
  CellEval& ev = *s.vel_nl;
  const int nfq = ev.n_face_qpoints();
  std::vector<std::array<double, 3>> xq;
  for (const BoundaryFace& bf : mesh.boundary_faces()) {
    if (bf.kind != BoundaryKind::dirichlet) continue;
    const int a = bf.axis;
    const double fj = ev.face_jacobian(a);
    const double factor = 2.0 * im.cfg.penalty.zeta_c * avg[bf.cell];
    if (factor == 0.0) continue;
    detail::face_quad_coordinates(mesh, bf.cell, a, bf.side, ev.rule(), xq);
    for (int q = 0; q < nfq; ++q) {
      const double ga = im.problem->dirichlet_velocity(xq[q], t)[a];
      s.fw[q] = factor * ga * ev.face_qweights()[q] * fj;
    }
    ev.face_moments_add(s.fw.data(), a, bf.side,
                        rhs.data() + static_cast<std::size_t>(bf.cell) * dim * npc + a * npc);
  }
}

}  // namespace splitdg

