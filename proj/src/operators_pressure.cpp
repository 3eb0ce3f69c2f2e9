#include <cmath>
#include <memory>
#include <stdexcept>

#include "splitdg/field_ops.hpp"
#include "splitdg/operators.hpp"
#include "splitdg/parallel.hpp"
#include "splitdg/small_dense.hpp"
#include "operators_common.hpp"

namespace splitdg {

double sipg_tau(int degree, double face_area, double cell_volume) {
  const double kp1 = degree + 1.0;
  return kp1 * kp1 * face_area / cell_volume;
}

DGField vorticity_projection(const DGField& u, const FunctionSpace& omega_space) {
  const FunctionSpace& vs = *u.space;
  const Mesh& mesh = vs.mesh();
  const int dim = mesh.dim();
  if (vs.components() != dim)
    throw std::invalid_argument("vorticity_projection: vector field required");
  const int n_q = vs.degree() + 1;  // curl(u) has per-axis degree <= k: exact
  vs.warm_tables(n_q);
  omega_space.warm_tables(n_q);
  CellEval evu(vs, n_q);
  CellEval evw(omega_space, n_q);
  const int nqd = evu.n_qpoints();
  const int npc_u = vs.nodes_per_cell();
  const int npc_w = omega_space.nodes_per_cell();
  std::vector<double> moments(omega_space.n_dofs(), 0.0);
  std::vector<double> grad(static_cast<std::size_t>(dim) * dim * nqd);
  std::vector<double> fw(nqd);
  const double jac = evu.volume_jacobian();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double* cd = u.cell_data(c);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        evu.phys_deriv(cd + i * npc_u, j, grad.data() + (i * dim + j) * nqd);
    double* m = moments.data() + static_cast<std::size_t>(c) * omega_space.dofs_per_cell();
    auto d = [&](int i, int j) { return grad.data() + (i * dim + j) * nqd; };
    if (dim == 2) {
      // omega = d(u2)/dx1 - d(u1)/dx2
      for (int q = 0; q < nqd; ++q)
        fw[q] = (d(1, 0)[q] - d(0, 1)[q]) * evw.qweights()[q] * jac;
      evw.moments_add(fw.data(), m);
    } else {
      const int comp_from[3][2] = {{2, 1}, {0, 2}, {1, 0}};
      const int axis_of[3][2] = {{1, 2}, {2, 0}, {0, 1}};
      for (int i = 0; i < 3; ++i) {
        for (int q = 0; q < nqd; ++q)
          fw[q] = (d(comp_from[i][0], axis_of[i][0])[q] - d(comp_from[i][1], axis_of[i][1])[q]) *
                  evw.qweights()[q] * jac;
        evw.moments_add(fw.data(), m + i * npc_w);
      }
    }
  }
  DGField omega(omega_space);
  apply_inverse_mass(omega_space, moments, omega.data, 1);
  return omega;
}

namespace {

struct Scratch {
  std::unique_ptr<CellEval> pres;      // pressure space @ lhs rule
  std::unique_ptr<CellEval> pres_r;    // pressure space @ rhs rule
  std::unique_ptr<CellEval> vel_r;     // velocity space @ rhs rule
  std::vector<double> a, b, c, d, e, f;
};

// normal component of (u.grad)u traced from one side of a face:
// out[q] = sum_j u_j(q) * d(u_axis)/dx_j (q)
void trace_conv_normal(CellEval& evu, const double* coeffs, int axis, int side, int npc_u,
                       int dim, int nfq, double* tmp1, double* tmp2, double* out) {
  for (int q = 0; q < nfq; ++q) out[q] = 0.0;
  for (int j = 0; j < dim; ++j) {
    evu.face_values(coeffs + j * npc_u, axis, side, tmp1);
    evu.face_ref_deriv(coeffs + axis * npc_u, axis, side, j, tmp2);
    const double dsc = evu.deriv_scale(j);
    for (int q = 0; q < nfq; ++q) out[q] += tmp1[q] * tmp2[q] * dsc;
  }
}

}  // namespace

struct PressurePoissonOperator::Impl {
  const FunctionSpace* ps;
  const FunctionSpace* vs;
  const ProblemSpec* problem;
  OperatorConfig cfg;
  int dim;
  int nq_lhs, nq_rhs, nq_rhs_lin;
  std::array<double, 3> tau;  // per axis, pressure degree
  bool singular;
  std::unique_ptr<FunctionSpace> omega_space;
  mutable std::vector<Scratch> scratch;

  Impl(const FunctionSpace& pressure_space, const FunctionSpace& velocity_space,
       const ProblemSpec& prob, const OperatorConfig& config)
      : ps(&pressure_space), vs(&velocity_space), problem(&prob), cfg(config) {
    const Mesh& mesh = ps->mesh();
    dim = mesh.dim();
    if (ps->components() != 1) throw std::invalid_argument("ppe: pressure space must be scalar");
    if (vs->degree() != ps->degree() + 1)
      throw std::invalid_argument("ppe: inf-sup pairing requires k_u = k_p + 1");
    nq_lhs = ps->degree() + 1;
    nq_rhs = cfg.n_q_nonlinear > 0 ? cfg.n_q_nonlinear : vs->degree() + 2;
    nq_rhs_lin = cfg.n_q_linear > 0 ? cfg.n_q_linear : vs->degree() + 1;
    const double vol = mesh.cell(0).volume;
    for (int a = 0; a < dim; ++a)
      tau[a] = sipg_tau(ps->degree(), detail::face_area(mesh, a), vol);
    singular = !mesh.has_boundary(BoundaryKind::neumann);
    if (mesh.has_boundary(BoundaryKind::dirichlet)) {
      omega_space = std::make_unique<FunctionSpace>(mesh, vs->degree(), dim == 2 ? 1 : dim);
      omega_space->warm_tables(vs->degree() + 1);
    }
    ps->warm_tables(nq_lhs);
    ps->warm_tables(nq_rhs);
    ps->warm_tables(nq_rhs_lin);
    vs->warm_tables(nq_rhs);
    vs->warm_tables(nq_rhs_lin);
    const int nthreads = std::max(1, cfg.threads);
    scratch.resize(nthreads);
    for (auto& s : scratch) {
      s.pres = std::make_unique<CellEval>(*ps, nq_lhs);
      s.pres_r = std::make_unique<CellEval>(*ps, nq_rhs);
      s.vel_r = std::make_unique<CellEval>(*vs, nq_rhs);
      const std::size_t cap = static_cast<std::size_t>(tensor::ipow(nq_rhs, dim)) * 12;
      s.a.resize(cap);
      s.b.resize(cap);
      s.c.resize(cap);
      s.d.resize(cap);
      s.e.resize(cap);
      s.f.resize(cap);
    }
  }
};

PressurePoissonOperator::PressurePoissonOperator(const FunctionSpace& pressure_space,
                                                 const FunctionSpace& velocity_space,
                                                 const ProblemSpec& problem,
                                                 const OperatorConfig& cfg)
    : impl_(std::make_unique<Impl>(pressure_space, velocity_space, problem, cfg)) {}

PressurePoissonOperator::~PressurePoissonOperator() = default;

std::size_t PressurePoissonOperator::n() const { return impl_->ps->n_dofs(); }
bool PressurePoissonOperator::singular() const { return impl_->singular; }
const FunctionSpace& PressurePoissonOperator::pressure_space() const { return *impl_->ps; }
const FunctionSpace& PressurePoissonOperator::velocity_space() const { return *impl_->vs; }

void PressurePoissonOperator::apply(const double* p, double* y) const {
  const Impl& im = *impl_;
  const FunctionSpace& ps = *im.ps;
  const Mesh& mesh = ps.mesh();
  const int dim = im.dim;
  const int npc = ps.nodes_per_cell();
  std::fill(y, y + ps.n_dofs(), 0.0);
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    Scratch& s = im.scratch[tid];
    CellEval& ev = *s.pres;
    const int nqd = ev.n_qpoints();
    const int nfq = ev.n_face_qpoints();
    const double jac = ev.volume_jacobian();
    const double* pc = p + static_cast<std::size_t>(c) * npc;
    double* m = y + static_cast<std::size_t>(c) * npc;
    double* dp = s.a.data();
    double* fw = s.b.data();
    // volume (grad p, grad q)
    for (int a = 0; a < dim; ++a) {
      ev.phys_deriv(pc, a, dp);
      const double sc = ev.deriv_scale(a) * jac;
      for (int q = 0; q < nqd; ++q) fw[q] = dp[q] * ev.qweights()[q] * sc;
      ev.deriv_moments_add(fw, a, m);
    }
    // faces
    double* pm = s.a.data();
    double* pp = s.a.data() + nfq;
    double* dpm = s.c.data();
    double* dpp = s.c.data() + nfq;
    for (int a = 0; a < dim; ++a) {
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const double sgn = side == 0 ? -1.0 : 1.0;
        const double fj = ev.face_jacobian(a);
        const double dsc = ev.deriv_scale(a);
        if (cf.interior) {
          const FaceLink& fl = mesh.interior_faces()[cf.index];
          const int nb = fl.owner == c && cf.side == 1 ? fl.neighbor : fl.owner;
          const int nb_side = 1 - side;
          const double* pn = p + static_cast<std::size_t>(nb) * npc;
          ev.face_values(pc, a, side, pm);
          ev.face_values(pn, a, nb_side, pp);
          ev.face_ref_deriv(pc, a, side, a, dpm);
          ev.face_ref_deriv(pn, a, nb_side, a, dpp);
          // -(grad q, 1/2 [p] n): derivative-test moment along the normal axis
          for (int q = 0; q < nfq; ++q) {
            const double jmp = pm[q] - pp[q];
            fw[q] = -0.5 * jmp * sgn * ev.face_qweights()[q] * fj * dsc;
          }
          ev.face_deriv_moments_add(fw, a, side, a, m);
          // -(q, {grad p}.n) + (q, tau [p])
          for (int q = 0; q < nfq; ++q) {
            const double jmp = pm[q] - pp[q];
            const double avg_dpn = 0.5 * (dpm[q] + dpp[q]) * dsc * sgn;
            fw[q] = (-avg_dpn + im.tau[a] * jmp) * ev.face_qweights()[q] * fj;
          }
          ev.face_moments_add(fw, a, side, m);
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          if (bf.kind != BoundaryKind::neumann) continue;  // no Gamma_D terms
          ev.face_values(pc, a, side, pm);
          ev.face_ref_deriv(pc, a, side, a, dpm);
          for (int q = 0; q < nfq; ++q)
            fw[q] = -pm[q] * sgn * ev.face_qweights()[q] * fj * dsc;
          ev.face_deriv_moments_add(fw, a, side, a, m);
          for (int q = 0; q < nfq; ++q) {
            const double dpn = dpm[q] * dsc * sgn;
            fw[q] = (-dpn + 2.0 * im.tau[a] * pm[q]) * ev.face_qweights()[q] * fj;
          }
          ev.face_moments_add(fw, a, side, m);
        }
      }
    }
  });
}

LinearOperator PressurePoissonOperator::linear_operator() const {
  LinearOperator op;
  op.n = n();
  op.symmetric = true;
  op.apply = [this](const double* x, double* y) { apply(x, y); };
  return op;
}

std::vector<double> PressurePoissonOperator::diagonal() const {
  // separable closed form per cell from 1D mass/stiffness diagonals
  const Impl& im = *impl_;
  const FunctionSpace& ps = *im.ps;
  const Mesh& mesh = ps.mesh();
  const int dim = im.dim;
  const int n = ps.n1d();
  const Basis1D& basis = ps.basis();
  const auto rule = gauss_legendre(n + 1);
  std::vector<double> mdiag(n, 0.0), kdiag(n, 0.0), pe(2 * n), dpe(2 * n);
  for (int i = 0; i < n; ++i) {
    for (int q = 0; q < rule.n; ++q) {
      const double v = basis.value(i, rule.points[q]);
      const double d = basis.derivative(i, rule.points[q]);
      mdiag[i] += rule.weights[q] * v * v;
      kdiag[i] += rule.weights[q] * d * d;
    }
    for (int s = 0; s < 2; ++s) {
      pe[s * n + i] = basis.value(i, s == 0 ? -1.0 : 1.0);
      dpe[s * n + i] = basis.derivative(i, s == 0 ? -1.0 : 1.0);
    }
  }
  double jac = 1.0;
  for (int a = 0; a < dim; ++a) jac *= 0.5 * mesh.dx()[a];
  std::vector<double> diag(ps.n_dofs(), 0.0);
  const int npc = ps.nodes_per_cell();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double* dcell = diag.data() + static_cast<std::size_t>(c) * npc;
    const int nz = dim == 3 ? n : 1;
    int idx = 0;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i, ++idx) {
          const std::array<int, 3> node{i, j, k};
          // volume sum_a (d_a phi)^2
          double v = 0.0;
          for (int a = 0; a < dim; ++a) {
            double term = jac * kdiag[node[a]];
            const double dsc = 2.0 / mesh.dx()[a];
            term *= dsc * dsc;
            for (int t = 0; t < dim; ++t)
              if (t != a) term *= mdiag[node[t]];
            v += term;
          }
          // faces
          for (int a = 0; a < dim; ++a) {
            double tang_mass = jac / (0.5 * mesh.dx()[a]);  // face jacobian
            double tang_mdiag = 1.0;
            for (int t = 0; t < dim; ++t)
              if (t != a) tang_mdiag *= mdiag[node[t]];
            for (int side = 0; side < 2; ++side) {
              const auto& cf = mesh.cell_faces(c)[2 * a + side];
              const double sgn = side == 0 ? -1.0 : 1.0;
              const double phi_e = pe[side * n + node[a]];
              const double dphi_e = dpe[side * n + node[a]] * (2.0 / mesh.dx()[a]) * sgn;
              const double mass_f = tang_mass * tang_mdiag * phi_e * phi_e;
              const double flux_f = tang_mass * tang_mdiag * phi_e * dphi_e;
              if (cf.interior) {
                v += -flux_f + im.tau[a] * mass_f;
              } else {
                const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
                if (bf.kind == BoundaryKind::neumann)
                  v += 2.0 * (-flux_f + im.tau[a] * mass_f);
              }
            }
          }
          dcell[idx] = v;
        }
  }
  return diag;
}

std::vector<double> PressurePoissonOperator::cell_blocks() const {
  // dense cell-diagonal blocks from separable 1D factors
  const Impl& im = *impl_;
  const FunctionSpace& ps = *im.ps;
  const Mesh& mesh = ps.mesh();
  const int dim = im.dim;
  const int n = ps.n1d();
  const int npc = ps.nodes_per_cell();
  const Basis1D& basis = ps.basis();
  const auto rule = gauss_legendre(n + 1);
  // 1D mass and stiffness matrices, endpoint values/derivatives
  std::vector<double> M1(n * n, 0.0), K1(n * n, 0.0), pe(2 * n), dpe(2 * n);
  for (int q = 0; q < rule.n; ++q)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        M1[i * n + j] += rule.weights[q] * basis.value(i, rule.points[q]) *
                         basis.value(j, rule.points[q]);
        K1[i * n + j] += rule.weights[q] * basis.derivative(i, rule.points[q]) *
                         basis.derivative(j, rule.points[q]);
      }
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < n; ++i) {
      pe[s * n + i] = basis.value(i, s == 0 ? -1.0 : 1.0);
      dpe[s * n + i] = basis.derivative(i, s == 0 ? -1.0 : 1.0);
    }
  double jac = 1.0;
  for (int a = 0; a < dim; ++a) jac *= 0.5 * mesh.dx()[a];

  std::vector<double> blocks(static_cast<std::size_t>(mesh.n_cells()) * npc * npc, 0.0);
  auto node_index = [&](const std::array<int, 3>& no) {
    return no[0] + n * (no[1] + (dim == 3 ? n * no[2] : 0));
  };
  std::vector<std::array<int, 3>> nodes;
  {
    const int nz = dim == 3 ? n : 1;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) nodes.push_back({i, j, k});
  }
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double* B = blocks.data() + static_cast<std::size_t>(c) * npc * npc;
    for (int I = 0; I < npc; ++I)
      for (int J = 0; J < npc; ++J) {
        const auto& ni = nodes[I];
        const auto& nj = nodes[J];
        double v = 0.0;
        // volume stiffness: sum_a (2/dx_a)^2 K1^(a) x M1^(others)
        for (int a = 0; a < dim; ++a) {
          double term = jac * K1[ni[a] * n + nj[a]];
          const double dsc = 2.0 / mesh.dx()[a];
          term *= dsc * dsc;
          for (int t = 0; t < dim; ++t)
            if (t != a) term *= M1[ni[t] * n + nj[t]];
          v += term;
        }
        // own-side face couplings
        for (int a = 0; a < dim; ++a) {
          const double fj = jac / (0.5 * mesh.dx()[a]);
          const double dsc = 2.0 / mesh.dx()[a];
          double tang = 1.0;
          for (int t = 0; t < dim; ++t)
            if (t != a) tang *= M1[ni[t] * n + nj[t]];
          for (int side = 0; side < 2; ++side) {
            const auto& cf = mesh.cell_faces(c)[2 * a + side];
            const double sgn = side == 0 ? -1.0 : 1.0;
            const double pi_ = pe[side * n + ni[a]], pj = pe[side * n + nj[a]];
            const double di = dpe[side * n + ni[a]] * dsc * sgn;
            const double dj = dpe[side * n + nj[a]] * dsc * sgn;
            double w = 0.0;
            if (cf.interior) {
              // -(grad q, 1/2 [p] n) - (q, {grad p}.n) + (q, tau [p]), own side
              w = -0.5 * di * pj - 0.5 * pi_ * dj + im.tau[a] * pi_ * pj;
            } else {
              const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
              if (bf.kind == BoundaryKind::neumann)
                w = -di * pj - pi_ * dj + 2.0 * im.tau[a] * pi_ * pj;
            }
            v += w * fj * tang;
          }
        }
        B[I * npc + J] = v;
      }
  }
  return blocks;
}

Preconditioner PressurePoissonOperator::block_jacobi_preconditioner() const {
  const Impl& im = *impl_;
  const FunctionSpace& ps = *im.ps;
  const int npc = ps.nodes_per_cell();
  const int ncells = ps.mesh().n_cells();
  auto blocks = cell_blocks();
  auto inv = std::make_shared<std::vector<double>>(blocks.size());
  for (int c = 0; c < ncells; ++c) {
    DenseMatrix B(npc, npc);
    std::copy(blocks.begin() + static_cast<std::size_t>(c) * npc * npc,
              blocks.begin() + static_cast<std::size_t>(c + 1) * npc * npc, B.a.begin());
    DenseMatrix Binv = invert_dense(B);
    std::copy(Binv.a.begin(), Binv.a.end(),
              inv->begin() + static_cast<std::size_t>(c) * npc * npc);
  }
  Preconditioner p;
  const std::size_t ndofs = ps.n_dofs();
  p.apply = [inv, npc, ncells, ndofs](const double* r, double* z) {
    (void)ndofs;
    for (int c = 0; c < ncells; ++c) {
      const double* B = inv->data() + static_cast<std::size_t>(c) * npc * npc;
      const double* rc = r + static_cast<std::size_t>(c) * npc;
      double* zc = z + static_cast<std::size_t>(c) * npc;
      for (int i = 0; i < npc; ++i) {
        double s = 0.0;
        for (int j = 0; j < npc; ++j) s += B[i * npc + j] * rc[j];
        zc[i] = s;
      }
    }
  };
  return p;
}

void PressurePoissonOperator::add_rhs_forcing(double t, std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  if (!im.problem->forcing) return;  // f == 0
  const FunctionSpace& ps = *im.ps;
  const Mesh& mesh = ps.mesh();
  const int dim = im.dim;
  const int npc = ps.nodes_per_cell();
  Scratch& s = im.scratch[0];
  CellEval& ev = *s.pres_r;
  const int nqd = ev.n_qpoints();
  const int nfq = ev.n_face_qpoints();
  const double jac = ev.volume_jacobian();
  std::vector<std::array<double, 3>> xq;
  std::vector<double> fw(nqd);
  // volume (f, grad q) per cell
  for (int c = 0; c < mesh.n_cells(); ++c) {
    detail::volume_quad_coordinates(mesh, c, ev.rule(), xq);
    double* m = rhs.data() + static_cast<std::size_t>(c) * npc;
    for (int a = 0; a < dim; ++a) {
      const double sc = ev.deriv_scale(a) * jac;
      for (int q = 0; q < nqd; ++q) fw[q] = im.problem->forcing(xq[q], t)[a] * ev.qweights()[q] * sc;
      ev.deriv_moments_add(fw.data(), a, m);
    }
  }
  // interior faces: f single valued, assembled once per face, scattered to both
  fw.resize(nfq);
  for (const FaceLink& fl : mesh.interior_faces()) {
    const int a = fl.axis;
    const double fj = ev.face_jacobian(a);
    detail::face_quad_coordinates(mesh, fl.owner, a, 1, ev.rule(), xq);
    for (int q = 0; q < nfq; ++q) {
      const double fn = im.problem->forcing(xq[q], t)[a];  // n = +e_a from the owner
      fw[q] = -fn * ev.face_qweights()[q] * fj;
    }
    ev.face_moments_add(fw.data(), a, 1, rhs.data() + static_cast<std::size_t>(fl.owner) * npc);
    for (int q = 0; q < nfq; ++q) fw[q] = -fw[q];
    ev.face_moments_add(fw.data(), a, 0, rhs.data() + static_cast<std::size_t>(fl.neighbor) * npc);
  }
  // Gamma_N: -(f.n, q); the Gamma_D part cancels against the consistent bc
  for (const BoundaryFace& bf : mesh.boundary_faces()) {
    if (bf.kind != BoundaryKind::neumann) continue;
    const int a = bf.axis;
    const double sgn = bf.side == 0 ? -1.0 : 1.0;
    const double fj = ev.face_jacobian(a);
    detail::face_quad_coordinates(mesh, bf.cell, a, bf.side, ev.rule(), xq);
    for (int q = 0; q < nfq; ++q)
      fw[q] = -sgn * im.problem->forcing(xq[q], t)[a] * ev.face_qweights()[q] * fj;
    ev.face_moments_add(fw.data(), a, bf.side, rhs.data() + static_cast<std::size_t>(bf.cell) * npc);
  }
}

void PressurePoissonOperator::add_rhs_convective(const DGField& u, double scale,
                                                 std::vector<double>& rhs,
                                                 PPEConvectiveFlux flux) const {
  const Impl& im = *impl_;
  const FunctionSpace& ps = *im.ps;
  const FunctionSpace& vs = *im.vs;
  const Mesh& mesh = ps.mesh();
  const int dim = im.dim;
  const int npc = ps.nodes_per_cell();
  const int npc_u = vs.nodes_per_cell();
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    Scratch& s = im.scratch[tid];
    CellEval& evp = *s.pres_r;
    CellEval& evu = *s.vel_r;
    const int nqd = evu.n_qpoints();
    const int nfq = evu.n_face_qpoints();
    const double jac = evu.volume_jacobian();
    const double* uc = u.cell_data(c);
    double* m = rhs.data() + static_cast<std::size_t>(c) * npc;
    double* uv = s.a.data();                          // dim * nqd values
    double* gu = s.b.data();                          // dim*dim*nqd gradients
    double* conv = s.c.data();                        // dim * nqd
    double* fw = s.d.data();
    for (int i = 0; i < dim; ++i) {
      evu.values(uc + i * npc_u, uv + i * nqd);
      for (int j = 0; j < dim; ++j) evu.phys_deriv(uc + i * npc_u, j, gu + (i * dim + j) * nqd);
    }
    for (int i = 0; i < dim; ++i)
      for (int q = 0; q < nqd; ++q) {
        double v = 0.0;
        for (int j = 0; j < dim; ++j) v += uv[j * nqd + q] * gu[(i * dim + j) * nqd + q];
        conv[i * nqd + q] = v;
      }
    // volume -((u.grad)u, grad q)
    for (int a = 0; a < dim; ++a) {
      const double sc = evp.deriv_scale(a) * jac * scale;
      for (int q = 0; q < nqd; ++q) fw[q] = -conv[a * nqd + q] * evu.qweights()[q] * sc;
      evp.deriv_moments_add(fw, a, m);
    }
    // faces: + (q, flux{(u.grad)u} . n) on interior, + (q, (u.grad)u . n) on Gamma_N
    double* cm = s.c.data();  // own convective normal trace
    double* cp = cm + nfq;
    double* t1 = s.e.data();
    double* t2 = t1 + nfq;
    double* um = s.a.data();
    double* up = um + nfq;
    for (int a = 0; a < dim; ++a) {
      const double fj = evu.face_jacobian(a);
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const double sgn = side == 0 ? -1.0 : 1.0;
        if (cf.interior) {
          const FaceLink& fl = mesh.interior_faces()[cf.index];
          const int nb = cf.side == 1 ? fl.neighbor : fl.owner;
          const int nb_side = 1 - side;
          const double* un = u.cell_data(nb);
          trace_conv_normal(evu, uc, a, side, npc_u, dim, nfq, t1, t2, cm);
          trace_conv_normal(evu, un, a, nb_side, npc_u, dim, nfq, t1, t2, cp);
          if (flux == PPEConvectiveFlux::central) {
            for (int q = 0; q < nfq; ++q)
              fw[q] = scale * 0.5 * (cm[q] + cp[q]) * sgn * evu.face_qweights()[q] * fj;
          } else {
            // upwind probe: take the trace from the side the flow comes from
            evu.face_values(uc + a * npc_u, a, side, um);
            evu.face_values(un + a * npc_u, a, nb_side, up);
            for (int q = 0; q < nfq; ++q) {
              const double an = 0.5 * (um[q] + up[q]) * sgn;
              const double pick = an >= 0.0 ? cm[q] : cp[q];
              fw[q] = scale * pick * sgn * evu.face_qweights()[q] * fj;
            }
          }
          evp.face_moments_add(fw, a, side, m);
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          if (bf.kind != BoundaryKind::neumann) continue;
          trace_conv_normal(evu, uc, a, side, npc_u, dim, nfq, t1, t2, cm);
          for (int q = 0; q < nfq; ++q)
            fw[q] = scale * cm[q] * sgn * evu.face_qweights()[q] * fj;
          evp.face_moments_add(fw, a, side, m);
        }
      }
    }
  });
}

void PressurePoissonOperator::add_rhs_leray(const DGField& u, double scale,
                                            std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  const FunctionSpace& ps = *im.ps;
  const FunctionSpace& vs = *im.vs;
  const Mesh& mesh = ps.mesh();
  const int dim = im.dim;
  const int npc = ps.nodes_per_cell();
  const int npc_u = vs.nodes_per_cell();
  parallel_for(mesh.n_cells(), im.cfg.threads, [&](std::size_t ci, int tid) {
    const int c = static_cast<int>(ci);
    Scratch& s = im.scratch[tid];
    CellEval& evp = *s.pres_r;
    CellEval& evu = *s.vel_r;
    const int nqd = evu.n_qpoints();
    const int nfq = evu.n_face_qpoints();
    const double jac = evu.volume_jacobian();
    const double* uc = u.cell_data(c);
    double* m = rhs.data() + static_cast<std::size_t>(c) * npc;
    double* uv = s.a.data();
    double* fw = s.d.data();
    // volume -(grad q, u)
    for (int a = 0; a < dim; ++a) {
      evu.values(uc + a * npc_u, uv);
      const double sc = evp.deriv_scale(a) * jac * scale;
      for (int q = 0; q < nqd; ++q) fw[q] = -uv[q] * evu.qweights()[q] * sc;
      evp.deriv_moments_add(fw, a, m);
    }
    // + (q, {u}.n) interior, + (q, u.n) on Gamma_N
    double* um = s.a.data();
    double* up = um + nfq;
    for (int a = 0; a < dim; ++a) {
      const double fj = evu.face_jacobian(a);
      for (int side = 0; side < 2; ++side) {
        const auto& cf = mesh.cell_faces(c)[2 * a + side];
        const double sgn = side == 0 ? -1.0 : 1.0;
        if (cf.interior) {
          const FaceLink& fl = mesh.interior_faces()[cf.index];
          const int nb = cf.side == 1 ? fl.neighbor : fl.owner;
          const int nb_side = 1 - side;
          evu.face_values(uc + a * npc_u, a, side, um);
          evu.face_values(u.cell_data(nb) + a * npc_u, a, nb_side, up);
          for (int q = 0; q < nfq; ++q)
            fw[q] = scale * 0.5 * (um[q] + up[q]) * sgn * evu.face_qweights()[q] * fj;
          evp.face_moments_add(fw, a, side, m);
        } else {
          const BoundaryFace& bf = mesh.boundary_faces()[cf.index];
          if (bf.kind != BoundaryKind::neumann) continue;
          evu.face_values(uc + a * npc_u, a, side, um);
          for (int q = 0; q < nfq; ++q)
            fw[q] = scale * um[q] * sgn * evu.face_qweights()[q] * fj;
          evp.face_moments_add(fw, a, side, m);
        }
      }
    }
  });
}

void PressurePoissonOperator::add_rhs_sipg(double t, const DGField* u_extrapolated,
                                           double gamma0_over_dt,
                                           std::vector<double>& rhs) const {
  const Impl& im = *impl_;
  const FunctionSpace& ps = *im.ps;
  const FunctionSpace& vs = *im.vs;
  const Mesh& mesh = ps.mesh();
  const int dim = im.dim;
  const int npc = ps.nodes_per_cell();
  const double nu = im.problem->viscosity;
  Scratch& s = im.scratch[0];
  CellEval& evp = *s.pres_r;
  CellEval& evu = *s.vel_r;
  const int nfq = evp.n_face_qpoints();
  std::vector<std::array<double, 3>> xq;
  std::vector<double> fw(nfq);

  // curl(curl u) traces are needed on Dirichlet faces only
  DGField omega;
  const bool need_curl =
      u_extrapolated != nullptr && mesh.has_boundary(BoundaryKind::dirichlet);
  if (need_curl) omega = vorticity_projection(*u_extrapolated, *im.omega_space);
  const int npc_w = need_curl ? im.omega_space->nodes_per_cell() : 0;

  std::vector<double> dw(static_cast<std::size_t>(9) * nfq);
  for (const BoundaryFace& bf : mesh.boundary_faces()) {
    const int a = bf.axis;
    const double sgn = bf.side == 0 ? -1.0 : 1.0;
    const double fj = evp.face_jacobian(a);
    detail::face_quad_coordinates(mesh, bf.cell, a, bf.side, evp.rule(), xq);
    double* m = rhs.data() + static_cast<std::size_t>(bf.cell) * npc;
    if (bf.kind == BoundaryKind::neumann) {
      // (q, 2 tau g_p) - (grad q, g_p n)
      for (int q = 0; q < nfq; ++q) {
        const double gp = im.problem->boundary_pressure(xq[q], t);
        fw[q] = 2.0 * im.tau[a] * gp * evp.face_qweights()[q] * fj;
      }
      evp.face_moments_add(fw.data(), a, bf.side, m);
      const double dsc = evp.deriv_scale(a);
      for (int q = 0; q < nfq; ++q) {
        const double gp = im.problem->boundary_pressure(xq[q], t);
        fw[q] = -gp * sgn * evp.face_qweights()[q] * fj * dsc;
      }
      evp.face_deriv_moments_add(fw.data(), a, bf.side, a, m);
    } else {
      // -(q, gamma0/dt g.n) - (q, nu curl(curl u).n)
      for (int q = 0; q < nfq; ++q) {
        const double gn = im.problem->dirichlet_velocity(xq[q], t)[a] * sgn;
        fw[q] = -gamma0_over_dt * gn * evp.face_qweights()[q] * fj;
      }
      evp.face_moments_add(fw.data(), a, bf.side, m);
      if (need_curl) {
        const double* wc = omega.cell_data(bf.cell);
        if (dim == 2) {
          // curl(omega) = (d2 w, -d1 w); normal component = component a
          const int want_axis = a == 0 ? 1 : 0;  // derivative axis entering comp a
          evu.face_ref_deriv(wc, a, bf.side, want_axis, dw.data());
          const double dsc = evu.deriv_scale(want_axis);
          const double comp_sign = a == 0 ? 1.0 : -1.0;  // (d2 w, -d1 w)
          for (int q = 0; q < nfq; ++q) {
            const double curl_comp = comp_sign * dw[q] * dsc;
            fw[q] = -nu * curl_comp * sgn * evp.face_qweights()[q] * fj;
          }
        } else {
          // curl(omega)_a with omega vector valued
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              evu.face_ref_deriv(wc + i * npc_w, a, bf.side, j, dw.data() + (i * 3 + j) * nfq);
          const int i1[3] = {2, 0, 1}, j1[3] = {1, 2, 0};
          const int i2[3] = {1, 2, 0}, j2[3] = {2, 0, 1};
          for (int q = 0; q < nfq; ++q) {
            const double c1 = dw[(i1[a] * 3 + j1[a]) * nfq + q] * evu.deriv_scale(j1[a]);
            const double c2 = dw[(i2[a] * 3 + j2[a]) * nfq + q] * evu.deriv_scale(j2[a]);
            const double curl_comp = c1 - c2;
            fw[q] = -nu * curl_comp * sgn * evp.face_qweights()[q] * fj;
          }
        }
        evp.face_moments_add(fw.data(), a, bf.side, m);
      }
    }
  }
}

}  // namespace splitdg
