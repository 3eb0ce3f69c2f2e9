#include "splitdg/field_ops.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "splitdg/cell_eval.hpp"
#include "splitdg/parallel.hpp"

namespace splitdg {

namespace {

// physical coordinates of the quadrature grid of one cell
void quad_coordinates(const Mesh& mesh, int cell, const QuadratureRule& rule, int dim,
                      std::vector<std::array<double, 3>>& out) {
  const Cell c = mesh.cell(cell);
  const int nq = rule.n;
  out.resize(tensor::ipow(nq, dim));
  int idx = 0;
  const int nz = dim == 3 ? nq : 1;
  for (int q2 = 0; q2 < nz; ++q2)
    for (int q1 = 0; q1 < nq; ++q1)
      for (int q0 = 0; q0 < nq; ++q0, ++idx) {
        std::array<int, 3> q{q0, q1, q2};
        std::array<double, 3> x{0, 0, 0};
        for (int a = 0; a < dim; ++a)
          x[a] = c.lower[a] + 0.5 * (rule.points[q[a]] + 1.0) * (c.upper[a] - c.lower[a]);
        out[idx] = x;
      }
}

DGField project_impl(const FunctionSpace& space, const VectorFn* vf, const ScalarFn* sf,
                     double t, int n_q) {
  const Mesh& mesh = space.mesh();
  const int dim = mesh.dim();
  if (n_q == 0) n_q = space.degree() + 2;
  space.warm_tables(n_q);
  DGField out(space);
  std::vector<double> moments(space.n_dofs(), 0.0);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  std::vector<std::array<double, 3>> xq;
  std::vector<double> fw(nqd);
  const double jac = ev.volume_jacobian();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    quad_coordinates(mesh, c, ev.rule(), dim, xq);
    double* m = moments.data() + static_cast<std::size_t>(c) * space.dofs_per_cell();
    for (int comp = 0; comp < space.components(); ++comp) {
      for (int q = 0; q < nqd; ++q) {
        const double v = vf ? (*vf)(xq[q], t)[comp] : (*sf)(xq[q], t);
        fw[q] = v * ev.qweights()[q] * jac;
      }
      ev.moments_add(fw.data(), m + comp * space.nodes_per_cell());
    }
  }
  apply_inverse_mass(space, moments, out.data, 1);
  return out;
}

DGField interpolate_impl(const FunctionSpace& space, const VectorFn* vf, const ScalarFn* sf,
                         double t) {
  DGField out(space);
  std::vector<std::array<double, 3>> xs;
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    space.node_coordinates(c, xs);
    double* d = out.cell_data(c);
    for (int comp = 0; comp < space.components(); ++comp)
      for (int i = 0; i < space.nodes_per_cell(); ++i)
        d[comp * space.nodes_per_cell() + i] = vf ? (*vf)(xs[i], t)[comp] : (*sf)(xs[i], t);
  }
  return out;
}

double error_impl(const DGField& field, const VectorFn* vf, const ScalarFn* sf, double t,
                  double* exact_norm) {
  const FunctionSpace& space = *field.space;
  const Mesh& mesh = space.mesh();
  const int dim = mesh.dim();
  const int n_q = space.degree() + 3;
  space.warm_tables(n_q);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  const double jac = ev.volume_jacobian();
  std::vector<std::array<double, 3>> xq;
  std::vector<double> vals(nqd);
  double err2 = 0.0, ref2 = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    quad_coordinates(mesh, c, ev.rule(), dim, xq);
    for (int comp = 0; comp < space.components(); ++comp) {
      ev.values(field.cell_data(c) + comp * space.nodes_per_cell(), vals.data());
      for (int q = 0; q < nqd; ++q) {
        const double e = vf ? (*vf)(xq[q], t)[comp] : (*sf)(xq[q], t);
        const double d = e - vals[q];
        err2 += d * d * ev.qweights()[q] * jac;
        ref2 += e * e * ev.qweights()[q] * jac;
      }
    }
  }
  if (exact_norm) *exact_norm = std::sqrt(ref2);
  return std::sqrt(err2);
}

}  // namespace

DGField l2_project(const FunctionSpace& space, const VectorFn& f, double t, int n_q) {
  if (space.components() != space.mesh().dim())
    throw std::invalid_argument("l2_project: vector callable on scalar space");
  return project_impl(space, &f, nullptr, t, n_q);
}

DGField l2_project(const FunctionSpace& space, const ScalarFn& f, double t, int n_q) {
  if (space.components() != 1)
    throw std::invalid_argument("l2_project: scalar callable on vector space");
  return project_impl(space, nullptr, &f, t, n_q);
}

DGField interpolate_nodal(const FunctionSpace& space, const VectorFn& f, double t) {
  return interpolate_impl(space, &f, nullptr, t);
}

DGField interpolate_nodal(const FunctionSpace& space, const ScalarFn& f, double t) {
  return interpolate_impl(space, nullptr, &f, t);
}

void evaluate_field(const DGField& field, int cell,
                    std::span<const std::array<double, 3>> ref_points,
                    std::vector<std::vector<double>>& values,
                    std::vector<std::vector<std::array<double, 3>>>* gradients) {
  const FunctionSpace& space = *field.space;
  const Mesh& mesh = space.mesh();
  const int dim = mesh.dim();
  const int n = space.n1d();
  const Basis1D& basis = space.basis();
  values.assign(ref_points.size(), std::vector<double>(space.components(), 0.0));
  if (gradients)
    gradients->assign(ref_points.size(),
                      std::vector<std::array<double, 3>>(space.components(), {0, 0, 0}));
  std::vector<double> phi(static_cast<std::size_t>(dim) * n), dphi(phi.size());
  for (std::size_t p = 0; p < ref_points.size(); ++p) {
    for (int a = 0; a < dim; ++a)
      for (int i = 0; i < n; ++i) {
        phi[a * n + i] = basis.value(i, ref_points[p][a]);
        dphi[a * n + i] = basis.derivative(i, ref_points[p][a]);
      }
    const double* cd = field.cell_data(cell);
    const int nz = dim == 3 ? n : 1;
    for (int comp = 0; comp < space.components(); ++comp) {
      const double* cc = cd + comp * space.nodes_per_cell();
      double v = 0.0;
      std::array<double, 3> g{0, 0, 0};
      int idx = 0;
      for (int k = 0; k < nz; ++k)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i, ++idx) {
            const double pz = dim == 3 ? phi[2 * n + k] : 1.0;
            const double base = cc[idx];
            v += base * phi[0 * n + i] * phi[1 * n + j] * pz;
            g[0] += base * dphi[0 * n + i] * phi[1 * n + j] * pz;
            g[1] += base * phi[0 * n + i] * dphi[1 * n + j] * pz;
            if (dim == 3) g[2] += base * phi[0 * n + i] * phi[1 * n + j] * dphi[2 * n + k];
          }
      values[p][comp] = v;
      if (gradients) {
        for (int a = 0; a < dim; ++a) g[a] *= 2.0 / mesh.dx()[a];
        (*gradients)[p][comp] = g;
      }
    }
  }
}

double l2_norm(const DGField& field, int n_q) {
  const FunctionSpace& space = *field.space;
  if (n_q == 0) n_q = space.degree() + 1;
  space.warm_tables(n_q);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  std::vector<double> vals(nqd);
  double s = 0.0;
  for (int c = 0; c < space.mesh().n_cells(); ++c)
    for (int comp = 0; comp < space.components(); ++comp) {
      ev.values(field.cell_data(c) + comp * space.nodes_per_cell(), vals.data());
      for (int q = 0; q < nqd; ++q)
        s += vals[q] * vals[q] * ev.qweights()[q] * ev.volume_jacobian();
    }
  return std::sqrt(s);
}

double l2_error(const DGField& field, const VectorFn& exact, double t) {
  return error_impl(field, &exact, nullptr, t, nullptr);
}

double l2_error(const DGField& field, const ScalarFn& exact, double t) {
  return error_impl(field, nullptr, &exact, t, nullptr);
}

double relative_l2_error(const DGField& field, const VectorFn& exact, double t) {
  double ref = 0.0;
  const double err = error_impl(field, &exact, nullptr, t, &ref);
  if (ref < 1e-140) throw std::domain_error("relative_l2_error: exact solution has zero norm");
  return err / ref;
}

double relative_l2_error(const DGField& field, const ScalarFn& exact, double t) {
  double ref = 0.0;
  const double err = error_impl(field, nullptr, &exact, t, &ref);
  if (ref < 1e-140) throw std::domain_error("relative_l2_error: exact solution has zero norm");
  return err / ref;
}

double divergence_l2_norm(const DGField& u) {
  const FunctionSpace& space = *u.space;
  const int dim = space.mesh().dim();
  if (space.components() != dim)
    throw std::invalid_argument("divergence_l2_norm: vector field required");
  const int n_q = space.degree() + 1;
  space.warm_tables(n_q);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  std::vector<double> div(nqd), d(nqd);
  double s = 0.0;
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    std::fill(div.begin(), div.end(), 0.0);
    for (int a = 0; a < dim; ++a) {
      ev.phys_deriv(u.cell_data(c) + a * space.nodes_per_cell(), a, d.data());
      for (int q = 0; q < nqd; ++q) div[q] += d[q];
    }
    for (int q = 0; q < nqd; ++q)
      s += div[q] * div[q] * ev.qweights()[q] * ev.volume_jacobian();
  }
  return std::sqrt(s);
}

double integral(const DGField& field) {
  const FunctionSpace& space = *field.space;
  if (space.components() != 1) throw std::invalid_argument("integral: scalar field required");
  const int n_q = space.degree() + 1;
  space.warm_tables(n_q);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  std::vector<double> vals(nqd);
  double s = 0.0;
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    ev.values(field.cell_data(c), vals.data());
    for (int q = 0; q < nqd; ++q) s += vals[q] * ev.qweights()[q] * ev.volume_jacobian();
  }
  return s;
}

double mean_value(const DGField& field) {
  return integral(field) / field.space->mesh().domain_measure();
}

std::array<double, 3> cell_average(const DGField& u, int cell) {
  const FunctionSpace& space = *u.space;
  const int n_q = space.degree() + 1;
  space.warm_tables(n_q);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  std::vector<double> vals(nqd);
  std::array<double, 3> avg{0, 0, 0};
  const double vol = space.mesh().cell(cell).volume;
  for (int comp = 0; comp < space.components(); ++comp) {
    ev.values(u.cell_data(cell) + comp * space.nodes_per_cell(), vals.data());
    double s = 0.0;
    for (int q = 0; q < nqd; ++q) s += vals[q] * ev.qweights()[q] * ev.volume_jacobian();
    avg[comp] = s / vol;
  }
  return avg;
}

double max_nodal_norm(const DGField& field) {
  const FunctionSpace& space = *field.space;
  const int npc = space.nodes_per_cell();
  double m = 0.0;
  for (int c = 0; c < space.mesh().n_cells(); ++c) {
    const double* d = field.cell_data(c);
    for (int i = 0; i < npc; ++i) {
      double s = 0.0;
      for (int comp = 0; comp < space.components(); ++comp) {
        const double v = d[comp * npc + i];
        s += v * v;
      }
      m = std::max(m, s);
    }
  }
  return std::sqrt(m);
}

void apply_inverse_mass(const FunctionSpace& space, const std::vector<double>& moments,
                        std::vector<double>& coefficients, int threads) {
  const Mesh& mesh = space.mesh();
  const int dim = mesh.dim();
  const int n = space.n1d();
  coefficients.resize(moments.size());
  double jac = 1.0;
  for (int a = 0; a < dim; ++a) jac *= 0.5 * mesh.dx()[a];
  const double inv_jac = 1.0 / jac;
  const double* minv = space.inv_mass_1d().data();
  const int npc = space.nodes_per_cell();
  const int dpc = space.dofs_per_cell();
  parallel_for(mesh.n_cells(), threads, [&](std::size_t c, int) {
    std::vector<double> w1(npc), w2(npc);
    const double* in = moments.data() + c * dpc;
    double* out = coefficients.data() + c * dpc;
    for (int comp = 0; comp < space.components(); ++comp) {
      const double* m = in + comp * npc;
      double* o = out + comp * npc;
      if (dim == 2) {
        tensor::contract(m, w1.data(), 1, n, n, minv, n);
        tensor::contract(w1.data(), w2.data(), n, n, 1, minv, n);
      } else {
        tensor::contract(m, w1.data(), 1, n, n * n, minv, n);
        tensor::contract(w1.data(), w2.data(), n, n, n, minv, n);
        tensor::contract(w2.data(), w1.data(), n * n, n, 1, minv, n);
        std::swap(w1, w2);
      }
      for (int i = 0; i < npc; ++i) o[i] = w2[i] * inv_jac;
    }
  });
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

}  // namespace splitdg
