#include "splitdg/linear_solvers.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "splitdg/cell_eval.hpp"
#include "splitdg/field_ops.hpp"

namespace splitdg {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::rel: return "rel";
    case StopReason::abs: return "abs";
    case StopReason::maxit: return "maxit";
    case StopReason::breakdown: return "breakdown";
    case StopReason::stagnation: return "stagnation";
    case StopReason::nan: return "nan";
  }
  return "?";
}

Preconditioner identity_preconditioner(std::size_t n) {
  Preconditioner p;
  p.apply = [n](const double* r, double* z) { std::copy(r, r + n, z); };
  return p;
}

Preconditioner jacobi_preconditioner(const std::vector<double>& diagonal, int* guarded_entries) {
  auto inv = std::make_shared<std::vector<double>>(diagonal.size());
  int guarded = 0;
  for (std::size_t i = 0; i < diagonal.size(); ++i) {
    if (diagonal[i] <= 0.0) {
      (*inv)[i] = 1.0;
      ++guarded;
    } else {
      (*inv)[i] = 1.0 / diagonal[i];
    }
  }
  if (guarded_entries) *guarded_entries = guarded;
  const std::size_t n = diagonal.size();
  Preconditioner p;
  p.apply = [inv, n](const double* r, double* z) {
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * (*inv)[i];
  };
  return p;
}

Preconditioner inverse_mass_preconditioner(const FunctionSpace& space) {
  const std::size_t n = space.n_dofs();
  Preconditioner p;
  p.apply = [&space, n](const double* r, double* z) {
    std::vector<double> in(r, r + n), out;
    apply_inverse_mass(space, in, out, 1);
    std::copy(out.begin(), out.end(), z);
  };
  return p;
}

MeanProjector::MeanProjector(const FunctionSpace& space)
    : n_(space.n_dofs()), measure_(space.mesh().domain_measure()) {
  if (space.components() != 1)
    throw std::invalid_argument("MeanProjector: scalar space required");
  // integral of each nodal basis function: moments of f == 1
  const int n_q = space.degree() + 1;
  space.warm_tables(n_q);
  CellEval ev(space, n_q);
  const int nqd = ev.n_qpoints();
  std::vector<double> fw(nqd);
  for (int q = 0; q < nqd; ++q) fw[q] = ev.qweights()[q] * ev.volume_jacobian();
  std::vector<double> cell_m(space.nodes_per_cell(), 0.0);
  ev.moments_add(fw.data(), cell_m.data());
  int_weights_.resize(n_);
  for (int c = 0; c < space.mesh().n_cells(); ++c)
    std::copy(cell_m.begin(), cell_m.end(),
              int_weights_.begin() + static_cast<std::size_t>(c) * space.nodes_per_cell());
}

void MeanProjector::project_rhs(std::vector<double>& b) const {
  // constants c satisfy A c = 0 and have all-ones coefficients; compatibility
  // requires b orthogonal (Euclidean) to that vector
  double s = 0.0;
  for (double v : b) s += v;
  const double shift = s / static_cast<double>(n_);
  for (double& v : b) v -= shift;
}

double MeanProjector::rhs_mean(const std::vector<double>& b) const {
  double s = 0.0;
  for (double v : b) s += v;
  return s;
}

double MeanProjector::solution_mean(const std::vector<double>& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += int_weights_[i] * x[i];
  return s / measure_;
}

void MeanProjector::project_solution(std::vector<double>& x) const {
  const double m = solution_mean(x);
  for (double& v : x) v -= m;
}

std::vector<double> project_out_constants(const std::vector<double>& x,
                                          const FunctionSpace& space) {
  MeanProjector proj(space);
  std::vector<double> out = x;
  proj.project_solution(out);
  return out;
}

SolveReport cg_solve(const LinearOperator& A, const std::vector<double>& b,
                     const Preconditioner& M, const SolverSettings& settings,
                     std::vector<double>& x, const MeanProjector* nullspace) {
  const std::size_t n = A.n;
  SolveReport rep;
  std::vector<double> rhs = b;
  if (nullspace) nullspace->project_rhs(rhs);
  if (x.size() != n) x.assign(n, 0.0);
  if (nullspace) nullspace->project_solution(x);

  std::vector<double> r(n), z(n), p(n), Ap(n);
  A.apply(x.data(), r.data());
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  double rnorm = norm2(r);
  // relative criterion against the initial residual: with warm-started solves
  // the target tightens as the guess improves; abs_tol guards the floor
  const double r0 = rnorm;
  const double target = std::max(settings.rel_tol * r0, settings.abs_tol);
  if (rnorm <= target) {
    rep.converged = true;
    rep.iterations = 0;
    rep.final_residual = rnorm;
    rep.stop = rnorm <= settings.abs_tol ? StopReason::abs : StopReason::rel;
    return rep;
  }
  M.apply(r.data(), z.data());
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= settings.max_iter; ++it) {
    A.apply(p.data(), Ap.data());
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      rep.converged = false;
      rep.iterations = it;
      rep.final_residual = rnorm;
      rep.stop = std::isnan(pAp) ? StopReason::nan : StopReason::breakdown;
      rep.detail = "p^T A p <= 0 (operator not positive definite on the iterate space)";
      return rep;
    }
    const double alpha = rz / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    if (nullspace) nullspace->project_solution(x);
    rnorm = norm2(r);
    if (std::isnan(rnorm)) {
      rep.converged = false;
      rep.iterations = it;
      rep.final_residual = rnorm;
      rep.stop = StopReason::nan;
      rep.detail = "NaN residual";
      return rep;
    }
    if (rnorm <= target) {
      // recompute the true residual for the report
      A.apply(x.data(), Ap.data());
      for (std::size_t i = 0; i < n; ++i) Ap[i] = rhs[i] - Ap[i];
      rep.converged = true;
      rep.iterations = it;
      rep.final_residual = norm2(Ap);
      rep.stop = rnorm <= settings.abs_tol ? StopReason::abs : StopReason::rel;
      return rep;
    }
    M.apply(r.data(), z.data());
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  rep.converged = false;
  rep.iterations = settings.max_iter;
  rep.final_residual = rnorm;
  rep.stop = StopReason::maxit;
  return rep;
}

SolveReport gmres_solve(const LinearOperator& A, const std::vector<double>& b,
                        const Preconditioner& M, const SolverSettings& settings,
                        std::vector<double>& x) {
  // right-preconditioned restarted GMRES; the tracked residual is the true one
  const std::size_t n = A.n;
  SolveReport rep;
  if (x.size() != n) x.assign(n, 0.0);
  const int m = std::max(1, settings.restart);
  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<double> H(static_cast<std::size_t>(m + 1) * m, 0.0);
  std::vector<double> cs(m), sn(m), g(m + 1), w(n), z(n);

  A.apply(x.data(), w.data());
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
  double beta = norm2(r);
  const double target = std::max(settings.rel_tol * beta, settings.abs_tol);
  int total_it = 0;
  if (beta <= target) {
    rep.converged = true;
    rep.final_residual = beta;
    rep.stop = beta <= settings.abs_tol ? StopReason::abs : StopReason::rel;
    return rep;
  }

  while (total_it < settings.max_iter) {
    const double cycle_start = beta;
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && total_it < settings.max_iter; ++k, ++total_it) {
      M.apply(V[k].data(), z.data());
      A.apply(z.data(), w.data());
      // modified Gram-Schmidt
      for (int j = 0; j <= k; ++j) {
        const double h = dot(w, V[j]);
        H[j * m + k] = h;
        axpy(-h, V[j], w);
      }
      const double h1 = norm2(w);
      H[(k + 1) * m + k] = h1;
      if (std::isnan(h1)) {
        rep.stop = StopReason::nan;
        rep.iterations = total_it;
        rep.final_residual = beta;
        rep.detail = "NaN in Arnoldi";
        return rep;
      }
      if (h1 > 0.0)
        for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / h1;
      // apply previous Givens rotations to the new column
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H[j * m + k] + sn[j] * H[(j + 1) * m + k];
        H[(j + 1) * m + k] = -sn[j] * H[j * m + k] + cs[j] * H[(j + 1) * m + k];
        H[j * m + k] = t;
      }
      const double denom = std::hypot(H[k * m + k], H[(k + 1) * m + k]);
      if (denom == 0.0) break;  // dependent direction: close the cycle without it
      cs[k] = H[k * m + k] / denom;
      sn[k] = H[(k + 1) * m + k] / denom;
      H[k * m + k] = denom;
      H[(k + 1) * m + k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      beta = std::abs(g[k + 1]);
      if (beta <= target) {
        ++k;
        ++total_it;
        break;
      }
    }
    // solve the triangular system and update x
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i * m + j] * y[j];
      y[i] = s / H[i * m + i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) axpy(y[j], V[j], w);
    M.apply(w.data(), z.data());
    axpy(1.0, z, x);

    A.apply(x.data(), w.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    beta = norm2(r);
    if (std::isnan(beta)) {
      rep.stop = StopReason::nan;
      rep.iterations = total_it;
      rep.final_residual = beta;
      return rep;
    }
    if (beta <= target) {
      rep.converged = true;
      rep.iterations = total_it;
      rep.final_residual = beta;
      rep.stop = beta <= settings.abs_tol ? StopReason::abs : StopReason::rel;
      return rep;
    }
    if (beta >= cycle_start * (1.0 - 1e-12)) {
      rep.converged = false;
      rep.iterations = total_it;
      rep.final_residual = beta;
      rep.stop = StopReason::stagnation;
      rep.detail = "no residual reduction across a restart cycle";
      return rep;
    }
  }
  rep.converged = false;
  rep.iterations = total_it;
  rep.final_residual = beta;
  rep.stop = StopReason::maxit;
  return rep;
}

}  // namespace splitdg
