#include <doctest.h>

#include <cmath>
#include <random>

#include "splitdg/benchmarks.hpp"
#include "splitdg/field_ops.hpp"
#include "splitdg/operators.hpp"
#include "oracle.hpp"

using namespace splitdg;

namespace {

std::array<SideSpec, 6> sides(SideSpec s) { return {s, s, s, s, s, s}; }

// single [0,1]^2 cell
Mesh unit_cell(SideSpec s) { return Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {1, 1, 1}, sides(s)); }

// quadrature points/weights mapped to [0,1]
struct Rule01 {
  std::vector<double> x, w;
  explicit Rule01(int n) {
    auto r = gauss_legendre(n);
    for (int q = 0; q < n; ++q) {
      x.push_back(0.5 * (r.points[q] + 1.0));
      w.push_back(0.5 * r.weights[q]);
    }
  }
};

// pressure-space basis on the unit cell: phi_i(x, y), reference = 2x-1
double phi(const std::vector<double>& nodes, int i, double x, double y) {
  return oracle::basis2d(nodes, i, 2 * x - 1, 2 * y - 1);
}
std::array<double, 2> dphi(const std::vector<double>& nodes, int i, double x, double y) {
  auto g = oracle::basis2d_grad(nodes, i, 2 * x - 1, 2 * y - 1);
  return {2 * g[0], 2 * g[1]};  // physical gradient on the unit cell
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return s > 0 ? d / s : d;
}

}  // namespace

TEST_SUITE_BEGIN("operators_pressure");

TEST_CASE("sipg tau formula") {
  CHECK(sipg_tau(1, 1.0, 1.0) == doctest::Approx(4.0));
  CHECK(sipg_tau(2, 0.5, 0.25) == doctest::Approx(18.0));
  CHECK(sipg_tau(0, 0.7, 0.2) == doctest::Approx(0.7 / 0.2));  // continuous k -> 0 limit
}

TEST_CASE("constant pressure lies in the kernel without open boundaries") {
  ProblemSpec prob = make_tgv2d(0.025);
  SUBCASE("velocity all-Dirichlet") {
    Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {3, 3, 1}, sides(SideSpec::Dirichlet()));
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    CHECK(ppe.singular());
    std::vector<double> p(ppe.n(), 2.7), y(ppe.n());
    ppe.apply(p.data(), y.data());
    for (double v : y) CHECK(std::abs(v) < 1e-13);
  }
  SUBCASE("fully periodic") {
    Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {3, 3, 1}, sides(SideSpec::Periodic()));
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    std::vector<double> p(ppe.n(), -1.4), y(ppe.n());
    ppe.apply(p.data(), y.data());
    for (double v : y) CHECK(std::abs(v) < 1e-13);
  }
}

TEST_CASE("constant pressure against the one-sided Neumann terms") {
  // p = c on a single all-Neumann cell: output = c (2 tau boundary mass - boundary flux)
  Mesh mesh = unit_cell(SideSpec::Neumann());
  ProblemSpec prob = make_tgv2d(0.025);
  const int kp = 2;
  FunctionSpace vs(mesh, kp + 1, 2), ps(mesh, kp, 1);
  PressurePoissonOperator ppe(ps, vs, prob, {});
  const double c = 1.7;
  std::vector<double> p(ppe.n(), c), y(ppe.n());
  ppe.apply(p.data(), y.data());

  const double tau = sipg_tau(kp, 1.0, 1.0);
  const auto& nodes = ps.nodes_1d();
  const int n = kp + 1;
  Rule01 r(kp + 2);
  std::vector<double> ref(ps.n_dofs(), 0.0);
  for (int i = 0; i < n * n; ++i) {
    double v = 0.0;
    for (std::size_t q = 0; q < r.x.size(); ++q) {
      // four faces: (x=0, n=-e1), (x=1, +e1), (y=0, -e2), (y=1, +e2)
      struct Face {
        double nx, ny;
        double px, py;
        bool xface;
      };
      const Face faces[4] = {{-1, 0, 0.0, r.x[q], true},
                             {1, 0, 1.0, r.x[q], true},
                             {0, -1, r.x[q], 0.0, false},
                             {0, 1, r.x[q], 1.0, false}};
      for (const auto& f : faces) {
        const double ph = phi(nodes, i, f.px, f.py);
        const auto dp = dphi(nodes, i, f.px, f.py);
        const double dpn = dp[0] * f.nx + dp[1] * f.ny;
        // l_p(c, phi_i) = -(grad q, c n) - (q, 0) + (q, 2 tau c)
        v += r.w[q] * (-dpn * c + 2.0 * tau * c * ph);
      }
    }
    ref[i] = v;
  }
  CHECK(rel_diff(y, ref) < 1e-11);
}

TEST_CASE("ppe operator symmetry probes") {
  ProblemSpec prob = make_tgv2d(0.025);
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {4, 4, 1},
                              {SideSpec::Dirichlet(), SideSpec::Neumann(), SideSpec::Dirichlet(),
                               SideSpec::Dirichlet(), SideSpec::Dirichlet(),
                               SideSpec::Dirichlet()});
  FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
  PressurePoissonOperator ppe(ps, vs, prob, {});
  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  for (int probe = 0; probe < 20; ++probe) {
    std::vector<double> x(ppe.n()), y(ppe.n()), ax(ppe.n()), ay(ppe.n());
    for (auto& v : x) v = dist(rng);
    for (auto& v : y) v = dist(rng);
    ppe.apply(x.data(), ax.data());
    ppe.apply(y.data(), ay.data());
    double xay = 0, yax = 0, scale = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xay += x[i] * ay[i];
      yax += y[i] * ax[i];
      scale += std::abs(x[i]) * std::abs(ay[i]);
    }
    CHECK(std::abs(xay - yax) <= 1e-11 * std::max(1.0, scale));
  }
}

TEST_CASE("ppe diagonal matches unit-vector probes") {
  ProblemSpec prob = make_tgv2d(0.025);
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {2, 2, 1},
                              {SideSpec::Dirichlet(), SideSpec::Neumann(), SideSpec::Periodic(),
                               SideSpec::Periodic(), SideSpec::Dirichlet(),
                               SideSpec::Dirichlet()});
  FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
  PressurePoissonOperator ppe(ps, vs, prob, {});
  const auto diag = ppe.diagonal();
  std::vector<double> e(ppe.n(), 0.0), y(ppe.n());
  for (std::size_t j = 0; j < ppe.n(); ++j) {
    e[j] = 1.0;
    ppe.apply(e.data(), y.data());
    CHECK(y[j] == doctest::Approx(diag[j]).epsilon(1e-11));
    e[j] = 0.0;
  }
}

TEST_CASE("ppe cell blocks match operator probing") {
  ProblemSpec prob = make_tgv2d(0.025);
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {2, 2, 1},
                              {SideSpec::Dirichlet(), SideSpec::Neumann(), SideSpec::Periodic(),
                               SideSpec::Periodic(), SideSpec::Dirichlet(),
                               SideSpec::Dirichlet()});
  FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
  PressurePoissonOperator ppe(ps, vs, prob, {});
  const auto blocks = ppe.cell_blocks();
  const int npc = ps.nodes_per_cell();
  std::vector<double> e(ppe.n(), 0.0), y(ppe.n());
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int j = 0; j < npc; ++j) {
      e[c * npc + j] = 1.0;
      ppe.apply(e.data(), y.data());
      e[c * npc + j] = 0.0;
      for (int i = 0; i < npc; ++i)
        CHECK(blocks[static_cast<std::size_t>(c) * npc * npc + i * npc + j] ==
              doctest::Approx(y[c * npc + i]).epsilon(1e-11));
    }
  // and the block preconditioner beats point Jacobi on a Poisson solve
  std::mt19937 rng(77);
  std::normal_distribution<double> dist;
  std::vector<double> b(ppe.n());
  for (auto& v : b) v = dist(rng);
  MeanProjector proj(ps);
  SolverSettings st;
  st.rel_tol = 1e-8;
  st.max_iter = 4000;
  std::vector<double> x1, x2;
  auto jac = cg_solve(ppe.linear_operator(), b, jacobi_preconditioner(ppe.diagonal()), st, x1,
                      ppe.singular() ? &proj : nullptr);
  auto blk = cg_solve(ppe.linear_operator(), b, ppe.block_jacobi_preconditioner(), st, x2,
                      ppe.singular() ? &proj : nullptr);
  CHECK(jac.converged);
  CHECK(blk.converged);
  CHECK(blk.iterations < jac.iterations);
}

TEST_CASE("ppe positive semi-definite") {
  ProblemSpec prob = make_tgv2d(0.025);
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {3, 3, 1}, sides(SideSpec::Dirichlet()));
  FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
  PressurePoissonOperator ppe(ps, vs, prob, {});
  std::mt19937 rng(9);
  std::normal_distribution<double> dist;
  std::vector<double> x(ppe.n()), y(ppe.n());
  for (int probe = 0; probe < 50; ++probe) {
    for (auto& v : x) v = dist(rng);
    ppe.apply(x.data(), y.data());
    double quad = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) quad += x[i] * y[i];
    CHECK(quad > -1e-10);
  }
}

TEST_CASE("r_f forcing right-hand side") {
  SUBCASE("zero forcing") {
    ProblemSpec prob = make_tgv2d(0.025);  // f = 0
    Mesh mesh = unit_cell(SideSpec::Neumann());
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_forcing(0.0, rhs);
    for (double v : rhs) CHECK(v == 0.0);
  }
  SUBCASE("constant forcing telescopes on a periodic mesh") {
    ProblemSpec prob = make_tgv2d(0.025);
    prob.forcing = [](const std::array<double, 3>&, double) {
      return std::array<double, 3>{1.3, -0.4, 0};
    };
    Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {3, 3, 1}, sides(SideSpec::Periodic()));
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_forcing(0.0, rhs);
    for (double v : rhs) CHECK(std::abs(v) < 1e-12);
  }
  SUBCASE("single all-Neumann cell against hand quadrature") {
    ProblemSpec prob = make_tgv2d(0.025);
    prob.forcing = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[0], 0, 0};
    };
    Mesh mesh = unit_cell(SideSpec::Neumann());
    const int kp = 2;
    FunctionSpace vs(mesh, kp + 1, 2), ps(mesh, kp, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_forcing(0.0, rhs);
    const auto& nodes = ps.nodes_1d();
    const int n = kp + 1;
    Rule01 r(kp + 3);
    std::vector<double> ref(ps.n_dofs(), 0.0);
    for (int i = 0; i < n * n; ++i) {
      double v = 0.0;
      for (std::size_t qx = 0; qx < r.x.size(); ++qx)
        for (std::size_t qy = 0; qy < r.x.size(); ++qy)
          v += r.w[qx] * r.w[qy] * r.x[qx] * dphi(nodes, i, r.x[qx], r.x[qy])[0];
      // boundary: -(f.n, q); only x = 1 contributes (f = (x1, 0))
      for (std::size_t q = 0; q < r.x.size(); ++q)
        v -= r.w[q] * 1.0 * phi(nodes, i, 1.0, r.x[q]);
      ref[i] = v;
    }
    CHECK(rel_diff(rhs, ref) < 1e-11);
  }
}

TEST_CASE("r_conv convective right-hand side") {
  ProblemSpec prob = make_tgv2d(0.025);
  SUBCASE("constant velocity gives zero") {
    Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {2, 2, 1}, sides(SideSpec::Periodic()));
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    VectorFn f = [](const std::array<double, 3>&, double) {
      return std::array<double, 3>{0.9, -0.1, 0};
    };
    DGField u = interpolate_nodal(vs, f, 0.0);
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_convective(u, 1.0, rhs);
    for (double v : rhs) CHECK(std::abs(v) < 1e-12);
  }
  SUBCASE("(x2, 0) has zero convective derivative") {
    Mesh mesh = unit_cell(SideSpec::Neumann());
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[1], 0, 0};
    };
    DGField u = interpolate_nodal(vs, f, 0.0);
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_convective(u, 1.0, rhs);
    for (double v : rhs) CHECK(std::abs(v) < 1e-13);
  }
  SUBCASE("(x1, -x2) against the dense oracle") {
    Mesh mesh = unit_cell(SideSpec::Neumann());
    const int kp = 2;
    FunctionSpace vs(mesh, kp + 1, 2), ps(mesh, kp, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[0], -x[1], 0};
    };
    DGField u = interpolate_nodal(vs, f, 0.0);
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_convective(u, 1.0, rhs);
    // (u.grad)u = (x1, x2); r = -(conv, grad q) + <q, conv.n> on all faces
    const auto& nodes = ps.nodes_1d();
    const int n = kp + 1;
    Rule01 r(kp + 3);
    std::vector<double> ref(ps.n_dofs(), 0.0);
    for (int i = 0; i < n * n; ++i) {
      double v = 0.0;
      for (std::size_t qx = 0; qx < r.x.size(); ++qx)
        for (std::size_t qy = 0; qy < r.x.size(); ++qy) {
          const auto g = dphi(nodes, i, r.x[qx], r.x[qy]);
          v -= r.w[qx] * r.w[qy] * (r.x[qx] * g[0] + r.x[qy] * g[1]);
        }
      for (std::size_t q = 0; q < r.x.size(); ++q) {
        v += r.w[q] * phi(nodes, i, 1.0, r.x[q]);   // x=1: conv.n = x1 = 1
        v += r.w[q] * phi(nodes, i, r.x[q], 1.0);   // y=1: conv.n = x2 = 1
        // x=0: conv.n = -x1 = 0; y=0: conv.n = -x2 = 0
      }
      ref[i] = v;
    }
    CHECK(rel_diff(rhs, ref) < 1e-11);
  }
}

TEST_CASE("r_Leray right-hand side") {
  ProblemSpec prob = make_tgv2d(0.025);
  SUBCASE("zero and constant fields") {
    Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {3, 3, 1}, sides(SideSpec::Periodic()));
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    DGField zero(vs);
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_leray(zero, 1.0, rhs);
    for (double v : rhs) CHECK(v == 0.0);
    VectorFn f = [](const std::array<double, 3>&, double) {
      return std::array<double, 3>{0.4, 1.1, 0};
    };
    DGField u = interpolate_nodal(vs, f, 0.0);
    ppe.add_rhs_leray(u, 1.0, rhs);
    for (double v : rhs) CHECK(std::abs(v) < 1e-12);
  }
  SUBCASE("(x1, 0) against the dense oracle") {
    Mesh mesh = unit_cell(SideSpec::Neumann());
    const int kp = 2;
    FunctionSpace vs(mesh, kp + 1, 2), ps(mesh, kp, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[0], 0, 0};
    };
    DGField u = interpolate_nodal(vs, f, 0.0);
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_leray(u, 1.0, rhs);
    const auto& nodes = ps.nodes_1d();
    const int n = kp + 1;
    Rule01 r(kp + 3);
    std::vector<double> ref(ps.n_dofs(), 0.0);
    for (int i = 0; i < n * n; ++i) {
      double v = 0.0;
      for (std::size_t qx = 0; qx < r.x.size(); ++qx)
        for (std::size_t qy = 0; qy < r.x.size(); ++qy)
          v -= r.w[qx] * r.w[qy] * r.x[qx] * dphi(nodes, i, r.x[qx], r.x[qy])[0];
      for (std::size_t q = 0; q < r.x.size(); ++q)
        v += r.w[q] * phi(nodes, i, 1.0, r.x[q]);  // u.n = x1 = 1 at x=1 only
      ref[i] = v;
    }
    CHECK(rel_diff(rhs, ref) < 1e-11);
  }
}

TEST_CASE("r_SIPG right-hand side") {
  SUBCASE("all data zero") {
    ProblemSpec prob;
    prob.dim = 2;
    prob.viscosity = 0.3;
    prob.dirichlet_velocity = [](const std::array<double, 3>&, double) {
      return std::array<double, 3>{0, 0, 0};
    };
    prob.boundary_pressure = [](const std::array<double, 3>&, double) { return 0.0; };
    Mesh mesh = unit_cell(SideSpec::Dirichlet());
    FunctionSpace vs(mesh, 3, 2), ps(mesh, 2, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    DGField zero(vs);
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_sipg(0.0, &zero, 10.0, rhs);
    for (double v : rhs) CHECK(std::abs(v) < 1e-14);
  }
  SUBCASE("g_p = 1 on a single all-Neumann cell") {
    ProblemSpec prob;
    prob.dim = 2;
    prob.viscosity = 0.3;
    prob.boundary_pressure = [](const std::array<double, 3>&, double) { return 1.0; };
    Mesh mesh = unit_cell(SideSpec::Neumann());
    const int kp = 2;
    FunctionSpace vs(mesh, kp + 1, 2), ps(mesh, kp, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_sipg(0.0, nullptr, 10.0, rhs);
    // oracle: <q, 2 tau> - <grad q . n, 1> over the four faces
    const double tau = sipg_tau(kp, 1.0, 1.0);
    const auto& nodes = ps.nodes_1d();
    const int n = kp + 1;
    Rule01 r(kp + 3);
    std::vector<double> ref(ps.n_dofs(), 0.0);
    for (int i = 0; i < n * n; ++i) {
      double v = 0.0;
      for (std::size_t q = 0; q < r.x.size(); ++q) {
        v += r.w[q] * (2 * tau * phi(nodes, i, 0.0, r.x[q]) + dphi(nodes, i, 0.0, r.x[q])[0]);
        v += r.w[q] * (2 * tau * phi(nodes, i, 1.0, r.x[q]) - dphi(nodes, i, 1.0, r.x[q])[0]);
        v += r.w[q] * (2 * tau * phi(nodes, i, r.x[q], 0.0) + dphi(nodes, i, r.x[q], 0.0)[1]);
        v += r.w[q] * (2 * tau * phi(nodes, i, r.x[q], 1.0) - dphi(nodes, i, r.x[q], 1.0)[1]);
      }
      ref[i] = v;
    }
    CHECK(rel_diff(rhs, ref) < 1e-11);
  }
  SUBCASE("curl-curl boundary term for u = (x2^2, 0)") {
    const double nu = 0.3;
    ProblemSpec prob;
    prob.dim = 2;
    prob.viscosity = nu;
    prob.dirichlet_velocity = [](const std::array<double, 3>&, double) {
      return std::array<double, 3>{0, 0, 0};
    };
    Mesh mesh = unit_cell(SideSpec::Dirichlet());
    const int kp = 2;
    FunctionSpace vs(mesh, kp + 1, 2), ps(mesh, kp, 1);
    PressurePoissonOperator ppe(ps, vs, prob, {});
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[1] * x[1], 0, 0};
    };
    DGField u = interpolate_nodal(vs, f, 0.0);
    std::vector<double> rhs(ppe.n(), 0.0);
    ppe.add_rhs_sipg(0.0, &u, 10.0, rhs);
    // curl curl u = (-2, 0); term: -<q, nu (curlcurl.n)> on each face
    const auto& nodes = ps.nodes_1d();
    const int n = kp + 1;
    Rule01 r(kp + 3);
    std::vector<double> ref(ps.n_dofs(), 0.0);
    for (int i = 0; i < n * n; ++i) {
      double v = 0.0;
      for (std::size_t q = 0; q < r.x.size(); ++q) {
        v -= r.w[q] * nu * (+2.0) * phi(nodes, i, 0.0, r.x[q]);  // x=0: (-2,0).(-1,0) = 2
        v -= r.w[q] * nu * (-2.0) * phi(nodes, i, 1.0, r.x[q]);  // x=1: (-2,0).(1,0) = -2
      }
      ref[i] = v;
    }
    CHECK(rel_diff(rhs, ref) < 1e-11);
  }
}

TEST_CASE("vorticity projection") {
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {2, 2, 1}, sides(SideSpec::Dirichlet()));
  FunctionSpace vs(mesh, 3, 2), ws(mesh, 3, 1);
  SUBCASE("u = (x2, 0): omega = -1, curl omega = 0") {
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[1], 0, 0};
    };
    DGField omega = vorticity_projection(interpolate_nodal(vs, f, 0.0), ws);
    ScalarFn expect = [](const std::array<double, 3>&, double) { return -1.0; };
    CHECK(l2_error(omega, expect, 0.0) < 1e-12);
  }
  SUBCASE("gradient field has zero curl") {
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[1], x[0], 0};  // grad(x1 x2)
    };
    DGField omega = vorticity_projection(interpolate_nodal(vs, f, 0.0), ws);
    CHECK(l2_norm(omega) < 1e-12);
  }
  SUBCASE("u = (-x2^2, 0): omega = 2 x2, curl omega = (2, 0)") {
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{-x[1] * x[1], 0, 0};
    };
    DGField omega = vorticity_projection(interpolate_nodal(vs, f, 0.0), ws);
    ScalarFn expect = [](const std::array<double, 3>& x, double) { return 2.0 * x[1]; };
    CHECK(l2_error(omega, expect, 0.0) < 1e-12);
    // curl of the scalar vorticity: (d2 w, -d1 w) = (2, 0), via gradients
    std::vector<std::array<double, 3>> pts{{0.3, -0.4, 0}};
    std::vector<std::vector<double>> vals;
    std::vector<std::vector<std::array<double, 3>>> grads;
    evaluate_field(omega, 2, pts, vals, &grads);
    CHECK(grads[0][0][1] == doctest::Approx(2.0).epsilon(1e-12));  // d2 w
    CHECK(std::abs(grads[0][0][0]) < 1e-12);                       // d1 w
  }
}

TEST_SUITE_END();
