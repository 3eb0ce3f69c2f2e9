#include <doctest.h>

#include <cmath>
#include <random>

#include "splitdg/cell_eval.hpp"
#include "splitdg/field_ops.hpp"
#include "oracle.hpp"

using namespace splitdg;

namespace {

std::array<SideSpec, 6> dirichlet_sides() {
  return {SideSpec::Dirichlet(), SideSpec::Dirichlet(), SideSpec::Dirichlet(),
          SideSpec::Dirichlet(), SideSpec::Dirichlet(), SideSpec::Dirichlet()};
}

}  // namespace

TEST_SUITE_BEGIN("fields");

TEST_CASE("tensor kernels match the naive oracle (2D)") {
  Mesh mesh = Mesh::cartesian(2, {0.2, -0.3, 0}, {1.0, 0.5, 0}, {2, 2, 1}, dirichlet_sides());
  const int k = 3, nq = 5;
  FunctionSpace space(mesh, k, 1);
  space.warm_tables(nq);
  CellEval ev(space, nq);
  const int n = k + 1;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> coeff(n * n);
  for (auto& c : coeff) c = dist(rng);
  const auto& nodes = space.nodes_1d();
  const auto rule = gauss_legendre(nq);

  SUBCASE("volume values and reference derivatives") {
    std::vector<double> vals(nq * nq), dx(nq * nq);
    ev.values(coeff.data(), vals.data());
    ev.ref_deriv(coeff.data(), 0, dx.data());
    for (int q1 = 0; q1 < nq; ++q1)
      for (int q0 = 0; q0 < nq; ++q0) {
        double v = 0, d = 0;
        for (int i = 0; i < n * n; ++i) {
          v += coeff[i] * oracle::basis2d(nodes, i, rule.points[q0], rule.points[q1]);
          d += coeff[i] * oracle::basis2d_grad(nodes, i, rule.points[q0], rule.points[q1])[0];
        }
        CHECK(vals[q0 + nq * q1] == doctest::Approx(v).epsilon(1e-12));
        CHECK(dx[q0 + nq * q1] == doctest::Approx(d).epsilon(1e-12));
      }
  }

  SUBCASE("volume moments") {
    std::vector<double> fw(nq * nq);
    for (auto& f : fw) f = dist(rng);
    std::vector<double> m(n * n, 0.0), m_ref(n * n, 0.0);
    ev.moments_add(fw.data(), m.data());
    for (int i = 0; i < n * n; ++i)
      for (int q1 = 0; q1 < nq; ++q1)
        for (int q0 = 0; q0 < nq; ++q0)
          m_ref[i] += fw[q0 + nq * q1] * oracle::basis2d(nodes, i, rule.points[q0], rule.points[q1]);
    for (int i = 0; i < n * n; ++i) CHECK(m[i] == doctest::Approx(m_ref[i]).epsilon(1e-12));
  }

  SUBCASE("face traces, all four faces") {
    std::vector<double> tr(nq);
    for (int axis = 0; axis < 2; ++axis)
      for (int side = 0; side < 2; ++side) {
        ev.face_values(coeff.data(), axis, side, tr.data());
        const double xn = side == 0 ? -1.0 : 1.0;
        for (int q = 0; q < nq; ++q) {
          const double xi = axis == 0 ? xn : rule.points[q];
          const double eta = axis == 0 ? rule.points[q] : xn;
          double v = 0;
          for (int i = 0; i < n * n; ++i) v += coeff[i] * oracle::basis2d(nodes, i, xi, eta);
          CHECK(tr[q] == doctest::Approx(v).epsilon(1e-12));
        }
        // normal and tangential reference derivatives on the face
        for (int da = 0; da < 2; ++da) {
          ev.face_ref_deriv(coeff.data(), axis, side, da, tr.data());
          for (int q = 0; q < nq; ++q) {
            const double xi = axis == 0 ? xn : rule.points[q];
            const double eta = axis == 0 ? rule.points[q] : xn;
            double v = 0;
            for (int i = 0; i < n * n; ++i)
              v += coeff[i] * oracle::basis2d_grad(nodes, i, xi, eta)[da];
            CHECK(tr[q] == doctest::Approx(v).epsilon(1e-12));
          }
        }
      }
  }

  SUBCASE("face moments") {
    std::vector<double> fw(nq);
    for (auto& f : fw) f = dist(rng);
    for (int axis = 0; axis < 2; ++axis)
      for (int side = 0; side < 2; ++side) {
        std::vector<double> m(n * n, 0.0), m_ref(n * n, 0.0);
        ev.face_moments_add(fw.data(), axis, side, m.data());
        const double xn = side == 0 ? -1.0 : 1.0;
        for (int i = 0; i < n * n; ++i)
          for (int q = 0; q < nq; ++q) {
            const double xi = axis == 0 ? xn : rule.points[q];
            const double eta = axis == 0 ? rule.points[q] : xn;
            m_ref[i] += fw[q] * oracle::basis2d(nodes, i, xi, eta);
          }
        for (int i = 0; i < n * n; ++i) CHECK(m[i] == doctest::Approx(m_ref[i]).epsilon(1e-12));
      }
  }
}

TEST_CASE("tensor kernels match the naive oracle (3D spot checks)") {
  Mesh mesh = Mesh::cartesian(3, {0, 0, 0}, {1, 1, 1}, {1, 1, 1}, dirichlet_sides());
  const int k = 2, nq = 3;
  FunctionSpace space(mesh, k, 1);
  space.warm_tables(nq);
  CellEval ev(space, nq);
  const int n = k + 1;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> coeff(n * n * n);
  for (auto& c : coeff) c = dist(rng);
  const auto& nodes = space.nodes_1d();
  const auto rule = gauss_legendre(nq);
  auto basis3d = [&](int idx, double x, double y, double z) {
    const int i = idx % n, j = (idx / n) % n, m = idx / (n * n);
    return oracle::lagrange_value(nodes, i, x) * oracle::lagrange_value(nodes, j, y) *
           oracle::lagrange_value(nodes, m, z);
  };
  std::vector<double> vals(nq * nq * nq);
  ev.values(coeff.data(), vals.data());
  for (int q2 = 0; q2 < nq; ++q2)
    for (int q1 = 0; q1 < nq; ++q1)
      for (int q0 = 0; q0 < nq; ++q0) {
        double v = 0;
        for (int i = 0; i < n * n * n; ++i)
          v += coeff[i] * basis3d(i, rule.points[q0], rule.points[q1], rule.points[q2]);
        CHECK(vals[q0 + nq * (q1 + nq * q2)] == doctest::Approx(v).epsilon(1e-12));
      }
  // one face trace (axis 1, side 0) and matching moments
  std::vector<double> tr(nq * nq);
  ev.face_values(coeff.data(), 1, 0, tr.data());
  for (int q2 = 0; q2 < nq; ++q2)
    for (int q0 = 0; q0 < nq; ++q0) {
      double v = 0;
      for (int i = 0; i < n * n * n; ++i)
        v += coeff[i] * basis3d(i, rule.points[q0], -1.0, rule.points[q2]);
      CHECK(tr[q0 + nq * q2] == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("l2 projection") {
  Mesh mesh = Mesh::cartesian(2, {-0.5, -0.5, 0}, {0.5, 0.5, 0}, {3, 3, 1}, dirichlet_sides());
  SUBCASE("reproduces polynomials in the space") {
    FunctionSpace space(mesh, 2, 1);
    ScalarFn f = [](const std::array<double, 3>& x, double) {
      return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1] + x[0] * x[0];
    };
    DGField proj = l2_project(space, f, 0.0);
    DGField interp = interpolate_nodal(space, f, 0.0);
    for (std::size_t i = 0; i < proj.data.size(); ++i)
      CHECK(proj.data[i] == doctest::Approx(interp.data[i]).epsilon(1e-12));
    CHECK(l2_error(proj, f, 0.0) < 1e-13);
  }
  SUBCASE("zero function projects to zero") {
    FunctionSpace space(mesh, 3, 1);
    ScalarFn f = [](const std::array<double, 3>&, double) { return 0.0; };
    DGField proj = l2_project(space, f, 0.0);
    for (double v : proj.data) CHECK(v == 0.0);
  }
  SUBCASE("sin projection converges at h^(k+1)") {
    const double pi = std::acos(-1.0);
    ScalarFn f = [pi](const std::array<double, 3>& x, double) {
      return std::sin(2.0 * pi * x[0]);
    };
    std::vector<double> errs;
    for (int n : {4, 8, 16, 32}) {
      Mesh m = Mesh::cartesian(2, {-0.5, -0.5, 0}, {0.5, 0.5, 0}, {n, n, 1}, dirichlet_sides());
      FunctionSpace space(m, 2, 1);
      errs.push_back(l2_error(l2_project(space, f, 0.0), f, 0.0));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double order = std::log2(errs[i - 1] / errs[i]);
      CHECK(order > 2.6);  // k+1 = 3
    }
  }
  SUBCASE("residual orthogonality under the active rule") {
    FunctionSpace space(mesh, 2, 1);
    space.warm_tables(4);
    ScalarFn f = [](const std::array<double, 3>& x, double) {
      return std::exp(x[0]) * std::cos(3.0 * x[1]);
    };
    DGField proj = l2_project(space, f, 0.0, 4);
    // directly integrate (proj - f) phi_i over one cell with the same rule
    CellEval ev(space, 4);
    const int nqd = ev.n_qpoints();
    std::vector<double> vals(nqd), fw(nqd), m(space.nodes_per_cell(), 0.0);
    const int cell = 4;
    ev.values(proj.cell_data(cell), vals.data());
    const auto rule = gauss_legendre(4);
    const Cell c = mesh.cell(cell);
    int q = 0;
    for (int q1 = 0; q1 < 4; ++q1)
      for (int q0 = 0; q0 < 4; ++q0, ++q) {
        const std::array<double, 3> x{
            c.lower[0] + 0.5 * (rule.points[q0] + 1.0) * (c.upper[0] - c.lower[0]),
            c.lower[1] + 0.5 * (rule.points[q1] + 1.0) * (c.upper[1] - c.lower[1]), 0.0};
        fw[q] = (vals[q] - f(x, 0.0)) * ev.qweights()[q] * ev.volume_jacobian();
      }
    ev.moments_add(fw.data(), m.data());
    for (double v : m) CHECK(std::abs(v) < 1e-14);
  }
}

TEST_CASE("evaluate_field") {
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {0.5, 0.5, 0}, {1, 1, 1}, dirichlet_sides());
  SUBCASE("constant field") {
    FunctionSpace space(mesh, 2, 1);
    ScalarFn f = [](const std::array<double, 3>&, double) { return 3.25; };
    DGField field = interpolate_nodal(space, f, 0.0);
    std::vector<std::array<double, 3>> pts{{0.1, -0.7, 0}, {0.0, 0.0, 0}};
    std::vector<std::vector<double>> vals;
    std::vector<std::vector<std::array<double, 3>>> grads;
    evaluate_field(field, 0, pts, vals, &grads);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      CHECK(vals[p][0] == doctest::Approx(3.25).epsilon(1e-14));
      CHECK(std::abs(grads[p][0][0]) < 1e-13);
      CHECK(std::abs(grads[p][0][1]) < 1e-13);
    }
  }
  SUBCASE("linear field gradient via affine chain rule") {
    FunctionSpace space(mesh, 1, 1);
    ScalarFn f = [](const std::array<double, 3>& x, double) { return x[0]; };
    DGField field = interpolate_nodal(space, f, 0.0);
    std::vector<std::array<double, 3>> pts{{-0.33, 0.5, 0}};
    std::vector<std::vector<double>> vals;
    std::vector<std::vector<std::array<double, 3>>> grads;
    evaluate_field(field, 0, pts, vals, &grads);
    CHECK(grads[0][0][0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(grads[0][0][1]) < 1e-13);
  }
  SUBCASE("bilinear interpolation exactness") {
    FunctionSpace space(mesh, 2, 1);
    ScalarFn f = [](const std::array<double, 3>& x, double) { return x[0] * x[1]; };
    DGField field = interpolate_nodal(space, f, 0.0);
    std::vector<std::array<double, 3>> pts{{0.3, -0.8, 0}, {0.9, 0.2, 0}};
    std::vector<std::vector<double>> vals;
    evaluate_field(field, 0, pts, vals);
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double x = 0.25 * (pts[p][0] + 1.0), y = 0.25 * (pts[p][1] + 1.0);
      CHECK(vals[p][0] == doctest::Approx(x * y).epsilon(1e-13));
    }
  }
}

TEST_CASE("error norms") {
  Mesh mesh = Mesh::cartesian(2, {-0.5, -0.5, 0}, {0.5, 0.5, 0}, {4, 4, 1}, dirichlet_sides());
  FunctionSpace space(mesh, 3, 1);
  ScalarFn f = [](const std::array<double, 3>& x, double) {
    return 1.0 + x[0] - 0.5 * x[1] * x[1] * x[1];
  };
  SUBCASE("interpolant of a polynomial in the space") {
    DGField field = interpolate_nodal(space, f, 0.0);
    CHECK(relative_l2_error(field, f, 0.0) < 1e-12);
  }
  SUBCASE("zero field against nonzero exact") {
    DGField field(space);
    CHECK(relative_l2_error(field, f, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("norm homogeneity") {
    DGField field = interpolate_nodal(space, f, 0.0);
    for (auto& v : field.data) v *= 1.001;
    CHECK(relative_l2_error(field, f, 0.0) == doctest::Approx(1e-3).epsilon(1e-6));
  }
  SUBCASE("zero exact reported distinctly") {
    DGField field = interpolate_nodal(space, f, 0.0);
    ScalarFn zero = [](const std::array<double, 3>&, double) { return 0.0; };
    CHECK_THROWS_AS((void)relative_l2_error(field, zero, 0.0), std::domain_error);
    CHECK(l2_error(field, zero, 0.0) > 0.0);  // absolute norm still available
  }
}

TEST_CASE("divergence norm") {
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {3, 3, 1}, dirichlet_sides());
  FunctionSpace space(mesh, 2, 2);
  SUBCASE("divergence-free linear field") {
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[0], -x[1], 0};
    };
    CHECK(divergence_l2_norm(interpolate_nodal(space, f, 0.0)) < 1e-13);
  }
  SUBCASE("unit divergence") {
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[0], 0, 0};
    };
    CHECK(divergence_l2_norm(interpolate_nodal(space, f, 0.0)) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("constant field") {
    VectorFn f = [](const std::array<double, 3>&, double) {
      return std::array<double, 3>{2.0, -1.0, 0};
    };
    CHECK(divergence_l2_norm(interpolate_nodal(space, f, 0.0)) < 1e-13);
  }
  SUBCASE("scalar input rejected") {
    FunctionSpace scalar(mesh, 2, 1);
    DGField field(scalar);
    CHECK_THROWS(divergence_l2_norm(field));
  }
}

TEST_CASE("cell mass matrix is symmetric positive definite and exact") {
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {1, 1, 1}, dirichlet_sides());
  FunctionSpace space(mesh, 3, 1);
  const int n = space.n1d();
  const auto& m1 = space.mass_1d();
  // 1D mass vs oracle with one extra quadrature point
  const auto rule = gauss_legendre(n + 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ref = 0.0;
      for (int q = 0; q < rule.n; ++q)
        ref += rule.weights[q] * oracle::lagrange_value(space.nodes_1d(), i, rule.points[q]) *
               oracle::lagrange_value(space.nodes_1d(), j, rule.points[q]);
      CHECK(m1[i * n + j] == doctest::Approx(ref).epsilon(1e-13));
      CHECK(m1[i * n + j] == doctest::Approx(m1[j * n + i]).epsilon(1e-14));
    }
  // positive definiteness via random quadratic forms
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(n);
    double nrm = 0.0;
    for (auto& v : x) {
      v = dist(rng);
      nrm += v * v;
    }
    if (nrm == 0.0) continue;
    double quad = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) quad += x[i] * m1[i * n + j] * x[j];
    CHECK(quad > 0.0);
  }
}

TEST_CASE("trace consistency of continuous interpolants") {
  const double pi = std::acos(-1.0);
  ScalarFn f = [pi](const std::array<double, 3>& x, double) {
    return std::sin(pi * x[0]) * std::cos(pi * x[1]);
  };
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 1, 0}, {3, 3, 1}, dirichlet_sides());
  FunctionSpace space(mesh, 4, 1);
  DGField field = interpolate_nodal(space, f, 0.0);
  const int nq = 6;
  space.warm_tables(nq);
  CellEval ev(space, nq);
  std::vector<double> tm(ev.n_face_qpoints()), tp(ev.n_face_qpoints());
  for (const auto& fl : mesh.interior_faces()) {
    ev.face_values(field.cell_data(fl.owner), fl.axis, 1, tm.data());
    ev.face_values(field.cell_data(fl.neighbor), fl.axis, 0, tp.data());
    for (int q = 0; q < ev.n_face_qpoints(); ++q)
      CHECK(std::abs(tm[q] - tp[q]) < 1e-13);
  }
}

TEST_SUITE_END();
