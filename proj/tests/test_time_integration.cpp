#include <doctest.h>

#include <cmath>

#include "splitdg/benchmarks.hpp"
#include "splitdg/field_ops.hpp"
#include "splitdg/time_integration.hpp"

using namespace splitdg;

TEST_SUITE_BEGIN("time_integration");

TEST_CASE("bdf coefficients match the closed forms") {
  auto b1 = bdf_coefficients(1);
  CHECK(b1.gamma0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b1.alpha[0] == doctest::Approx(1.0).epsilon(1e-14));
  auto b2 = bdf_coefficients(2);
  CHECK(b2.gamma0 == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(b2.alpha[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(b2.alpha[1] == doctest::Approx(-0.5).epsilon(1e-14));
  auto b3 = bdf_coefficients(3);
  CHECK(b3.gamma0 == doctest::Approx(11.0 / 6.0).epsilon(1e-14));
  CHECK(b3.alpha[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(b3.alpha[1] == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(b3.alpha[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  auto b4 = bdf_coefficients(4);
  CHECK(b4.gamma0 == doctest::Approx(25.0 / 12.0).epsilon(1e-13));
  CHECK(b4.alpha[0] == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(b4.alpha[1] == doctest::Approx(-3.0).epsilon(1e-13));
  CHECK(b4.alpha[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(b4.alpha[3] == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK_THROWS(bdf_coefficients(0));
  CHECK_THROWS(bdf_coefficients(5));
}

TEST_CASE("bdf order conditions: exact on polynomials up to degree J") {
  for (int J = 1; J <= 4; ++J) {
    auto s = bdf_coefficients(J);
    // constants annihilated
    double c = s.gamma0;
    for (double a : s.alpha) c -= a;
    CHECK(std::abs(c) < 1e-14);
    const double dt = 0.37;
    for (int deg = 1; deg <= J; ++deg) {
      // q(t) = t^deg around t^{n+1} = 1.3
      const double tn1 = 1.3;
      double v = s.gamma0 * std::pow(tn1, deg);
      for (int i = 1; i <= J; ++i) v -= s.alpha[i - 1] * std::pow(tn1 - i * dt, deg);
      const double deriv = deg * std::pow(tn1, deg - 1);
      CHECK(v / dt == doctest::Approx(deriv).epsilon(1e-12));
    }
  }
}

TEST_CASE("extrapolation coefficients") {
  auto e1 = extrapolation_coefficients(1);
  CHECK(e1[0] == doctest::Approx(1.0).epsilon(1e-14));
  auto e2 = extrapolation_coefficients(2);
  CHECK(e2[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e2[1] == doctest::Approx(-1.0).epsilon(1e-14));
  auto e3 = extrapolation_coefficients(3);
  CHECK(e3[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e3[1] == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(e3[2] == doctest::Approx(1.0).epsilon(1e-14));
  auto e4 = extrapolation_coefficients(4);
  CHECK(e4[0] == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(e4[1] == doctest::Approx(-6.0).epsilon(1e-13));
  CHECK(e4[2] == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(e4[3] == doctest::Approx(-1.0).epsilon(1e-13));
  for (int m = 1; m <= 4; ++m) {
    auto beta = extrapolation_coefficients(m);
    double s = 0.0;
    for (double b : beta) s += b;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    // exact for polynomials of degree m-1
    const double dt = 0.21;
    for (int deg = 0; deg < m; ++deg) {
      double v = 0.0;
      for (int i = 1; i <= m; ++i) v += beta[i - 1] * std::pow(2.0 - i * dt, deg);
      CHECK(v == doctest::Approx(std::pow(2.0, deg)).epsilon(1e-12));
    }
  }
  CHECK_THROWS(extrapolation_coefficients(0));
  CHECK_THROWS(extrapolation_coefficients(5));
}

TEST_CASE("scalar ODE observed orders") {
  // u' = -u, u(0) = 1, integrated to T = 1 with exact history startup
  for (int J = 1; J <= 4; ++J) {
    auto s = bdf_coefficients(J);
    std::vector<double> errs;
    for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
      const long n = std::lround(1.0 / dt);
      std::vector<double> hist(J);
      for (int i = 0; i < J; ++i) hist[i] = std::exp(i * dt);  // u(-i dt)
      double t = 0.0;
      for (long step = 0; step < n; ++step) {
        double rhs = 0.0;
        for (int i = 0; i < J; ++i) rhs += s.alpha[i] * hist[i];
        const double un1 = rhs / (s.gamma0 + dt);  // (g0 u - sum a u)/dt = -u
        for (int i = J - 1; i > 0; --i) hist[i] = hist[i - 1];
        hist[0] = un1;
        t += dt;
      }
      errs.push_back(std::abs(hist[0] - std::exp(-1.0)));
    }
    // least-squares slope over the sweep
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double dts[4] = {0.1, 0.05, 0.025, 0.0125};
    for (int i = 0; i < 4; ++i) {
      const double x = std::log(dts[i]), y = std::log(errs[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(J).epsilon(0.1 / J));
  }
}

TEST_CASE("cfl time step") {
  Mesh mesh = Mesh::cartesian(2, {0, 0, 0}, {1, 0.5, 0}, {10, 5, 1},
                              {SideSpec::Dirichlet(), SideSpec::Dirichlet(), SideSpec::Dirichlet(),
                               SideSpec::Dirichlet(), SideSpec::Dirichlet(),
                               SideSpec::Dirichlet()});
  CHECK(mesh.h_min() == doctest::Approx(0.1).epsilon(1e-14));
  FunctionSpace vs(mesh, 2, 2);
  SUBCASE("formula evaluation") {
    VectorFn f = [](const std::array<double, 3>& x, double) {
      return std::array<double, 3>{x[0], 0, 0};  // max norm 1 at x=1 nodal point
    };
    DGField u = interpolate_nodal(vs, f, 0.0);
    const double dt1 = compute_cfl_time_step(mesh, u, 1, 0.4);
    CHECK(dt1 == doctest::Approx(0.4 * 0.1 / 1.0).epsilon(1e-12));
    const double dt4 = compute_cfl_time_step(mesh, u, 4, 0.4);
    CHECK(dt1 / dt4 == doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("zero field guard") {
    DGField u(vs);
    const double dt = compute_cfl_time_step(mesh, u, 2, 0.4);
    CHECK(std::isfinite(dt));
    CHECK(dt == doctest::Approx(0.4 * 0.1 / (std::pow(2.0, 1.5) * 1e-12)).epsilon(1e-10));
  }
}

TEST_CASE("boundary time derivative") {
  SUBCASE("constant data") {
    const double g[3] = {5.0, 5.0, 5.0};
    CHECK(std::abs(boundary_time_derivative(std::span<const double>(g, 3), 2, 0.1)) < 1e-12);
  }
  SUBCASE("linear data, BDF-1 exact") {
    const double dt = 0.25;
    const double g[2] = {1.0, 1.0 - dt};  // g = t at t=1, 1-dt
    CHECK(boundary_time_derivative(std::span<const double>(g, 2), 1, dt) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("quadratic data, BDF-2 exact") {
    const double dt = 0.2, t = 1.4;
    const double g[3] = {t * t, (t - dt) * (t - dt), (t - 2 * dt) * (t - 2 * dt)};
    CHECK(boundary_time_derivative(std::span<const double>(g, 3), 2, dt) ==
          doctest::Approx(2.0 * t).epsilon(1e-12));
  }
  SUBCASE("insufficient history") {
    const double g[2] = {1.0, 2.0};
    CHECK_THROWS(boundary_time_derivative(std::span<const double>(g, 2), 2, 0.1));
  }
}

TEST_CASE("startup sequence") {
  SUBCASE("J=1 empty") {
    CHECK(startup_sequence(StartupPolicy::increasing_order, 1, false).empty());
  }
  SUBCASE("J=3 increasing order") {
    auto plan = startup_sequence(StartupPolicy::increasing_order, 3, false);
    REQUIRE(plan.size() == 2);
    CHECK(plan[0].bdf_order == 1);
    CHECK(plan[0].conv_order == 1);
    CHECK(plan[1].bdf_order == 2);
    CHECK(plan[1].pressure_bc_order == 2);
  }
  SUBCASE("exact interpolation prefills, nothing to ramp") {
    CHECK(startup_sequence(StartupPolicy::exact_interpolation, 4, true).empty());
    CHECK_THROWS(startup_sequence(StartupPolicy::exact_interpolation, 2, false));
  }
}

TEST_SUITE_END();
