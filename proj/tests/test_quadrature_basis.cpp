#include <doctest.h>

#include <cmath>

#include "splitdg/basis.hpp"
#include "splitdg/quadrature.hpp"

using namespace splitdg;

TEST_SUITE_BEGIN("quadrature_basis");

TEST_CASE("gauss-legendre small rules") {
  auto r1 = gauss_legendre(1);
  CHECK(r1.points[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r1.weights[0] == doctest::Approx(2.0));

  auto r2 = gauss_legendre(2);
  CHECK(r2.points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r2.points[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(1.0).epsilon(1e-14));

  auto r3 = gauss_legendre(3);
  CHECK(r3.points[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r3.points[2] == doctest::Approx(std::sqrt(3.0 / 5.0)).epsilon(1e-14));
  CHECK(r3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(r3.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-14));

  CHECK_THROWS(gauss_legendre(0));
}

TEST_CASE("gauss-legendre exactness up to 2n-1") {
  for (int n = 1; n <= 8; ++n) {
    auto r = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    double odd = 0.0, even = 0.0;
    for (int q = 0; q < n; ++q) {
      odd += r.weights[q] * std::pow(r.points[q], 2 * n - 1);
      even += r.weights[q] * std::pow(r.points[q], 2 * n - 2);
    }
    CHECK(std::abs(odd) < 1e-14);
    CHECK(even == doctest::Approx(2.0 / (2.0 * n - 1.0)).epsilon(1e-14));
  }
}

TEST_CASE("gauss-lobatto node sets") {
  auto n2 = gauss_lobatto_points(2);
  CHECK(n2[0] == -1.0);
  CHECK(n2[1] == 1.0);
  auto n3 = gauss_lobatto_points(3);
  CHECK(n3[1] == doctest::Approx(0.0).epsilon(1e-15));
  auto n5 = gauss_lobatto_points(5);
  CHECK(n5[1] == doctest::Approx(-std::sqrt(3.0 / 7.0)).epsilon(1e-13));
  CHECK(n5[3] == doctest::Approx(std::sqrt(3.0 / 7.0)).epsilon(1e-13));
  for (int n = 2; n <= 8; ++n) {
    auto pts = gauss_lobatto_points(n);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
  }
}

TEST_CASE("lagrange basis cardinal and partition of unity") {
  SUBCASE("k=1 hat functions") {
    Basis1D b({-1.0, 1.0});
    CHECK(b.value(0, 0.0) == doctest::Approx(0.5));
    CHECK(b.value(1, 0.0) == doctest::Approx(0.5));
    CHECK(b.derivative(0, 0.3) == doctest::Approx(-0.5));
    CHECK(b.derivative(1, -0.7) == doctest::Approx(0.5));
  }
  SUBCASE("k=2 cardinal property at nodes") {
    Basis1D b({-1.0, 0.0, 1.0});
    CHECK(b.value(0, 1.0) == 0.0);
    CHECK(b.value(1, 1.0) == 0.0);
    CHECK(b.value(2, 1.0) == 1.0);
  }
  SUBCASE("partition of unity, derivative sum zero") {
    for (int k = 1; k <= 6; ++k) {
      Basis1D b(gauss_lobatto_points(k + 1));
      for (double x : {-0.9, -0.3, 0.123456, 0.77}) {
        double s = 0.0, ds = 0.0;
        for (int i = 0; i <= k; ++i) {
          s += b.value(i, x);
          ds += b.derivative(i, x);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(ds) < 1e-12);
      }
    }
  }
  SUBCASE("duplicate nodes rejected") { CHECK_THROWS(Basis1D({0.0, 0.0, 1.0})); }
}

TEST_SUITE_END();
