#include "splitdg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace splitdg {

namespace {

// Legendre P_n(x) and P_n'(x) via the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  QuadratureRule rule;
  rule.n = n;
  rule.points.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.points[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = -p / dp;
      x += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -std::abs(x);
    rule.weights[i] = w;
    rule.points[n - 1 - i] = std::abs(x);
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

std::vector<double> gauss_lobatto_points(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_points: need n >= 2");
  std::vector<double> x(n);
  x.front() = -1.0;
  x.back() = 1.0;
  const double pi = std::acos(-1.0);
  const int m = n - 1;  // interior points are roots of P_m'
  for (int i = 1; i < m; ++i) {
    // Chebyshev-Gauss-Lobatto initial guess, then Newton on P_m'.
    double xi = -std::cos(pi * i / m);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(m, xi, p, dp);
      // d/dx P_m'(x) from the Legendre ODE: (1-x^2) P'' = 2x P' - m(m+1) P
      const double ddp = (2.0 * xi * dp - m * (m + 1.0) * p) / (1.0 - xi * xi);
      const double dx = -dp / ddp;
      xi += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    x[i] = xi;
  }
  // enforce exact symmetry
  for (int i = 0; i < n / 2; ++i) {
    const double s = 0.5 * (x[n - 1 - i] - x[i]);
    x[i] = -s;
    x[n - 1 - i] = s;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return x;
}

}  // namespace splitdg
