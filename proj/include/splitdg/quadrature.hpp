#pragma once

#include <vector>

namespace splitdg {

/// 1D quadrature rule on the reference interval [-1, 1].
struct QuadratureRule {
  int n = 0;
  std::vector<double> points;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points; exact for polynomials up to degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Gauss-Lobatto node set with n points (includes both endpoints), n >= 2.
std::vector<double> gauss_lobatto_points(int n);

}  // namespace splitdg
