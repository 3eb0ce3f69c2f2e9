#pragma once

#include <vector>

#include "splitdg/quadrature.hpp"

namespace splitdg {

/// 1D nodal Lagrange basis on [-1, 1].
class Basis1D {
 public:
  explicit Basis1D(std::vector<double> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  int degree() const { return size() - 1; }
  const std::vector<double>& nodes() const { return nodes_; }

  double value(int i, double x) const;
  double derivative(int i, double x) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> bary_;  // barycentric weights
};

/// Precomputed shape-function tables for one (basis, quadrature) pair.
/// Layout: phi[i * n_q + q] = value of shape i at quadrature point q.
struct BasisTables {
  int n_nodes = 0;
  int n_q = 0;
  QuadratureRule rule;
  std::vector<double> phi;
  std::vector<double> dphi;
  // traces at the reference endpoints xi = -1 (index 0) and xi = +1 (index 1)
  std::vector<double> phi_end[2];
  std::vector<double> dphi_end[2];
};

BasisTables make_basis_tables(const Basis1D& basis, const QuadratureRule& rule);

}  // namespace splitdg
