#include "splitdg/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace splitdg {

Basis1D::Basis1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const int n = size();
  if (n < 1) throw std::invalid_argument("Basis1D: empty node set");
  bary_.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = nodes_[i] - nodes_[j];
      if (d == 0.0) throw std::invalid_argument("Basis1D: duplicate nodes");
      bary_[i] /= d;
    }
  }
}

double Basis1D::value(int i, double x) const {
  const int n = size();
  // cardinal shortcut keeps nodal evaluation exact
  for (int j = 0; j < n; ++j)
    if (x == nodes_[j]) return i == j ? 1.0 : 0.0;
  double num = bary_[i];
  for (int j = 0; j < n; ++j)
    if (j != i) num *= (x - nodes_[j]);
  return num;
}

double Basis1D::derivative(int i, double x) const {
  // l_i'(x) = sum_{m != i} bary_i * prod_{j != i, m} (x - x_j)
  const int n = size();
  double sum = 0.0;
  for (int m = 0; m < n; ++m) {
    if (m == i) continue;
    double term = bary_[i];
    for (int j = 0; j < n; ++j) {
      if (j == i || j == m) continue;
      term *= (x - nodes_[j]);
    }
    sum += term;
  }
  return sum;
}

BasisTables make_basis_tables(const Basis1D& basis, const QuadratureRule& rule) {
  BasisTables t;
  t.n_nodes = basis.size();
  t.n_q = rule.n;
  t.rule = rule;
  t.phi.resize(static_cast<std::size_t>(t.n_nodes) * t.n_q);
  t.dphi.resize(static_cast<std::size_t>(t.n_nodes) * t.n_q);
  for (int i = 0; i < t.n_nodes; ++i) {
    for (int q = 0; q < t.n_q; ++q) {
      t.phi[i * t.n_q + q] = basis.value(i, rule.points[q]);
      t.dphi[i * t.n_q + q] = basis.derivative(i, rule.points[q]);
    }
  }
  for (int s = 0; s < 2; ++s) {
    const double x = s == 0 ? -1.0 : 1.0;
    t.phi_end[s].resize(t.n_nodes);
    t.dphi_end[s].resize(t.n_nodes);
    for (int i = 0; i < t.n_nodes; ++i) {
      t.phi_end[s][i] = basis.value(i, x);
      t.dphi_end[s][i] = basis.derivative(i, x);
    }
  }
  return t;
}

}  // namespace splitdg
