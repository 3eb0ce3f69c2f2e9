#include "splitdg/space.hpp"

#include <stdexcept>

#include "splitdg/small_dense.hpp"

namespace splitdg {

FunctionSpace::FunctionSpace(const Mesh& mesh, int degree, int components)
    : mesh_(&mesh),
      degree_(degree),
      components_(components),
      basis_(gauss_lobatto_points(degree + 1)) {
  if (degree < 1) throw std::invalid_argument("FunctionSpace: degree must be >= 1");
  if (components != 1 && components != mesh.dim())
    throw std::invalid_argument("FunctionSpace: components must be 1 or dim");
  nodes_per_cell_ = 1;
  for (int a = 0; a < mesh.dim(); ++a) nodes_per_cell_ *= degree + 1;

  const int n = degree + 1;
  const auto rule = gauss_legendre(n);  // exact for degree 2k
  DenseMatrix m(n, n);
  for (int q = 0; q < rule.n; ++q) {
    for (int i = 0; i < n; ++i) {
      const double pi = basis_.value(i, rule.points[q]);
      for (int j = 0; j < n; ++j)
        m(i, j) += rule.weights[q] * pi * basis_.value(j, rule.points[q]);
    }
  }
  mass_1d_ = m.a;
  inv_mass_1d_ = invert_dense(m).a;
}

const BasisTables& FunctionSpace::tables(int n_q) const {
  auto it = tables_.find(n_q);
  if (it == tables_.end()) {
    auto t = std::make_unique<BasisTables>(make_basis_tables(basis_, gauss_legendre(n_q)));
    it = tables_.emplace(n_q, std::move(t)).first;
  }
  return *it->second;
}

void FunctionSpace::node_coordinates(int cell, std::vector<std::array<double, 3>>& out) const {
  const Cell c = mesh_->cell(cell);
  const int n = n1d();
  const int dim = mesh_->dim();
  out.resize(nodes_per_cell_);
  const auto& xi = nodes_1d();
  int idx = 0;
  const int nz = dim == 3 ? n : 1;
  for (int kz = 0; kz < nz; ++kz) {
    for (int ky = 0; ky < n; ++ky) {
      for (int kx = 0; kx < n; ++kx, ++idx) {
        std::array<double, 3> x{0.0, 0.0, 0.0};
        const std::array<int, 3> node{kx, ky, kz};
        for (int a = 0; a < dim; ++a)
          x[a] = c.lower[a] + 0.5 * (xi[node[a]] + 1.0) * (c.upper[a] - c.lower[a]);
        out[idx] = x;
      }
    }
  }
}

}  // namespace splitdg
