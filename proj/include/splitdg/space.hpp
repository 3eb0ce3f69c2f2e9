#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "splitdg/basis.hpp"
#include "splitdg/mesh.hpp"

namespace splitdg {

using ScalarFn = std::function<double(const std::array<double, 3>&, double)>;
using VectorFn = std::function<std::array<double, 3>(const std::array<double, 3>&, double)>;

/// Nodal tensor-product DG space of degree k on Gauss-Lobatto points.
/// Immutable after construction. Quadrature tables are cached per rule size;
/// warm_tables() must be called (or the rule used once) before concurrent
/// access.
class FunctionSpace {
 public:
  FunctionSpace(const Mesh& mesh, int degree, int components);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  int n1d() const { return degree_ + 1; }
  int nodes_per_cell() const { return nodes_per_cell_; }
  int dofs_per_cell() const { return nodes_per_cell_ * components_; }
  std::size_t n_dofs() const {
    return static_cast<std::size_t>(mesh_->n_cells()) * dofs_per_cell();
  }

  const Basis1D& basis() const { return basis_; }
  const std::vector<double>& nodes_1d() const { return basis_.nodes(); }
  const BasisTables& tables(int n_q) const;
  void warm_tables(int n_q) const { (void)tables(n_q); }

  /// Reference 1D mass matrix on [-1,1] and its inverse (row-major n1d x n1d).
  const std::vector<double>& mass_1d() const { return mass_1d_; }
  const std::vector<double>& inv_mass_1d() const { return inv_mass_1d_; }

  /// Physical coordinates of the nodal points of one cell, x-fastest ordering.
  void node_coordinates(int cell, std::vector<std::array<double, 3>>& out) const;

  /// Default volume rule: degree+1 Gauss points (exact cell mass matrix).
  int default_quadrature() const { return degree_ + 1; }

 private:
  const Mesh* mesh_;
  int degree_;
  int components_;
  int nodes_per_cell_;
  Basis1D basis_;
  std::vector<double> mass_1d_, inv_mass_1d_;
  mutable std::map<int, std::unique_ptr<BasisTables>> tables_;
};

/// Piecewise-polynomial field: one coefficient block per cell, nodal values,
/// component-major within the cell.
struct DGField {
  const FunctionSpace* space = nullptr;
  std::vector<double> data;

  DGField() = default;
  explicit DGField(const FunctionSpace& s) : space(&s), data(s.n_dofs(), 0.0) {}

  double* cell_data(int c) { return data.data() + static_cast<std::size_t>(c) * space->dofs_per_cell(); }
  const double* cell_data(int c) const {
    return data.data() + static_cast<std::size_t>(c) * space->dofs_per_cell();
  }
  std::size_t size() const { return data.size(); }
  void set_zero() { std::fill(data.begin(), data.end(), 0.0); }
};

}  // namespace splitdg
