#include "splitdg/vtk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "splitdg/field_ops.hpp"

namespace splitdg {

namespace {

// per-axis sample coordinates: nodal points of every cell, deduplicated
std::vector<double> axis_points(const Mesh& mesh, const std::vector<double>& xi, int axis) {
  std::vector<double> pts;
  const int n = static_cast<int>(xi.size());
  for (int c = 0; c < mesh.cells_per_axis()[axis]; ++c) {
    const double lo = mesh.lower()[axis] + c * mesh.dx()[axis];
    for (int i = 0; i < n; ++i) {
      const double x = lo + 0.5 * (xi[i] + 1.0) * mesh.dx()[axis];
      if (!pts.empty() && std::abs(x - pts.back()) < 1e-14) continue;
      pts.push_back(x);
    }
  }
  return pts;
}

int owning_cell_1d(const Mesh& mesh, int axis, double x) {
  const int n = mesh.cells_per_axis()[axis];
  int c = static_cast<int>((x - mesh.lower()[axis]) / mesh.dx()[axis]);
  return std::clamp(c, 0, n - 1);
}

}  // namespace

void write_vtk(const std::string& path, const std::string& field_name, const DGField& field) {
  const FunctionSpace& space = *field.space;
  const Mesh& mesh = space.mesh();
  const int dim = mesh.dim();
  std::vector<std::vector<double>> axes(3, std::vector<double>{0.0});
  for (int a = 0; a < dim; ++a) axes[a] = axis_points(mesh, space.nodes_1d(), a);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "# vtk DataFile Version 3.0\n"
      << field_name << "\nASCII\nDATASET RECTILINEAR_GRID\n"
      << "DIMENSIONS " << axes[0].size() << " " << axes[1].size() << " " << axes[2].size()
      << "\n";
  const char* names[3] = {"X_COORDINATES", "Y_COORDINATES", "Z_COORDINATES"};
  out << std::setprecision(15);
  for (int a = 0; a < 3; ++a) {
    out << names[a] << " " << axes[a].size() << " double\n";
    for (double x : axes[a]) out << x << "\n";
  }
  const std::size_t n_points = axes[0].size() * axes[1].size() * axes[2].size();
  out << "POINT_DATA " << n_points << "\n";
  const bool vector_field = space.components() > 1;
  if (vector_field)
    out << "VECTORS " << field_name << " double\n";
  else
    out << "SCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";

  std::vector<std::array<double, 3>> ref(1);
  std::vector<std::vector<double>> values;
  for (double z : axes[2]) {
    for (double y : axes[1]) {
      for (double x : axes[0]) {
        const std::array<double, 3> p{x, y, z};
        std::array<int, 3> ci{0, 0, 0};
        for (int a = 0; a < dim; ++a) ci[a] = owning_cell_1d(mesh, a, p[a]);
        const int cell = mesh.cell_id(ci[0], ci[1], ci[2]);
        const Cell c = mesh.cell(cell);
        for (int a = 0; a < dim; ++a)
          ref[0][a] = 2.0 * (p[a] - c.lower[a]) / (c.upper[a] - c.lower[a]) - 1.0;
        evaluate_field(field, cell, ref, values);
        if (vector_field) {
          for (int comp = 0; comp < 3; ++comp)
            out << (comp < space.components() ? values[0][comp] : 0.0)
                << (comp == 2 ? "\n" : " ");
        } else {
          out << values[0][0] << "\n";
        }
      }
    }
  }
}

}  // namespace splitdg
