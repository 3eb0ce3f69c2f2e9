#pragma once

#include <array>
#include <vector>

#include "splitdg/cell_eval.hpp"
#include "splitdg/mesh.hpp"

namespace splitdg::detail {

// Physical coordinates of the face quadrature grid of (cell, axis, side),
// matching the CellEval face layout (tangential axes ascending, first fastest).
inline void face_quad_coordinates(const Mesh& mesh, int cell, int axis, int side,
                                  const QuadratureRule& rule,
                                  std::vector<std::array<double, 3>>& out) {
  const Cell c = mesh.cell(cell);
  const int dim = mesh.dim();
  const int nq = rule.n;
  int tang[2], nt = 0;
  for (int a = 0; a < dim; ++a)
    if (a != axis) tang[nt++] = a;
  out.resize(nt == 1 ? nq : nq * nq);
  const double xn = side == 0 ? c.lower[axis] : c.upper[axis];
  if (nt == 1) {
    const int a0 = tang[0];
    for (int q0 = 0; q0 < nq; ++q0) {
      std::array<double, 3> x{0, 0, 0};
      x[axis] = xn;
      x[a0] = c.lower[a0] + 0.5 * (rule.points[q0] + 1.0) * (c.upper[a0] - c.lower[a0]);
      out[q0] = x;
    }
  } else {
    const int a0 = tang[0], a1 = tang[1];
    for (int q1 = 0; q1 < nq; ++q1)
      for (int q0 = 0; q0 < nq; ++q0) {
        std::array<double, 3> x{0, 0, 0};
        x[axis] = xn;
        x[a0] = c.lower[a0] + 0.5 * (rule.points[q0] + 1.0) * (c.upper[a0] - c.lower[a0]);
        x[a1] = c.lower[a1] + 0.5 * (rule.points[q1] + 1.0) * (c.upper[a1] - c.lower[a1]);
        out[q0 + nq * q1] = x;
      }
  }
}

inline void volume_quad_coordinates(const Mesh& mesh, int cell, const QuadratureRule& rule,
                                    std::vector<std::array<double, 3>>& out) {
  const Cell c = mesh.cell(cell);
  const int dim = mesh.dim();
  const int nq = rule.n;
  out.resize(dim == 2 ? nq * nq : nq * nq * nq);
  int idx = 0;
  const int nz = dim == 3 ? nq : 1;
  for (int q2 = 0; q2 < nz; ++q2)
    for (int q1 = 0; q1 < nq; ++q1)
      for (int q0 = 0; q0 < nq; ++q0, ++idx) {
        std::array<int, 3> q{q0, q1, q2};
        std::array<double, 3> x{0, 0, 0};
        for (int a = 0; a < dim; ++a)
          x[a] = c.lower[a] + 0.5 * (rule.points[q[a]] + 1.0) * (c.upper[a] - c.lower[a]);
        out[idx] = x;
      }
}

// Per-axis face area of a uniform Cartesian mesh.
inline double face_area(const Mesh& mesh, int axis) {
  double a = 1.0;
  for (int t = 0; t < mesh.dim(); ++t)
    if (t != axis) a *= mesh.dx()[t];
  return a;
}

}  // namespace splitdg::detail
