#include "splitdg/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace splitdg {

Mesh Mesh::cartesian(int dim, const std::array<double, 3>& lower,
                     const std::array<double, 3>& upper,
                     const std::array<int, 3>& n_cells,
                     const std::array<SideSpec, 6>& sides) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("mesh: dim must be 2 or 3");
  Mesh m;
  m.dim_ = dim;
  m.lo_ = lower;
  m.hi_ = upper;
  m.n_ = n_cells;
  for (int a = dim; a < 3; ++a) {
    m.lo_[a] = 0.0;
    m.hi_[a] = 1.0;
    m.n_[a] = 1;
  }
  for (int a = 0; a < dim; ++a) {
    if (m.n_[a] < 1) throw std::invalid_argument("mesh: n_cells must be >= 1");
    if (!(m.hi_[a] > m.lo_[a])) throw std::invalid_argument("mesh: non-positive extent");
    const SideSpec& lo_side = sides[2 * a];
    const SideSpec& hi_side = sides[2 * a + 1];
    if (lo_side.periodic != hi_side.periodic)
      throw std::invalid_argument("mesh: periodic marking must match on both sides of an axis");
    m.periodic_[a] = lo_side.periodic;
  }
  for (int a = 0; a < 3; ++a) m.dx_[a] = (m.hi_[a] - m.lo_[a]) / m.n_[a];
  m.n_total_ = m.n_[0] * m.n_[1] * m.n_[2];
  m.cell_faces_.resize(m.n_total_);

  // interior faces, lexicographic in (axis, k, j, i)
  for (int a = 0; a < dim; ++a) {
    const int count_a = m.periodic_[a] ? m.n_[a] : m.n_[a] - 1;
    for (int k = 0; k < m.n_[2]; ++k) {
      for (int j = 0; j < m.n_[1]; ++j) {
        for (int i = 0; i < m.n_[0]; ++i) {
          std::array<int, 3> idx{i, j, k};
          if (idx[a] >= count_a) continue;
          std::array<int, 3> nb = idx;
          nb[a] += 1;
          const bool wrap = nb[a] == m.n_[a];
          if (wrap) nb[a] = 0;
          FaceLink f;
          f.owner = m.cell_id(idx[0], idx[1], idx[2]);
          f.neighbor = m.cell_id(nb[0], nb[1], nb[2]);
          f.axis = a;
          f.wrap = wrap;
          const int fid = static_cast<int>(m.interior_faces_.size());
          m.interior_faces_.push_back(f);
          m.cell_faces_[f.owner][2 * a + 1] = {true, fid, 1};
          m.cell_faces_[f.neighbor][2 * a + 0] = {true, fid, 0};
        }
      }
    }
  }
  // boundary faces
  for (int a = 0; a < dim; ++a) {
    if (m.periodic_[a]) continue;
    for (int side = 0; side < 2; ++side) {
      const BoundaryKind kind = sides[2 * a + side].kind;
      for (int k = 0; k < m.n_[2]; ++k) {
        for (int j = 0; j < m.n_[1]; ++j) {
          for (int i = 0; i < m.n_[0]; ++i) {
            std::array<int, 3> idx{i, j, k};
            if (idx[a] != (side == 0 ? 0 : m.n_[a] - 1)) continue;
            BoundaryFace f;
            f.cell = m.cell_id(i, j, k);
            f.axis = a;
            f.side = side;
            f.kind = kind;
            const int fid = static_cast<int>(m.boundary_faces_.size());
            m.boundary_faces_.push_back(f);
            m.cell_faces_[f.cell][2 * a + side] = {false, fid, side};
          }
        }
      }
    }
  }
  return m;
}

std::array<int, 3> Mesh::cell_index(int id) const {
  std::array<int, 3> idx;
  idx[0] = id % n_[0];
  idx[1] = (id / n_[0]) % n_[1];
  idx[2] = id / (n_[0] * n_[1]);
  return idx;
}

Cell Mesh::cell(int id) const {
  if (id < 0 || id >= n_total_) throw std::out_of_range("mesh: invalid cell id");
  Cell c;
  c.index = cell_index(id);
  double vol = 1.0;
  for (int a = 0; a < 3; ++a) {
    c.lower[a] = lo_[a] + c.index[a] * dx_[a];
    c.upper[a] = c.lower[a] + dx_[a];
  }
  for (int a = 0; a < dim_; ++a) vol *= dx_[a];
  c.volume = vol;
  c.h = std::pow(vol, 1.0 / dim_);
  return c;
}

double Mesh::h_min() const {
  double h = dx_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, dx_[a]);
  return h;
}

double Mesh::domain_measure() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= hi_[a] - lo_[a];
  return v;
}

bool Mesh::has_boundary(BoundaryKind kind) const {
  for (const auto& f : boundary_faces_)
    if (f.kind == kind) return true;
  return false;
}

std::pair<double, double> cell_metrics(const Mesh& mesh, int cell_id) {
  const Cell c = mesh.cell(cell_id);
  return {c.volume, c.h};
}

}  // namespace splitdg
