#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace splitdg {

enum class BoundaryKind : std::uint8_t { dirichlet, neumann };

/// Specification of one box side: either periodic or tagged.
struct SideSpec {
  bool periodic = false;
  BoundaryKind kind = BoundaryKind::dirichlet;
  static SideSpec Dirichlet() { return {false, BoundaryKind::dirichlet}; }
  static SideSpec Neumann() { return {false, BoundaryKind::neumann}; }
  static SideSpec Periodic() { return {true, BoundaryKind::dirichlet}; }
};

/// Interior face between owner and neighbor. The face normal is +e_axis,
/// outward from the owner (the cell on the lower side along `axis`).
struct FaceLink {
  int owner = -1;
  int neighbor = -1;
  int axis = 0;
  bool wrap = false;  // periodic identification
};

/// Boundary face of one cell. side 0 is the lower box side (normal -e_axis),
/// side 1 the upper (+e_axis).
struct BoundaryFace {
  int cell = -1;
  int axis = 0;
  int side = 0;
  BoundaryKind kind = BoundaryKind::dirichlet;
};

struct Cell {
  std::array<int, 3> index{0, 0, 0};
  std::array<double, 3> lower{0, 0, 0};
  std::array<double, 3> upper{0, 0, 0};
  double volume = 0.0;
  double h = 0.0;  // V^(1/dim)
};

/// Structured Cartesian mesh with axis-aligned affine cell mappings.
/// Immutable after construction; cell and face orderings are lexicographic.
class Mesh {
 public:
  static Mesh cartesian(int dim, const std::array<double, 3>& lower,
                        const std::array<double, 3>& upper,
                        const std::array<int, 3>& n_cells,
                        const std::array<SideSpec, 6>& sides);

  int dim() const { return dim_; }
  int n_cells() const { return n_total_; }
  const std::array<int, 3>& cells_per_axis() const { return n_; }
  const std::array<double, 3>& dx() const { return dx_; }
  const std::array<double, 3>& lower() const { return lo_; }
  const std::array<double, 3>& upper() const { return hi_; }
  bool periodic(int axis) const { return periodic_[axis]; }

  int cell_id(int i, int j, int k) const { return i + n_[0] * (j + n_[1] * k); }
  std::array<int, 3> cell_index(int id) const;
  Cell cell(int id) const;
  double h_min() const;
  double domain_measure() const;

  const std::vector<FaceLink>& interior_faces() const { return interior_faces_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }

  /// Faces incident to one cell, in (axis, side) order. Interior entries hold
  /// the index into interior_faces(), boundary entries into boundary_faces().
  struct CellFace {
    bool interior = false;
    int index = -1;
    int side = 0;  // 0: face on the cell's lower side, 1: upper
  };
  const std::array<CellFace, 6>& cell_faces(int cell) const { return cell_faces_[cell]; }

  bool has_boundary(BoundaryKind kind) const;

 private:
  int dim_ = 2;
  std::array<double, 3> lo_{}, hi_{}, dx_{};
  std::array<int, 3> n_{1, 1, 1};
  std::array<bool, 3> periodic_{false, false, false};
  int n_total_ = 0;
  std::vector<FaceLink> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
  std::vector<std::array<CellFace, 6>> cell_faces_;
};

/// (V_e, h_e) for one cell; h_e = V^(1/2) in 2D and V^(1/3) in 3D.
std::pair<double, double> cell_metrics(const Mesh& mesh, int cell_id);

}  // namespace splitdg
