#pragma once

#include <string>
#include <vector>

#include "splitdg/space.hpp"

namespace splitdg {

/// Legacy-VTK rectilinear output sampled at the union of the per-cell nodal
/// points (duplicates at cell interfaces resolved by the left-closed cell).
/// Visualization convenience; not a bit-normative format.
void write_vtk(const std::string& path, const std::string& field_name, const DGField& field);

}  // namespace splitdg
