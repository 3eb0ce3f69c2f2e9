#pragma once

#include <array>
#include <span>
#include <vector>

#include "splitdg/space.hpp"

namespace splitdg {

/// Element-wise L2 projection of a callable; n_q = 0 uses degree+2 points.
DGField l2_project(const FunctionSpace& space, const VectorFn& f, double t, int n_q = 0);
DGField l2_project(const FunctionSpace& space, const ScalarFn& f, double t, int n_q = 0);

/// Nodal interpolation (evaluate at the Gauss-Lobatto points).
DGField interpolate_nodal(const FunctionSpace& space, const VectorFn& f, double t);
DGField interpolate_nodal(const FunctionSpace& space, const ScalarFn& f, double t);

/// Values (and physical-space gradients) of a field at reference points of one
/// cell. values: [point][component]; gradients: [point][component][axis].
void evaluate_field(const DGField& field, int cell,
                    std::span<const std::array<double, 3>> ref_points,
                    std::vector<std::vector<double>>& values,
                    std::vector<std::vector<std::array<double, 3>>>* gradients = nullptr);

double l2_norm(const DGField& field, int n_q = 0);
/// || f_exact - field ||_L2 at time t, over-integrated with degree+3 points.
double l2_error(const DGField& field, const VectorFn& exact, double t);
double l2_error(const DGField& field, const ScalarFn& exact, double t);
/// Relative L2 error; throws std::domain_error when ||exact|| vanishes.
double relative_l2_error(const DGField& field, const VectorFn& exact, double t);
double relative_l2_error(const DGField& field, const ScalarFn& exact, double t);

/// || div u ||_L2 with element-wise (broken) gradients; vector fields only.
double divergence_l2_norm(const DGField& u);

/// Integral of a scalar field over the mesh.
double integral(const DGField& field);
double mean_value(const DGField& field);

/// Per-cell volume average of a vector field.
std::array<double, 3> cell_average(const DGField& u, int cell);

/// max over nodal points of the Euclidean norm of the field value.
double max_nodal_norm(const DGField& field);

/// coefficients = M^{-1} moments, cell by cell (tensor-product inverse).
void apply_inverse_mass(const FunctionSpace& space, const std::vector<double>& moments,
                        std::vector<double>& coefficients, int threads = 1);

// in-place vector helpers for DoF arrays
void axpy(double a, const std::vector<double>& x, std::vector<double>& y);
double dot(const std::vector<double>& x, const std::vector<double>& y);
double norm2(const std::vector<double>& x);

}  // namespace splitdg
