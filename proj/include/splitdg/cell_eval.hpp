#pragma once

#include <array>
#include <vector>

#include "splitdg/space.hpp"
#include "splitdg/tensor.hpp"

namespace splitdg {

// Sum-factorized per-cell evaluation on the reference cell [-1,1]^dim for one
// scalar component. Uniform Cartesian mesh: one context serves every cell of
// a (space, rule) pair. Holds scratch buffers; use one instance per thread.
class CellEval {
 public:
  CellEval(const FunctionSpace& space, int n_q)
      : dim_(space.mesh().dim()),
        n_(space.n1d()),
        nq_(n_q),
        T_(&space.tables(n_q)) {
    const auto& m = space.mesh();
    jac_ = 1.0;
    for (int a = 0; a < dim_; ++a) {
      dx_[a] = m.dx()[a];
      jac_ *= 0.5 * dx_[a];
    }
    const int wmax = std::max(n_, nq_);
    work1_.resize(static_cast<std::size_t>(wmax) * wmax * wmax);
    work2_.resize(work1_.size());
    // tensor-product quadrature weights (volume, no jacobian)
    const auto& w = T_->rule.weights;
    qw_.resize(tensor::ipow(nq_, dim_));
    if (dim_ == 2) {
      for (int q1 = 0; q1 < nq_; ++q1)
        for (int q0 = 0; q0 < nq_; ++q0) qw_[q0 + nq_ * q1] = w[q0] * w[q1];
    } else {
      for (int q2 = 0; q2 < nq_; ++q2)
        for (int q1 = 0; q1 < nq_; ++q1)
          for (int q0 = 0; q0 < nq_; ++q0)
            qw_[q0 + nq_ * (q1 + nq_ * q2)] = w[q0] * w[q1] * w[q2];
    }
    fw_.resize(tensor::ipow(nq_, dim_ - 1));
    if (dim_ == 2) {
      for (int q0 = 0; q0 < nq_; ++q0) fw_[q0] = w[q0];
    } else {
      for (int q1 = 0; q1 < nq_; ++q1)
        for (int q0 = 0; q0 < nq_; ++q0) fw_[q0 + nq_ * q1] = w[q0] * w[q1];
    }
    // transposed tables (quadrature-major) for moment accumulation
    phi_t_.resize(T_->phi.size());
    dphi_t_.resize(T_->dphi.size());
    for (int i = 0; i < n_; ++i)
      for (int q = 0; q < nq_; ++q) {
        phi_t_[q * n_ + i] = T_->phi[i * nq_ + q];
        dphi_t_[q * n_ + i] = T_->dphi[i * nq_ + q];
      }
  }

  int dim() const { return dim_; }
  int n_nodes_1d() const { return n_; }
  int n_q_1d() const { return nq_; }
  int n_qpoints() const { return tensor::ipow(nq_, dim_); }
  int n_face_qpoints() const { return tensor::ipow(nq_, dim_ - 1); }
  int n_nodes() const { return tensor::ipow(n_, dim_); }
  double volume_jacobian() const { return jac_; }
  double face_jacobian(int axis) const {
    double j = 1.0;
    for (int a = 0; a < dim_; ++a)
      if (a != axis) j *= 0.5 * dx_[a];
    return j;
  }
  double dx(int axis) const { return dx_[axis]; }
  double deriv_scale(int axis) const { return 2.0 / dx_[axis]; }
  const std::vector<double>& qweights() const { return qw_; }
  const std::vector<double>& face_qweights() const { return fw_; }
  const QuadratureRule& rule() const { return T_->rule; }

  // ---- volume ----

  /// coefficients (n^dim) -> values at quadrature grid (nq^dim)
  void values(const double* c, double* out) {
    if (dim_ == 2) {
      tensor::contract(c, work1_.data(), 1, n_, n_, T_->phi.data(), nq_);
      tensor::contract(work1_.data(), out, nq_, n_, 1, T_->phi.data(), nq_);
    } else {
      tensor::contract(c, work1_.data(), 1, n_, n_ * n_, T_->phi.data(), nq_);
      tensor::contract(work1_.data(), work2_.data(), nq_, n_, n_, T_->phi.data(), nq_);
      tensor::contract(work2_.data(), out, nq_ * nq_, n_, 1, T_->phi.data(), nq_);
    }
  }

  /// reference-coordinate derivative along `axis` at the quadrature grid
  void ref_deriv(const double* c, int axis, double* out) {
    const double* t0 = axis == 0 ? T_->dphi.data() : T_->phi.data();
    const double* t1 = axis == 1 ? T_->dphi.data() : T_->phi.data();
    if (dim_ == 2) {
      tensor::contract(c, work1_.data(), 1, n_, n_, t0, nq_);
      tensor::contract(work1_.data(), out, nq_, n_, 1, t1, nq_);
    } else {
      const double* t2 = axis == 2 ? T_->dphi.data() : T_->phi.data();
      tensor::contract(c, work1_.data(), 1, n_, n_ * n_, t0, nq_);
      tensor::contract(work1_.data(), work2_.data(), nq_, n_, n_, t1, nq_);
      tensor::contract(work2_.data(), out, nq_ * nq_, n_, 1, t2, nq_);
    }
  }

  /// physical derivative along `axis`
  void phys_deriv(const double* c, int axis, double* out) {
    ref_deriv(c, axis, out);
    const double s = deriv_scale(axis);
    const int nqd = n_qpoints();
    for (int q = 0; q < nqd; ++q) out[q] *= s;
  }

  /// m[node] += sum_q fw[q] * phi_node(q); fw carries integrand * weights * jacobian
  void moments_add(const double* fw, double* m) {
    if (dim_ == 2) {
      tensor::contract(fw, work1_.data(), 1, nq_, nq_, phi_t_.data(), n_);
      tensor::contract_add(work1_.data(), m, n_, nq_, 1, phi_t_.data(), n_);
    } else {
      tensor::contract(fw, work1_.data(), 1, nq_, nq_ * nq_, phi_t_.data(), n_);
      tensor::contract(work1_.data(), work2_.data(), n_, nq_, nq_, phi_t_.data(), n_);
      tensor::contract_add(work2_.data(), m, n_ * n_, nq_, 1, phi_t_.data(), n_);
    }
  }

  /// m[node] += sum_q fw[q] * d(phi_node)/dxi_axis (q); reference derivative
  void deriv_moments_add(const double* fw, int axis, double* m) {
    const double* t0 = axis == 0 ? dphi_t_.data() : phi_t_.data();
    const double* t1 = axis == 1 ? dphi_t_.data() : phi_t_.data();
    if (dim_ == 2) {
      tensor::contract(fw, work1_.data(), 1, nq_, nq_, t0, n_);
      tensor::contract_add(work1_.data(), m, n_, nq_, 1, t1, n_);
    } else {
      const double* t2 = axis == 2 ? dphi_t_.data() : phi_t_.data();
      tensor::contract(fw, work1_.data(), 1, nq_, nq_ * nq_, t0, n_);
      tensor::contract(work1_.data(), work2_.data(), n_, nq_, nq_, t1, n_);
      tensor::contract_add(work2_.data(), m, n_ * n_, nq_, 1, t2, n_);
    }
  }

  // ---- faces (normal axis `axis`, side 0: xi_axis = -1, side 1: +1) ----
  // Face quadrature grids of neighboring Cartesian cells coincide point by
  // point, so no index permutation is needed across a face.

  void face_values(const double* c, int axis, int side, double* out) {
    face_trace(c, axis, T_->phi_end[side].data(), out);
  }

  /// reference derivative along deriv_axis, traced onto the face
  void face_ref_deriv(const double* c, int axis, int side, int deriv_axis, double* out) {
    if (deriv_axis == axis) {
      face_trace(c, axis, T_->dphi_end[side].data(), out);
    } else {
      face_trace_deriv_tangential(c, axis, side, deriv_axis, out);
    }
  }

  /// m[node] += sum_{face q} fw[q] * phi_node(face q)
  void face_moments_add(const double* fw, int axis, int side, double* m) {
    face_scatter(fw, axis, T_->phi_end[side].data(), nullptr, m);
  }

  /// m[node] += sum_{face q} fw[q] * d(phi_node)/dxi_deriv_axis (face q)
  void face_deriv_moments_add(const double* fw, int axis, int side, int deriv_axis, double* m) {
    if (deriv_axis == axis) {
      face_scatter(fw, axis, T_->dphi_end[side].data(), nullptr, m);
    } else {
      face_scatter(fw, axis, T_->phi_end[side].data(), &deriv_axis, m);
    }
  }

 private:
  // contract the normal axis with an endpoint vector, interpolate the rest
  void face_trace(const double* c, int axis, const double* end, double* out) {
    // endpoint vector as a (n_c = n, n_to = 1) table
    if (dim_ == 2) {
      const int other = 1 - axis;
      (void)other;
      if (axis == 0) {
        tensor::contract(c, work1_.data(), 1, n_, n_, end, 1);  // -> [i1]
        tensor::contract(work1_.data(), out, 1, n_, 1, T_->phi.data(), nq_);
      } else {
        tensor::contract(c, work1_.data(), n_, n_, 1, end, 1);  // -> [i0]
        tensor::contract(work1_.data(), out, 1, n_, 1, T_->phi.data(), nq_);
      }
    } else {
      if (axis == 0) {
        tensor::contract(c, work1_.data(), 1, n_, n_ * n_, end, 1);  // [i2][i1]
      } else if (axis == 1) {
        tensor::contract(c, work1_.data(), n_, n_, n_, end, 1);  // [i2][i0]
      } else {
        tensor::contract(c, work1_.data(), n_ * n_, n_, 1, end, 1);  // [i1][i0]
      }
      tensor::contract(work1_.data(), work2_.data(), 1, n_, n_, T_->phi.data(), nq_);
      tensor::contract(work2_.data(), out, nq_, n_, 1, T_->phi.data(), nq_);
    }
  }

  void face_trace_deriv_tangential(const double* c, int axis, int side, int deriv_axis,
                                   double* out) {
    const double* end = T_->phi_end[side].data();
    if (dim_ == 2) {
      if (axis == 0) {
        tensor::contract(c, work1_.data(), 1, n_, n_, end, 1);
      } else {
        tensor::contract(c, work1_.data(), n_, n_, 1, end, 1);
      }
      tensor::contract(work1_.data(), out, 1, n_, 1, T_->dphi.data(), nq_);
    } else {
      if (axis == 0) {
        tensor::contract(c, work1_.data(), 1, n_, n_ * n_, end, 1);  // [i2][i1]
      } else if (axis == 1) {
        tensor::contract(c, work1_.data(), n_, n_, n_, end, 1);  // [i2][i0]
      } else {
        tensor::contract(c, work1_.data(), n_ * n_, n_, 1, end, 1);  // [i1][i0]
      }
      // tangential axes of the slab, ascending order; pick which gets dphi
      int tang[2], ti = 0;
      for (int a = 0; a < 3; ++a)
        if (a != axis) tang[ti++] = a;
      const double* t0 = tang[0] == deriv_axis ? T_->dphi.data() : T_->phi.data();
      const double* t1 = tang[1] == deriv_axis ? T_->dphi.data() : T_->phi.data();
      tensor::contract(work1_.data(), work2_.data(), 1, n_, n_, t0, nq_);
      tensor::contract(work2_.data(), out, nq_, n_, 1, t1, nq_);
    }
  }

  // scatter face-quadrature data back to cell moments; if deriv_tang is set,
  // the corresponding tangential axis uses the derivative table
  void face_scatter(const double* fw, int axis, const double* end, const int* deriv_tang,
                    double* m) {
    if (dim_ == 2) {
      const int tang = axis == 0 ? 1 : 0;
      const double* tt =
          (deriv_tang && *deriv_tang == tang) ? dphi_t_.data() : phi_t_.data();
      tensor::contract(fw, work1_.data(), 1, nq_, 1, tt, n_);  // -> [i_tang]
      // expand the normal axis with the endpoint vector (n_c = 1, n_to = n)
      if (axis == 0) {
        tensor::contract_add(work1_.data(), m, 1, 1, n_, end, n_);
      } else {
        tensor::contract_add(work1_.data(), m, n_, 1, 1, end, n_);
      }
    } else {
      int tang[2], ti = 0;
      for (int a = 0; a < 3; ++a)
        if (a != axis) tang[ti++] = a;
      const double* t0 =
          (deriv_tang && *deriv_tang == tang[0]) ? dphi_t_.data() : phi_t_.data();
      const double* t1 =
          (deriv_tang && *deriv_tang == tang[1]) ? dphi_t_.data() : phi_t_.data();
      tensor::contract(fw, work1_.data(), 1, nq_, nq_, t0, n_);
      tensor::contract(work1_.data(), work2_.data(), n_, nq_, 1, t1, n_);  // [i_t1][i_t0]
      if (axis == 0) {
        tensor::contract_add(work2_.data(), m, 1, 1, n_ * n_, end, n_);
      } else if (axis == 1) {
        tensor::contract_add(work2_.data(), m, n_, 1, n_, end, n_);
      } else {
        tensor::contract_add(work2_.data(), m, n_ * n_, 1, 1, end, n_);
      }
    }
  }

  int dim_, n_, nq_;
  const BasisTables* T_;
  std::array<double, 3> dx_{1, 1, 1};
  double jac_ = 1.0;
  std::vector<double> work1_, work2_, qw_, fw_;
  std::vector<double> phi_t_, dphi_t_;
};

}  // namespace splitdg
