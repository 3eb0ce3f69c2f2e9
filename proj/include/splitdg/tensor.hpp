#pragma once

#include <cstddef>

namespace splitdg::tensor {

// One tensor-contraction pass along a single axis of a dim<=3 array stored
// x-fastest. The input is viewed as [n_post][n_c][n_pre]; the contracted axis
// is replaced by n_to entries:
//   out[p][t][r] = sum_c in[p][c][r] * tab[c * n_to + t]
// All sum-factorized evaluations (volume values/derivatives, face traces,
// moment accumulation) are compositions of this kernel.
inline void contract(const double* in, double* out, int n_pre, int n_c,
                     int n_post, const double* tab, int n_to) {
  if (n_pre == 1) {
    // contraction along the fastest axis: micro-GEMM, vectorizes over t
    for (int p = 0; p < n_post; ++p) {
      double* ob = out + static_cast<std::size_t>(p) * n_to;
      for (int t = 0; t < n_to; ++t) ob[t] = 0.0;
      const double* ib = in + static_cast<std::size_t>(p) * n_c;
      for (int c = 0; c < n_c; ++c) {
        const double v = ib[c];
        const double* trow = tab + static_cast<std::size_t>(c) * n_to;
        for (int t = 0; t < n_to; ++t) ob[t] += v * trow[t];
      }
    }
    return;
  }
  for (int p = 0; p < n_post; ++p) {
    double* ob = out + static_cast<std::size_t>(p) * n_to * n_pre;
    for (int i = 0; i < n_to * n_pre; ++i) ob[i] = 0.0;
    const double* ib = in + static_cast<std::size_t>(p) * n_c * n_pre;
    for (int c = 0; c < n_c; ++c) {
      const double* iv = ib + static_cast<std::size_t>(c) * n_pre;
      const double* trow = tab + static_cast<std::size_t>(c) * n_to;
      for (int t = 0; t < n_to; ++t) {
        const double w = trow[t];
        double* ov = ob + static_cast<std::size_t>(t) * n_pre;
        for (int r = 0; r < n_pre; ++r) ov[r] += w * iv[r];
      }
    }
  }
}

// Same as contract() but accumulates into out instead of overwriting.
inline void contract_add(const double* in, double* out, int n_pre, int n_c,
                         int n_post, const double* tab, int n_to) {
  if (n_pre == 1) {
    for (int p = 0; p < n_post; ++p) {
      double* ob = out + static_cast<std::size_t>(p) * n_to;
      const double* ib = in + static_cast<std::size_t>(p) * n_c;
      for (int c = 0; c < n_c; ++c) {
        const double v = ib[c];
        const double* trow = tab + static_cast<std::size_t>(c) * n_to;
        for (int t = 0; t < n_to; ++t) ob[t] += v * trow[t];
      }
    }
    return;
  }
  for (int p = 0; p < n_post; ++p) {
    double* ob = out + static_cast<std::size_t>(p) * n_to * n_pre;
    const double* ib = in + static_cast<std::size_t>(p) * n_c * n_pre;
    for (int c = 0; c < n_c; ++c) {
      const double* iv = ib + static_cast<std::size_t>(c) * n_pre;
      const double* trow = tab + static_cast<std::size_t>(c) * n_to;
      for (int t = 0; t < n_to; ++t) {
        const double w = trow[t];
        double* ov = ob + static_cast<std::size_t>(t) * n_pre;
        for (int r = 0; r < n_pre; ++r) ov[r] += w * iv[r];
      }
    }
  }
}

inline int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace splitdg::tensor
