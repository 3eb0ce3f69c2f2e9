#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace splitdg {

/// Row-major dense matrix for small local problems (coefficient solves,
/// 1D mass inverses). Not meant for global systems.
struct DenseMatrix {
  int rows = 0, cols = 0;
  std::vector<double> a;
  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

/// Gaussian elimination with partial pivoting; A is consumed.
inline std::vector<double> solve_dense(DenseMatrix A, std::vector<double> b) {
  const int n = A.rows;
  if (A.cols != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_dense: shape mismatch");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(piv, k))) piv = i;
    if (A(piv, k) == 0.0) throw std::runtime_error("solve_dense: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = A(i, k) / A(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

inline DenseMatrix invert_dense(const DenseMatrix& A) {
  const int n = A.rows;
  DenseMatrix inv(n, n);
  for (int col = 0; col < n; ++col) {
    std::vector<double> e(n, 0.0);
    e[col] = 1.0;
    const auto x = solve_dense(A, e);
    for (int i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

}  // namespace splitdg
