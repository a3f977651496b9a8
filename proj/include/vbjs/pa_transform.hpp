#pragma once

#include <iosfwd>
#include <vector>

#include "vbjs/types.hpp"

namespace vbjs {

/// Periodic m-th order polynomial annihilation operator on a uniform grid.
///
/// Stored as a circulant stencil: (L f)_r = sum_i weight[i] * f[(r + offset[i]) mod Nx].
struct PAOperator {
  int m = 0;
  int Nx = 0;
  std::vector<int> offsets;
  std::vector<double> weights;

  Vector apply(const Vector& f) const;
  Vector apply_transpose(const Vector& z) const;
  Matrix dense() const;
  /// Eigenvalue of L on the DFT mode exp(2 pi i r j / Nx), r = 0..Nx-1.
  CVector symbol() const;
  /// |symbol|^2, the eigenvalues of L^T L.
  Vector gram_symbol() const;

  // Dimension-by-dimension action on an Nx x Ny array: along the first index
  // (x direction, each column) or the second index (y direction, each row).
  Matrix apply_x(const Matrix& f) const;
  Matrix apply_x_transpose(const Matrix& z) const;
  Matrix apply_y(const Matrix& f) const;
  Matrix apply_y_transpose(const Matrix& z) const;
};

/// c_j = m! / (prod_{k != j} (j - k) * dx), j = 1..m+1.
Vector uniform_pa_coeffs(int m, double dx);

PAOperator build_pa(int m, int Nx);

void write_dense_csv(std::ostream& os, const PAOperator& op);

}  // namespace vbjs
