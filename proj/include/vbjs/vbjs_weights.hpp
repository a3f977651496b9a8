#pragma once

#include <iosfwd>
#include <vector>

#include "vbjs/types.hpp"

namespace vbjs {

/// s * min |a_j| when every a_j has the same nonzero sign s, else 0.
double minmod(const Eigen::Ref<const Vector>& a);

/// Row-wise minmod of the joint sparsity matrix P (Nx x J).
Vector build_S(const Matrix& P);
/// Row-wise population variance of P.
Vector variance_vector(const Matrix& P);

/// Literal: w = c on detected cells (T >= tau), 1 - T elsewhere.
/// PenalizeSmooth: w = 1 - T on detected cells, c elsewhere, so the penalty
/// is relaxed where the edge maps agree on a jump.
enum class WeightRule { Literal, PenalizeSmooth };

struct WeightVector {
  Vector w;
  int c = 0;
  double tau = 0.0;
  WeightRule rule = WeightRule::Literal;
  Vector S;
  Vector v;
  Vector T;
  bool degenerate = false;

  /// Indices with T >= tau.
  std::vector<int> detected() const;
};

WeightVector build_weights(const Matrix& P, double tau, WeightRule rule = WeightRule::Literal);

/// m_i = 1 if w_i >= tau_tilde else 0.
Vector build_mask(const Vector& w, double tau_tilde = 1.0);
inline Vector build_mask(const WeightVector& wv, double tau_tilde = 1.0) {
  return build_mask(wv.w, tau_tilde);
}

Matrix combine_2d(const Matrix& wx, const Matrix& wy);

/// argmin_j sum_i ||g_i - g_j||_2, smallest index on ties. Returns 0-based j.
int select_best(const std::vector<Vector>& edges);
int select_best(const Matrix& P);

void write_weights_csv(std::ostream& os, const Vector& w);
void write_weights_csv(std::ostream& os, const Matrix& w);

}  // namespace vbjs
