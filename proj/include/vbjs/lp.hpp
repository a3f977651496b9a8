#pragma once

#include "vbjs/types.hpp"

namespace vbjs {

/// min c^T x  subject to  G x <= h, x free. Dense; sized for a few hundred
/// variables and a few thousand constraints.
struct LPProblem {
  Vector c;
  Matrix G;
  Vector h;
};

struct LPOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

enum class LPStatus { Optimal, Infeasible, MaxIter };

struct LPResult {
  Vector x;
  Vector s;  // slacks h - Gx
  Vector z;  // duals
  double objective = 0.0;
  int iterations = 0;
  LPStatus status = LPStatus::MaxIter;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
};

/// Primal-dual interior point, Mehrotra predictor-corrector, normal equations.
LPResult solve_lp(const LPProblem& lp, const LPOptions& opts = {});

}  // namespace vbjs
