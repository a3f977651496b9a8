#pragma once

#include <set>

#include "vbjs/cf_edge.hpp"
#include "vbjs/lp.hpp"

namespace vbjs {

struct ICFParams {
  int N = 64;
  std::set<int> K;  // missing |k|, subset of 1..N
  double delta1 = 1e-3;
  double delta2 = 0.35;
  double delta3 = 1e-3;
  double delta4 = 1e-6;
  Grid1D grid;  // defaults to Grid1D::standard(N) when Nx == 0

  static ICFParams defaults(int N, std::set<int> K = {});
};

struct KernelTable {
  int q = 0;
  Vector values;
};

/// W_q(x) = 1/(2 pi i^q) sum_{0<|k|<=N} sgn(k) k^-(q+1) sigma_|k| exp(ikx), real part.
KernelTable w_kernel(const ConcentrationFactor& cf, int q, const Grid1D& grid);
/// W_0(x) = (1/pi) sum_{k=1}^N sigma_k cos(kx) / k.
double w0_cosine(const ConcentrationFactor& cf, double x);
/// || W_0 ||_1 over the grid.
double w0_l1(const ConcentrationFactor& cf, const Grid1D& grid);

struct DesignReport {
  double objective = 0.0;          // || W_0 ||_1 over the grid
  double jump_violation = 0.0;     // max(0, |W_0(0) - 1| - delta1)
  double far_violation = 0.0;      // max(0, max_{|x|>=delta2} |W_0| - delta3)
  double band_violation = 0.0;     // max(0, max_{k in K} |sigma_k| - delta4)
  int iterations = 0;
  LPStatus status = LPStatus::MaxIter;

  double max_violation() const;
};

struct DesignResult {
  ConcentrationFactor cf;
  DesignReport report;
};

/// Evaluates the design constraints for any factor.
DesignReport evaluate_design(const ConcentrationFactor& cf, const ICFParams& params);

/// Minimizes ||W_0||_1 subject to the jump-height, far-field and missing-band
/// constraints. Throws InfeasibleError when no such factor exists.
DesignResult design_icf(const ICFParams& params, const LPOptions& opts = {});

}  // namespace vbjs
