#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vbjs/cf_edge.hpp"
#include "vbjs/icf_design.hpp"
#include "vbjs/solvers.hpp"
#include "vbjs/vbjs_weights.hpp"

namespace vbjs {

enum class Method { CfVbjsMmv, CfVbjsSmv, VbjsBaseline, CfVbjs2d, Masked };

Method parse_method(const std::string& s);
std::string to_string(Method m);

struct PipelineConfig {
  Method method = Method::CfVbjsMmv;
  /// Exponential orders. MMV: one per measurement, or a single order shared by
  /// all. SMV and masked: one edge map per order.
  std::vector<double> alphas{8.0};
  /// MMV only: design one factor per distinct missing-band mask.
  bool use_icf = false;
  ICFParams icf;  // deltas; N and K are filled in per measurement
  /// Explicit factors, used instead of alphas and use_icf when non-empty.
  /// MMV takes one per measurement.
  std::vector<ConcentrationFactor> factors;
  int m = 2;
  int p = 1;
  double tau = 0.0;  // 0 selects 1/N
  double tau_tilde = 1.0;
  WeightRule rule = WeightRule::PenalizeSmooth;
  SolverOpts solver;
  double fidelity_weight = 0.0;  // 0 selects the per-problem default
  /// Baseline: number of classic l1 approximations (0 = one per measurement)
  /// and the lambda for them (0 = default heuristic).
  int baseline_J = 0;
  double lambda = 0.0;

  double tau_for(int N) const { return tau > 0.0 ? tau : 1.0 / N; }
};

std::vector<double> default_alphas(int J);  // 2, 4, ..., 2J

struct PipelineResult {
  Vector recon;
  WeightVector weights;
  Vector applied_weights;  // what the final solve used (mask for Masked)
  Matrix P;
  int j_star = 0;
  std::vector<ConcentrationFactor> factors;
  SolveResult solve;
  int icf_fallbacks = 0;
};

struct PipelineResult2D {
  Matrix recon;
  Matrix W;
  WeightVector wx;
  WeightVector wy;
  int j_star = 0;
  SolveResult2D solve;
};

PipelineResult run_cf_vbjs_mmv(const MeasurementSet& ms, const PipelineConfig& cfg);
PipelineResult run_cf_vbjs_smv(const FourierData& data, const PipelineConfig& cfg);
PipelineResult run_masked(const FourierData& data, const PipelineConfig& cfg);
PipelineResult run_vbjs_baseline(const MeasurementSet& ms, const PipelineConfig& cfg);
/// Dispatch on cfg.method (1D methods only). SMV and masked use ms.front().
PipelineResult run_pipeline(const MeasurementSet& ms, const PipelineConfig& cfg);

PipelineResult2D run_cf_vbjs_2d(const MeasurementSet2D& ms, const PipelineConfig& cfg);
/// J classic l1 solves in 2D, PA edges along both axes, weights, final solve.
PipelineResult2D run_vbjs_baseline_2d(const MeasurementSet2D& ms, const PipelineConfig& cfg);

/// Raised-cosine filter (1 + cos(pi |k| / N)) / 2.
double raised_cosine(int k, int N);
/// Filtered Fourier partial sum on the grid, unknown coefficients dropped.
Vector filtered_fourier_sum(const FourierData& data);
Matrix filtered_fourier_sum_2d(const FourierData2D& data);

}  // namespace vbjs
