#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "vbjs/config.hpp"
#include "vbjs/pipelines.hpp"
#include "vbjs/svg.hpp"

namespace vbjs::experiments {

/// CSV body; the writer prepends "# experiment=..." and "# config_hash=..." lines.
struct CsvTable {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Output {
  std::vector<CsvTable> tables;
  std::vector<std::pair<std::string, svg::Plot>> plots;  // file name, plot
  /// Non-reproducible facts (wall times); these go to the metadata file.
  std::vector<std::pair<std::string, std::string>> meta;
};

/// Pipeline knobs shared by every experiment: m, p, tau, tau_tilde, rule,
/// rho, tol, max_iter, fidelity_weight, alphas, delta1..delta4, lambda.
PipelineConfig pipeline_config(const Config& cfg);
std::vector<std::string> pipeline_keys();

/// One reconstruction scored three ways.
struct Scores {
  double total = 0.0;
  double smooth = 0.0;
  double abs_at = 0.0;
};

/// Per-trial record of a sweep; x is the sweep coordinate (Nx, SNR, gamma, ...).
struct TrialRow {
  double x = 0.0;
  int trial = 0;
  std::string method;
  int p = 1;
  Scores s;
};

struct Summary {
  double x = 0.0;
  std::string method;
  int p = 1;
  int count = 0;
  Scores median;
  Scores mean;
};

/// Grouped by (x, method, p), sorted by x then method then p.
std::vector<Summary> summarize(const std::vector<TrialRow>& rows);
const Summary* find(const std::vector<Summary>& s, double x, const std::string& method, int p);

// ---------------------------------------------------------------------------
// Missing-band example with J = 4 masks K_j.

struct Table1Params {
  int N = 64;
  int J = 4;
  PipelineConfig base;  // alphas 2, 4, ..., 2J
  static Table1Params from_config(const Config& cfg);
};

struct Table1Row {
  std::string label;  // "CF VBJS l1" ...
  bool icf = false;
  int p = 1;
  Scores s;
  int j_star = 0;
  int iterations = 0;
  double seconds = 0.0;
};

std::vector<Table1Row> run_table1(const Table1Params& prm);

// ---------------------------------------------------------------------------
// Ramp from noisy data, error versus Nx.

struct ConvergenceParams {
  std::vector<int> nxs{8, 16, 32, 64, 128, 256, 512};
  int trials = 50;
  double snr = 5.0;
  int J = 10;             // MMV measurements and SMV factor count
  double mmv_alpha = 8.0;
  int baseline_J = 10;
  std::vector<std::string> methods{"cf_mmv", "cf_smv", "baseline", "masked"};
  std::vector<int> ps{1, 2};
  std::string region = "left_smooth";
  PipelineConfig base;
  std::uint64_t seed = 1;
  int workers = 1;
  static ConvergenceParams from_config(const Config& cfg);
};

std::vector<TrialRow> run_convergence(const ConvergenceParams& prm);

// ---------------------------------------------------------------------------
// Single measurement, error versus SNR at fixed Nx.

struct SnrParams {
  int N = 64;
  std::vector<double> snrs;  // defaults to 10, 9, ..., -10
  int trials = 50;
  int J = 10;
  std::vector<std::string> methods{"cf_smv", "baseline", "masked"};
  std::vector<int> ps{1, 2};
  std::string region = "left_smooth";
  PipelineConfig base;
  std::uint64_t seed = 1;
  int workers = 1;
  static SnrParams from_config(const Config& cfg);
};

std::vector<TrialRow> run_snr_sweep(const SnrParams& prm);

// ---------------------------------------------------------------------------
// 2D scene, cross section at y = 0.

struct Table2Params {
  int N = 64;
  int J = 10;
  double snr = -10.0;
  int trials = 20;
  bool baseline = false;  // the 2D classic-l1 baseline is slow
  PipelineConfig base;
  std::uint64_t seed = 1;
  int workers = 1;
  static Table2Params from_config(const Config& cfg);
};

/// Methods "cf_vbjs", "vbjs" (when enabled) and "ifft"; x is unused (0).
std::vector<TrialRow> run_table2(const Table2Params& prm);

// ---------------------------------------------------------------------------
// Random fraction gamma of coefficients removed from each of J measurements.

struct BandFractionParams {
  int N = 64;
  int J = 4;
  std::vector<double> gammas;  // defaults to 0.05, 0.10, ..., 0.95
  int trials = 10;
  int bandwidth = 1;
  std::vector<int> ps{1, 2};
  PipelineConfig base;
  std::uint64_t seed = 1;
  int workers = 1;
  static BandFractionParams from_config(const Config& cfg);
};

/// Methods "cf" and "icf".
std::vector<TrialRow> run_band_fraction(const BandFractionParams& prm);

// ---------------------------------------------------------------------------
// Equally spaced missing bands of width b, pointwise log error.

struct MissingBandParams {
  int N = 64;
  int J = 4;
  std::vector<int> widths{2, 4, 6, 8, 10, 12, 14, 16};
  std::vector<std::string> methods{"baseline", "cf", "icf"};
  std::vector<int> ps{1, 2};
  PipelineConfig base;
  int workers = 1;
  static MissingBandParams from_config(const Config& cfg);
};

struct MissingBandResult {
  int b = 0;
  std::string method;
  int p = 1;
  Scores s;
  Vector log_error;  // per grid point
};

std::vector<MissingBandResult> run_missing_band_sweep(const MissingBandParams& prm);

// ---------------------------------------------------------------------------
// Wall-clock comparison of the CF pipeline and the classic-l1 baseline.

struct EfficiencyParams {
  std::vector<int> nxs{8, 16, 32, 64, 128, 256, 512, 1024};
  int J = 10;
  int fixed_nx = 128;
  std::vector<int> js;  // defaults to 2..20
  int reps = 5;
  bool icf = true;
  int icf_max_nx = 256;
  PipelineConfig base;
  static EfficiencyParams from_config(const Config& cfg);
};

struct TimingRow {
  std::string sweep;   // "nx" or "J"
  int nx = 0;
  int J = 0;
  std::string method;  // "cf" | "icf" | "baseline"
  int p = 1;
  double seconds = 0.0;  // median of reps
};

/// Noiseless ramp, single measurement. "cf" is the SMV pipeline with J
/// exponential factors, "icf" uses J designed factors (design time included),
/// "baseline" runs J classic l1 solves plus the final weighted solve.
std::vector<TimingRow> run_efficiency(const EfficiencyParams& prm);
double time_method(const std::string& method, int nx, int J, int p, const PipelineConfig& base,
                   int reps);

// ---------------------------------------------------------------------------

/// Runs one pipeline from a config (signal, N, J, snr, bands, method ...).
struct ReconBundle {
  Grid1D grid;
  Vector truth;
  PipelineResult result;
  Scores s;
  double seconds = 0.0;
};
ReconBundle run_recon(const Config& cfg);
std::vector<std::string> recon_keys();

/// Dispatch by name: table1 table2 convergence snr_sweep missing_band_sweep
/// band_fraction efficiency custom.
Output run_named(const std::string& name, const Config& cfg, int workers);
const std::vector<std::string>& names();

/// Writes tables, plots and <name>.meta into dir (created if needed).
/// Returns the paths written.
std::vector<std::string> write_output(const Output& out, const std::string& name,
                                      const Config& cfg, const std::string& dir,
                                      double elapsed_seconds);

}  // namespace vbjs::experiments
