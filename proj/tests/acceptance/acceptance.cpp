// Acceptance checks, one line per criterion:
//   criterion <n>: PASS|FAIL [<seconds> s] <measured values and tolerances>
// Exit status is 0 unless a check throws. --strict also exits 1 on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vbjs/bench.hpp"
#include "vbjs/experiments.hpp"
#include "vbjs/icf_design.hpp"
#include "vbjs/metrics.hpp"
#include "vbjs/pa_transform.hpp"

namespace fs = std::filesystem;
using namespace vbjs;
using namespace vbjs::experiments;

namespace {

// Tolerances and budgets.
constexpr double kTable1Factor = 3.0;
constexpr double kTable1IcfSmooth = 0.01;
constexpr double kTable1Seconds = 60.0;
constexpr double kAnnihilationTol = 1e-10;
constexpr double kAppendixSeconds = 1.0;
constexpr double kKernelTol = 1e-12;
constexpr double kKernelSeconds = 1.0;
constexpr double kDesignTol = 1e-8;
constexpr double kDesignObjectiveRel = 0.01;
constexpr double kDesignSeconds = 300.0;
constexpr int kConvergenceFromNx = 16;
constexpr int kConvergenceP1FromNx = 64;
constexpr double kConvergenceSeconds = 600.0;
constexpr int kEfficiencyNx = 128;
constexpr int kEfficiencyJ = 10;
constexpr double kEfficiencyRatio = 2.0;
constexpr double kCfGrowthMax = 1.5;
constexpr double kBaselineGrowthMin = 3.0;
constexpr double kTable2WinFraction = 0.9;
constexpr double kTable2Median = 0.20;
constexpr double kTable2Seconds = 900.0;
constexpr double kBandGammaMax = 0.5;
constexpr double kBandSeconds = 1200.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

std::string g4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double median_of(std::vector<double> v) { return bench::median(std::move(v)); }

// --- 1 ---------------------------------------------------------------------

void table1(Outcome& o, double& seconds) {
  struct Reference {
    double total, smooth, abs_at;
  };
  const std::map<std::string, Reference> reference{{"CF VBJS l1", {0.3325, 0.0173, 0.2859}},
                                           {"ICF VBJS l1", {0.2215, 0.0010, 0.0082}},
                                           {"CF VBJS l2", {0.2680, 0.0310, 0.1617}},
                                           {"ICF VBJS l2", {0.2176, 0.0036, 0.0371}}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_table1(Table1Params::from_config(Config{}));
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::map<std::string, Scores> got;
  for (const auto& r : rows) got[r.label] = r.s;

  int within = 0, entries = 0;
  for (const auto& [label, ref] : reference) {
    const Scores& s = got.at(label);
    o.detail << " " << label << "=(" << g4(s.total) << "," << g4(s.smooth) << "," << g4(s.abs_at)
             << ")";
    const double have[] = {s.total, s.smooth, s.abs_at};
    const double want[] = {ref.total, ref.smooth, ref.abs_at};
    const char* col[] = {"total", "smooth", "abs"};
    for (int c = 0; c < 3; ++c) {
      ++entries;
      const bool ok = have[c] <= kTable1Factor * want[c] && have[c] >= want[c] / kTable1Factor;
      within += ok;
      o.require(ok, label + " " + col[c] + " " + g4(have[c]) + " vs reference " + g4(want[c]) +
                        " (factor " + g4(kTable1Factor) + ")");
    }
  }
  o.detail << "; " << within << "/" << entries << " entries within factor " << g4(kTable1Factor);
  for (const char* p : {"l1", "l2"}) {
    const Scores& cf = got.at(std::string("CF VBJS ") + p);
    const Scores& icf = got.at(std::string("ICF VBJS ") + p);
    o.require(icf.total < cf.total, std::string("ICF < CF total, ") + p);
    o.require(icf.smooth < cf.smooth, std::string("ICF < CF smooth, ") + p);
    o.require(icf.abs_at < cf.abs_at, std::string("ICF < CF abs, ") + p);
    o.require(icf.smooth <= kTable1IcfSmooth,
              std::string("ICF smooth <= ") + g4(kTable1IcfSmooth) + ", " + p);
  }
  o.require(seconds < kTable1Seconds, "runtime < " + g4(kTable1Seconds) + " s");
}

// --- 2 ---------------------------------------------------------------------

void appendix(Outcome& o, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  Matrix L1 = Matrix::Zero(5, 5);
  for (int r = 0; r < 4; ++r) {
    L1(r, r) = 1;
    L1(r, r + 1) = -1;
  }
  L1(4, 0) = -1;
  L1(4, 4) = 1;
  o.require(build_pa(1, 5).dense() == L1, "L1 (Nx=5) entrywise");

  // First, second and last reference rows; reference rows 4 and 5 each
  // carry a +1 where the circulant structure (zero row sums) needs -1.
  const double first[] = {3, -3, 1, 0, 0, -1};
  const double second[] = {-1, 3, -3, 1, 0, 0};
  const double last[] = {-3, 1, 0, 0, -1, 3};
  const Matrix L3 = build_pa(3, 6).dense();
  bool l3 = true;
  for (int c = 0; c < 6; ++c) {
    l3 &= L3(0, c) == 0.5 * first[c] && L3(1, c) == 0.5 * second[c] && L3(5, c) == 0.5 * last[c];
    for (int r = 0; r < 6; ++r) l3 &= L3(r, c) == 0.5 * first[(c - r + 6) % 6];
  }
  o.require(l3, "L3 (Nx=6) entrywise");
  o.detail << " L1 and L3 entrywise " << (l3 ? "equal" : "differ")
           << " (reference L3 rows 4-5 carry sign errors, compared by circulance)";

  double worst = 0.0;
  for (int m = 1; m <= 6; ++m) {
    const PAOperator op = build_pa(m, 64);
    const Grid1D g = Grid1D::standard(32);
    for (int deg = 0; deg < m; ++deg) {
      Vector f(g.Nx);
      for (int j = 0; j < g.Nx; ++j) f(j) = std::pow(g.x(j) + 0.3, deg);
      const Vector Lf = op.apply(f);
      double wsum = 0.0;
      for (double w : op.weights) wsum += std::abs(w);
      const double scale = f.cwiseAbs().maxCoeff() * wsum;
      for (int r = 0; r < g.Nx; ++r) {
        bool inner = true;
        for (int off : op.offsets) inner &= r + off >= 0 && r + off < g.Nx;
        if (inner) worst = std::max(worst, std::abs(Lf(r)) / scale);
      }
    }
  }
  o.detail << "; annihilation max relative residual " << g4(worst) << " (tol "
           << g4(kAnnihilationTol) << ")";
  o.require(worst <= kAnnihilationTol, "polynomial annihilation");
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(seconds < kAppendixSeconds, "runtime < 1 s");
}

// --- 3 ---------------------------------------------------------------------

void kernel(Outcome& o, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const int N = 64;
  const FourierData ramp = ramp_exact_coeffs(N);
  std::vector<std::pair<std::string, ConcentrationFactor>> cfs;
  for (double a : {2.0, 8.0}) cfs.emplace_back("exp" + g4(a), exponential_cf(N, a));
  cfs.emplace_back("icf_K1", design_icf(ICFParams::defaults(N, example_band(1, N))).cf);
  cfs.emplace_back("icf_none", design_icf(ICFParams::defaults(N)).cf);
  double worst = 0.0;
  for (const auto& [name, cf] : cfs) {
    const Vector w0 = w_kernel(cf, 0, ramp.grid).values;
    for (EdgeMethod em : {EdgeMethod::Direct, EdgeMethod::Fft}) {
      const double d = (w0 - concentration_edge(ramp, cf, em).values).cwiseAbs().maxCoeff();
      worst = std::max(worst, d);
      o.require(d <= kKernelTol, name + " differs by " + g4(d));
    }
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << " max |W_0 - edge map| " << g4(worst) << " over " << cfs.size()
           << " factors, both edge methods (tol " << g4(kKernelTol) << ")";
  o.require(seconds < kKernelSeconds, "runtime < 1 s");
}

// --- 4 ---------------------------------------------------------------------

void design(Outcome& o, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_violation = 0.0, worst_obj = 0.0;
  const LPOptions opts;
  LPOptions longrun;
  longrun.max_iter = 10 * opts.max_iter;
  longrun.tol = 1e-12;
  for (int j = 1; j <= 4; ++j) {
    const ICFParams prm = ICFParams::defaults(64, example_band(j, 64));
    const DesignResult d = design_icf(prm, opts);
    const DesignReport r = evaluate_design(d.cf, prm);
    worst_violation = std::max(worst_violation, r.max_violation());
    o.require(r.max_violation() <= kDesignTol, "K" + std::to_string(j) + " violation " +
                                                   g4(r.max_violation()));
    const DesignResult ref = design_icf(prm, longrun);
    const double rel = std::abs(d.report.objective - ref.report.objective) / ref.report.objective;
    worst_obj = std::max(worst_obj, rel);
    o.require(rel <= kDesignObjectiveRel, "K" + std::to_string(j) + " objective off by " + g4(rel));
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << " max constraint violation " << g4(worst_violation) << " (tol " << g4(kDesignTol)
           << "), max objective gap to reference " << g4(worst_obj) << " (tol "
           << g4(kDesignObjectiveRel) << ")";
  o.require(seconds < kDesignSeconds, "runtime < 300 s");
}

// --- 5 ---------------------------------------------------------------------

void convergence(Outcome& o, double& seconds, int workers) {
  auto prm = ConvergenceParams::from_config(Config{});
  prm.workers = workers;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sums = summarize(run_convergence(prm));
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto med = [&](int nx, const std::string& m, int p) {
    const Summary* s = find(sums, nx, m, p);
    if (!s) throw Error("missing summary for " + m);
    return s->median.total;
  };
  for (const char* m : {"cf_mmv", "cf_smv"}) {
    o.detail << " " << m << " p=1:";
    double prev = 1e300;
    for (int nx : prm.nxs) {
      const double v = med(nx, m, 1);
      o.detail << " " << g4(v);
      if (nx < kConvergenceFromNx) continue;
      o.require(v <= prev, std::string(m) + " median rises at Nx=" + std::to_string(nx));
      prev = v;
    }
    o.detail << ";";
  }
  int violations = 0;
  for (int nx : prm.nxs) {
    if (nx < kConvergenceP1FromNx) continue;
    double worst1 = 0.0, best2 = 1e300;
    std::string w1, b2;
    for (const auto& m : prm.methods) {
      if (med(nx, m, 1) > worst1) worst1 = med(nx, m, 1), w1 = m;
      if (med(nx, m, 2) < best2) best2 = med(nx, m, 2), b2 = m;
    }
    if (!(worst1 < best2)) {
      ++violations;
      o.require(false, "Nx=" + std::to_string(nx) + " worst p=1 (" + w1 + ") " + g4(worst1) +
                           " >= best p=2 (" + b2 + ") " + g4(best2));
    }
  }
  o.detail << " p=1 beats p=2 at Nx>=" << kConvergenceP1FromNx << " with " << violations
           << " violations;";
  const int top = prm.nxs.back();
  std::string argmax;
  double mx = -1.0;
  for (const auto& m : prm.methods) {
    for (int p : prm.ps) {
      if (med(top, m, p) > mx) {
        mx = med(top, m, p);
        argmax = m + " p=" + std::to_string(p);
      }
    }
  }
  o.detail << " largest median at Nx=" << top << " is " << argmax << " (" << g4(mx) << ")";
  o.require(argmax.rfind("masked", 0) == 0, "masked has the largest median at the top Nx");
  o.require(seconds < kConvergenceSeconds, "runtime < 600 s");
}

// --- 6 ---------------------------------------------------------------------

void efficiency(Outcome& o, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig base = pipeline_config(Config{});
  const int reps = 5;
  const double cf2 = time_method("cf", kEfficiencyNx, kEfficiencyJ, 2, base, reps);
  const double cf1 = time_method("cf", kEfficiencyNx, kEfficiencyJ, 1, base, reps);
  const double bl = time_method("baseline", kEfficiencyNx, kEfficiencyJ, 1, base, reps);
  const double cf_j2 = time_method("cf", kEfficiencyNx, 2, 1, base, reps);
  const double cf_j20 = time_method("cf", kEfficiencyNx, 20, 1, base, reps);
  const double bl_j2 = time_method("baseline", kEfficiencyNx, 2, 1, base, reps);
  const double bl_j20 = time_method("baseline", kEfficiencyNx, 20, 1, base, reps);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << " Nx=128 J=10: cf p=2 " << g4(cf2) << " s, cf p=1 " << g4(cf1) << " s, baseline "
           << g4(bl) << " s (ratio " << g4(bl / cf1) << "); J 2->20 growth cf " << g4(cf_j20 / cf_j2)
           << "x, baseline " << g4(bl_j20 / bl_j2) << "x";
  o.require(cf2 < cf1, "cf p=2 faster than cf p=1");
  o.require(cf1 < bl, "cf p=1 faster than baseline");
  o.require(bl / cf1 >= kEfficiencyRatio, "baseline / cf >= 2");
  o.require(cf_j20 / cf_j2 < kCfGrowthMax, "cf growth < 50%");
  o.require(bl_j20 / bl_j2 >= kBaselineGrowthMin, "baseline growth >= 3x");
}

// --- 7 ---------------------------------------------------------------------

void table2(Outcome& o, double& seconds, int workers) {
  auto prm = Table2Params::from_config(Config{});
  prm.workers = workers;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = run_table2(prm);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::map<int, double> cf, ifft;
  for (const auto& r : rows) {
    if (r.method == "cf_vbjs") cf[r.trial] = r.s.total;
    if (r.method == "ifft") ifft[r.trial] = r.s.total;
  }
  int wins = 0;
  std::vector<double> cfs, iffts;
  for (const auto& [t, e] : cf) {
    wins += e < ifft.at(t);
    cfs.push_back(e);
    iffts.push_back(ifft.at(t));
  }
  const double frac = double(wins) / cf.size();
  const double med = median_of(cfs);
  o.detail << " CF-VBJS beats IFFT in " << wins << "/" << cf.size() << " trials (need "
           << g4(kTable2WinFraction) << "); median total CF-VBJS " << g4(med) << " (need <= "
           << g4(kTable2Median) << ", reference 0.1534), IFFT " << g4(median_of(iffts));
  o.require(frac >= kTable2WinFraction, "win fraction");
  o.require(med <= kTable2Median, "median CF-VBJS total error");
  o.require(seconds < kTable2Seconds, "runtime < 900 s");
}

// --- 8 ---------------------------------------------------------------------

void band_fraction(Outcome& o, double& seconds, int workers) {
  auto prm = BandFractionParams::from_config(Config{});
  prm.workers = workers;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sums = summarize(run_band_fraction(prm));
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto med = [&](double x, const std::string& m, int p) {
    for (const auto& s : sums)
      if (std::abs(s.x - x) < 1e-12 && s.method == m && s.p == p) return s.median.total;
    throw Error("missing summary");
  };
  int checked = 0, icf_vs_cf = 0, p1_vs_p2 = 0;
  for (double gm : prm.gammas) {
    if (gm > kBandGammaMax + 1e-12) continue;
    ++checked;
    for (int p : prm.ps) {
      if (med(gm, "icf", p) > med(gm, "cf", p)) {
        ++icf_vs_cf;
        o.require(false, "gamma=" + g4(gm) + " p=" + std::to_string(p) + " icf " +
                             g4(med(gm, "icf", p)) + " > cf " + g4(med(gm, "cf", p)));
      }
    }
    if (med(gm, "icf", 1) > med(gm, "icf", 2)) {
      ++p1_vs_p2;
      o.require(false, "gamma=" + g4(gm) + " icf p=1 " + g4(med(gm, "icf", 1)) + " > p=2 " +
                           g4(med(gm, "icf", 2)));
    }
  }
  o.detail << " " << checked << " gammas <= " << g4(kBandGammaMax) << ": ICF > CF in " << icf_vs_cf
           << " (gamma,p) cells, ICF p=1 > p=2 in " << p1_vs_p2 << "; medians at gamma=0.05 icf/cf p=1 "
           << g4(med(prm.gammas.front(), "icf", 1)) << "/" << g4(med(prm.gammas.front(), "cf", 1));
  o.require(seconds < kBandSeconds, "runtime < 1200 s");
}

// --- 9 ---------------------------------------------------------------------

void properties(Outcome& o, double& seconds, const fs::path& bindir) {
  const auto t0 = std::chrono::steady_clock::now();
  const char* modules[] = {"signal_models", "pa_transform", "cf_edge", "icf_design",
                           "vbjs_weights",  "solvers",      "pipelines", "metrics", "cli_bench"};
  int ran = 0;
  for (const char* m : modules) {
    const fs::path exe = bindir / (std::string("test_") + m);
    if (!fs::exists(exe)) {
      o.require(false, exe.string() + " not built");
      continue;
    }
    const std::string cmd = "\"" + exe.string() + "\" --test-case='property*' --no-version=true > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    ++ran;
    o.require(rc == 0, std::string(m) + " property cases failed");
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.detail << " property cases of " << ran << " module suites run";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> which;
  bool strict = false;
  int workers = 1;
  app.add_option("criteria", which, "criterion numbers (default: all)")->check(CLI::Range(1, 9));
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  app.add_option("--parallel", workers, "worker threads for the stochastic sweeps (0 = all)");
  CLI11_PARSE(app, argc, argv);
  if (which.empty())
    for (int c = 1; c <= 9; ++c) which.push_back(c);
  workers = bench::resolve_workers(workers);
  const fs::path bindir = fs::absolute(fs::path(argv[0])).parent_path();

  bool all = true;
  for (int c : which) {
    Outcome o;
    double seconds = 0.0;
    try {
      switch (c) {
        case 1: table1(o, seconds); break;
        case 2: appendix(o, seconds); break;
        case 3: kernel(o, seconds); break;
        case 4: design(o, seconds); break;
        case 5: convergence(o, seconds, workers); break;
        case 6: efficiency(o, seconds); break;
        case 7: table2(o, seconds, workers); break;
        case 8: band_fraction(o, seconds, workers); break;
        case 9: properties(o, seconds, bindir); break;
      }
    } catch (const std::exception& e) {
      std::cout << "criterion " << c << ": ERROR " << e.what() << std::endl;
      return 2;
    }
    all &= o.pass;
    std::printf("criterion %d: %s [%.2f s]%s\n", c, o.pass ? "PASS" : "FAIL", seconds,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return strict && !all ? 1 : 0;
}
