#include "vbjs/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

#include "vbjs/bench.hpp"
#include "vbjs/csv.hpp"
#include "vbjs/metrics.hpp"
#include "vbjs/rng.hpp"

namespace vbjs::experiments {

namespace {

using csv::fmt;

Scores score(const Vector& rec, const Vector& truth, const Grid1D& g, const BoolVector& region,
             double x_star) {
  return {rel_error(rec, truth), rel_error(rec, truth, region), abs_error(rec, truth, g, x_star)};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void check(const Config& cfg, const std::vector<std::string>& own) {
  cfg.check_keys(concat(concat(own, pipeline_keys()), {"experiment", "seed", "parallel"}));
}

std::vector<int> checked_ps(const Config& cfg) {
  auto ps = cfg.ints("ps", {1, 2});
  if (cfg.has("p")) ps = {cfg.integer("p", 1)};
  for (int p : ps)
    if (p != 1 && p != 2) throw ConfigError("p must be 1 or 2");
  return ps;
}

std::vector<std::string> str_list(const Config& cfg, const std::string& key,
                                  const std::vector<std::string>& fallback) {
  if (!cfg.has(key)) return fallback;
  std::vector<std::string> out;
  for (const auto& s : csv::split(cfg.str(key), ',')) out.push_back(csv::trim(s));
  return out;
}

std::uint64_t seed_of(const Config& cfg) {
  const double s = cfg.num("seed", 1.0);
  if (s < 0 || s != std::floor(s)) throw ConfigError("seed must be a nonnegative integer");
  return static_cast<std::uint64_t>(s);
}

int pow2_or_throw(int nx, const char* what) {
  if (nx < 4 || nx % 2) throw ConfigError(std::string(what) + " must be even and >= 4");
  return nx;
}

MeasurementSet noisy_copies(const FourierData& base, int J, double snr, std::uint64_t seed,
                            const std::string& tag, std::uint64_t index) {
  MeasurementSet ms;
  for (int j = 0; j < J; ++j) {
    ms.push_back(add_noise(base, snr, derive_seed(seed, tag, index * 1024 + j)));
  }
  return ms;
}

PipelineResult run_method(const std::string& method, const MeasurementSet& ms, PipelineConfig cfg,
                          int J, double mmv_alpha) {
  if (method == "cf_mmv") {
    cfg.alphas = {mmv_alpha};
    return run_cf_vbjs_mmv(ms, cfg);
  }
  if (method == "cf_smv") {
    cfg.alphas = default_alphas(J);
    return run_cf_vbjs_smv(ms.front(), cfg);
  }
  if (method == "masked") {
    cfg.alphas = default_alphas(J);
    return run_masked(ms.front(), cfg);
  }
  if (method == "baseline") {
    cfg.baseline_J = J;
    return run_vbjs_baseline(ms, cfg);
  }
  throw ConfigError("unknown method '" + method + "'");
}

std::vector<TrialRow> flatten(std::vector<std::vector<TrialRow>> parts) {
  std::vector<TrialRow> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

CsvTable trial_table(const std::string& file, const std::string& xname,
                     const std::vector<TrialRow>& rows) {
  CsvTable t{file, {xname, "trial", "method", "p", "rel_total", "rel_smooth", "abs_at"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({fmt(r.x), std::to_string(r.trial), r.method, std::to_string(r.p),
                      fmt(r.s.total), fmt(r.s.smooth), fmt(r.s.abs_at)});
  }
  return t;
}

CsvTable summary_table(const std::string& file, const std::string& xname,
                       const std::vector<Summary>& sums) {
  CsvTable t{file,
             {xname, "method", "p", "count", "median_total", "median_smooth", "median_abs",
              "mean_total", "mean_smooth", "mean_abs"},
             {}};
  for (const auto& s : sums) {
    t.rows.push_back({fmt(s.x), s.method, std::to_string(s.p), std::to_string(s.count),
                      fmt(s.median.total), fmt(s.median.smooth), fmt(s.median.abs_at),
                      fmt(s.mean.total), fmt(s.mean.smooth), fmt(s.mean.abs_at)});
  }
  return t;
}

std::vector<std::pair<std::string, svg::Plot>> summary_plots(const std::string& stem,
                                                              const std::string& xlabel,
                                                              const std::vector<Summary>& sums,
                                                              bool logx, bool use_mean) {
  std::vector<std::pair<std::string, svg::Plot>> out;
  const char* names[] = {"total", "smooth", "abs"};
  for (int c = 0; c < 3; ++c) {
    svg::Plot plot;
    plot.title = stem + " " + names[c];
    plot.xlabel = xlabel;
    plot.ylabel = c == 2 ? "absolute error" : "relative error";
    plot.logx = logx;
    plot.logy = true;
    std::map<std::pair<std::string, int>, svg::Series> series;
    for (const auto& s : sums) {
      auto& ser = series[{s.method, s.p}];
      ser.label = s.method + " p=" + std::to_string(s.p);
      const Scores& v = use_mean ? s.mean : s.median;
      ser.x.push_back(s.x);
      ser.y.push_back(c == 0 ? v.total : c == 1 ? v.smooth : v.abs_at);
    }
    for (auto& [k, ser] : series) plot.series.push_back(ser);
    out.emplace_back(stem + "_" + names[c] + ".svg", plot);
  }
  return out;
}

std::string utc_now(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> pipeline_keys() {
  return {"m",   "p",      "tau",    "tau_tilde", "rule",   "rho",    "tol",
          "max_iter", "relax", "fidelity_weight", "alphas", "delta1", "delta2", "delta3", "delta4",
          "lambda", "ps"};
}

PipelineConfig pipeline_config(const Config& cfg) {
  PipelineConfig c;
  c.m = cfg.integer("m", 2);
  if (c.m < 1 || c.m > 6) throw ConfigError("m must lie in 1..6");
  c.p = cfg.integer("p", 1);
  if (c.p != 1 && c.p != 2) throw ConfigError("p must be 1 or 2");
  c.tau = cfg.num("tau", 0.0);
  if (c.tau < 0.0 || c.tau >= 1.0) throw ConfigError("tau must lie in (0, 1), or 0 for 1/N");
  c.tau_tilde = cfg.num("tau_tilde", 1.0);
  const std::string rule = cfg.str("rule", "penalize_smooth");
  if (rule == "penalize_smooth") c.rule = WeightRule::PenalizeSmooth;
  else if (rule == "literal") c.rule = WeightRule::Literal;
  else throw ConfigError("rule must be penalize_smooth or literal, got '" + rule + "'");
  c.solver.rho = cfg.num("rho", c.solver.rho);
  c.solver.tol = cfg.num("tol", c.solver.tol);
  c.solver.max_iter = cfg.integer("max_iter", c.solver.max_iter);
  c.solver.relax = cfg.num("relax", c.solver.relax);
  if (!(c.solver.relax > 0.0 && c.solver.relax < 2.0)) throw ConfigError("relax must lie in (0, 2)");
  if (!(c.solver.rho > 0.0) || !(c.solver.tol > 0.0) || c.solver.max_iter < 1)
    throw ConfigError("rho, tol and max_iter must be positive");
  c.fidelity_weight = cfg.num("fidelity_weight", 0.0);
  c.alphas = cfg.nums("alphas", c.alphas);
  for (double a : c.alphas)
    if (!(a > 0.0)) throw ConfigError("exponential orders must be positive");
  c.icf.delta1 = cfg.num("delta1", c.icf.delta1);
  c.icf.delta2 = cfg.num("delta2", c.icf.delta2);
  c.icf.delta3 = cfg.num("delta3", c.icf.delta3);
  c.icf.delta4 = cfg.num("delta4", c.icf.delta4);
  c.lambda = cfg.num("lambda", 0.0);
  return c;
}

std::vector<Summary> summarize(const std::vector<TrialRow>& rows) {
  std::map<std::tuple<double, std::string, int>, std::vector<const TrialRow*>> groups;
  for (const auto& r : rows) groups[{r.x, r.method, r.p}].push_back(&r);
  std::vector<Summary> out;
  for (const auto& [key, g] : groups) {
    Summary s;
    std::tie(s.x, s.method, s.p) = key;
    s.count = static_cast<int>(g.size());
    std::vector<double> t, m, a;
    for (const auto* r : g) {
      t.push_back(r->s.total);
      m.push_back(r->s.smooth);
      a.push_back(r->s.abs_at);
    }
    s.median = {bench::median(t), bench::median(m), bench::median(a)};
    auto mean = [](const std::vector<double>& v) {
      double acc = 0.0;
      for (double x : v) acc += x;
      return acc / v.size();
    };
    s.mean = {mean(t), mean(m), mean(a)};
    out.push_back(s);
  }
  return out;
}

const Summary* find(const std::vector<Summary>& s, double x, const std::string& method, int p) {
  for (const auto& e : s)
    if (e.x == x && e.method == method && e.p == p) return &e;
  return nullptr;
}

// ---------------------------------------------------------------------------

Table1Params Table1Params::from_config(const Config& cfg) {
  check(cfg, {"N", "J"});
  Table1Params p;
  p.N = cfg.integer("N", p.N);
  p.J = cfg.integer("J", p.J);
  if (p.N < 32 || p.J < 2) throw ConfigError("table1 needs N >= 32 and J >= 2");
  p.base = pipeline_config(cfg);
  if (!cfg.has("alphas")) p.base.alphas = default_alphas(p.J);
  return p;
}

std::vector<Table1Row> run_table1(const Table1Params& prm) {
  const FourierData base = ramp_exact_coeffs(prm.N);
  const Grid1D& g = base.grid;
  const Vector truth = ramp_signal().sample(g);
  const BoolVector region = regions::ramp_smooth(g);
  MeasurementSet ms;
  for (int j = 1; j <= prm.J; ++j) ms.push_back(apply_missing_band(base, j));

  std::vector<Table1Row> rows;
  for (int p : {1, 2}) {
    for (bool icf : {false, true}) {
      PipelineConfig cfg = prm.base;
      cfg.p = p;
      cfg.use_icf = icf;
      const auto t0 = std::chrono::steady_clock::now();
      const PipelineResult r = run_cf_vbjs_mmv(ms, cfg);
      const double sec =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      Table1Row row;
      row.label = std::string(icf ? "ICF" : "CF") + " VBJS l" + std::to_string(p);
      row.icf = icf;
      row.p = p;
      row.s = score(r.recon, truth, g, region, kRampXStar);
      row.j_star = r.j_star;
      row.iterations = r.solve.iterations;
      row.seconds = sec;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

ConvergenceParams ConvergenceParams::from_config(const Config& cfg) {
  check(cfg, {"nxs", "trials", "snr", "J", "mmv_alpha", "baseline_J", "methods", "region"});
  ConvergenceParams p;
  p.nxs = cfg.ints("nxs", p.nxs);
  for (int nx : p.nxs) pow2_or_throw(nx, "nxs entries");
  p.trials = cfg.integer("trials", p.trials);
  p.snr = cfg.num("snr", p.snr);
  p.J = cfg.integer("J", p.J);
  p.mmv_alpha = cfg.num("mmv_alpha", p.mmv_alpha);
  p.baseline_J = cfg.integer("baseline_J", p.baseline_J);
  p.methods = str_list(cfg, "methods", p.methods);
  p.ps = checked_ps(cfg);
  p.region = cfg.str("region", p.region);
  if (p.trials < 1 || p.J < 2) throw ConfigError("trials >= 1 and J >= 2 required");
  p.base = pipeline_config(cfg);
  p.seed = seed_of(cfg);
  return p;
}

std::vector<TrialRow> run_convergence(const ConvergenceParams& prm) {
  const std::size_t n = prm.nxs.size() * prm.trials;
  auto parts = bench::parallel_map<std::vector<TrialRow>>(n, prm.workers, [&](std::size_t i) {
    const int nx = prm.nxs[i / prm.trials];
    const int trial = static_cast<int>(i % prm.trials);
    const FourierData base = ramp_exact_coeffs(nx / 2);
    const Grid1D& g = base.grid;
    const Vector truth = ramp_signal().sample(g);
    const BoolVector region = regions::by_name(prm.region, g);
    const int J = std::max(prm.J, prm.baseline_J);
    const MeasurementSet ms =
        noisy_copies(base, J, prm.snr, prm.seed, "convergence", std::uint64_t(nx) << 16 | trial);
    const MeasurementSet mmv(ms.begin(), ms.begin() + prm.J);
    const MeasurementSet bms(ms.begin(), ms.begin() + prm.baseline_J);
    std::vector<TrialRow> rows;
    for (const auto& method : prm.methods) {
      for (int p : prm.ps) {
        PipelineConfig cfg = prm.base;
        cfg.p = p;
        const bool bl = method == "baseline";
        const PipelineResult r =
            run_method(method, bl ? bms : mmv, cfg, bl ? prm.baseline_J : prm.J, prm.mmv_alpha);
        rows.push_back({double(nx), trial, method, p, score(r.recon, truth, g, region, kRampXStar)});
      }
    }
    return rows;
  });
  return flatten(std::move(parts));
}

// ---------------------------------------------------------------------------

SnrParams SnrParams::from_config(const Config& cfg) {
  check(cfg, {"N", "snrs", "trials", "J", "methods", "region", "snr"});
  SnrParams p;
  p.N = cfg.integer("N", p.N);
  p.snrs = cfg.nums("snrs", {});
  if (cfg.has("snr")) p.snrs = {cfg.num("snr", 0.0)};
  if (p.snrs.empty())
    for (int s = 10; s >= -10; --s) p.snrs.push_back(s);
  p.trials = cfg.integer("trials", p.trials);
  p.J = cfg.integer("J", p.J);
  p.methods = str_list(cfg, "methods", p.methods);
  p.ps = checked_ps(cfg);
  p.region = cfg.str("region", p.region);
  if (p.trials < 1 || p.J < 2 || p.N < 4) throw ConfigError("trials >= 1, J >= 2, N >= 4 required");
  p.base = pipeline_config(cfg);
  p.seed = seed_of(cfg);
  return p;
}

std::vector<TrialRow> run_snr_sweep(const SnrParams& prm) {
  const FourierData base = ramp_exact_coeffs(prm.N);
  const Grid1D& g = base.grid;
  const Vector truth = ramp_signal().sample(g);
  const BoolVector region = regions::by_name(prm.region, g);
  const std::size_t n = prm.snrs.size() * prm.trials;
  auto parts = bench::parallel_map<std::vector<TrialRow>>(n, prm.workers, [&](std::size_t i) {
    const std::size_t si = i / prm.trials;
    const int trial = static_cast<int>(i % prm.trials);
    const MeasurementSet ms =
        noisy_copies(base, 1, prm.snrs[si], prm.seed, "snr_sweep", si << 16 | trial);
    std::vector<TrialRow> rows;
    for (const auto& method : prm.methods) {
      if (method == "cf_mmv") throw ConfigError("snr_sweep is single-measurement; drop cf_mmv");
      for (int p : prm.ps) {
        PipelineConfig cfg = prm.base;
        cfg.p = p;
        const PipelineResult r = run_method(method, ms, cfg, prm.J, 8.0);
        rows.push_back({prm.snrs[si], trial, method, p, score(r.recon, truth, g, region, kRampXStar)});
      }
    }
    return rows;
  });
  return flatten(std::move(parts));
}

// ---------------------------------------------------------------------------

Table2Params Table2Params::from_config(const Config& cfg) {
  check(cfg, {"N", "J", "snr", "trials", "baseline"});
  Table2Params p;
  p.N = cfg.integer("N", p.N);
  p.J = cfg.integer("J", p.J);
  p.snr = cfg.num("snr", p.snr);
  p.trials = cfg.integer("trials", p.trials);
  p.baseline = cfg.flag("baseline", p.baseline);
  if (p.trials < 1 || p.J < 2 || p.N < 4) throw ConfigError("trials >= 1, J >= 2, N >= 4 required");
  p.base = pipeline_config(cfg);
  p.seed = seed_of(cfg);
  return p;
}

std::vector<TrialRow> run_table2(const Table2Params& prm) {
  const Scene2D scene = sample_scene2d(prm.N);
  const FourierData2D exact = fourier_data_2d(scene.samples, scene.gx, scene.gy);
  const int jy = scene.gy.nearest(0.0);
  const Vector truth = scene.samples.col(jy);
  const BoolVector region = regions::cross_section_smooth(scene.gx);
  auto parts = bench::parallel_map<std::vector<TrialRow>>(
      prm.trials, prm.workers, [&](std::size_t trial) {
        MeasurementSet2D ms;
        for (int j = 0; j < prm.J; ++j) {
          ms.push_back(add_noise(exact, prm.snr, derive_seed(prm.seed, "table2", trial * 1024 + j)));
        }
        auto row = [&](const std::string& method, const Vector& cs) {
          return TrialRow{0.0, int(trial), method, prm.base.p,
                          score(cs, truth, scene.gx, region, kSceneXStar)};
        };
        std::vector<TrialRow> rows;
        rows.push_back(row("cf_vbjs", run_cf_vbjs_2d(ms, prm.base).recon.col(jy)));
        if (prm.baseline) rows.push_back(row("vbjs", run_vbjs_baseline_2d(ms, prm.base).recon.col(jy)));
        rows.push_back(row("ifft", filtered_fourier_sum_2d(ms.front()).col(jy)));
        return rows;
      });
  return flatten(std::move(parts));
}

// ---------------------------------------------------------------------------

BandFractionParams BandFractionParams::from_config(const Config& cfg) {
  check(cfg, {"N", "J", "gammas", "trials", "bandwidth"});
  BandFractionParams p;
  p.N = cfg.integer("N", p.N);
  p.J = cfg.integer("J", p.J);
  p.gammas = cfg.nums("gammas", {});
  if (p.gammas.empty())
    for (int l = 0; l <= 18; ++l) p.gammas.push_back(0.05 + 0.05 * l);
  for (double gm : p.gammas)
    if (gm < 0.0 || gm > 1.0) throw ConfigError("gammas must lie in [0, 1]");
  p.trials = cfg.integer("trials", p.trials);
  p.bandwidth = cfg.integer("bandwidth", p.bandwidth);
  p.ps = checked_ps(cfg);
  if (p.trials < 1 || p.J < 2 || p.N < 8 || p.bandwidth < 1)
    throw ConfigError("trials >= 1, J >= 2, N >= 8, bandwidth >= 1 required");
  p.base = pipeline_config(cfg);
  if (!cfg.has("alphas")) p.base.alphas = default_alphas(p.J);
  p.seed = seed_of(cfg);
  return p;
}

std::vector<TrialRow> run_band_fraction(const BandFractionParams& prm) {
  const FourierData base = ramp_exact_coeffs(prm.N);
  const Grid1D& g = base.grid;
  const Vector truth = ramp_signal().sample(g);
  const BoolVector region = regions::ramp_smooth(g);
  const std::size_t n = prm.gammas.size() * prm.trials;
  auto parts = bench::parallel_map<std::vector<TrialRow>>(n, prm.workers, [&](std::size_t i) {
    const std::size_t gi = i / prm.trials;
    const int trial = static_cast<int>(i % prm.trials);
    MeasurementSet ms;
    for (int j = 0; j < prm.J; ++j) {
      ms.push_back(remove_random_bands(base, prm.gammas[gi], prm.bandwidth,
                                       derive_seed(prm.seed, "band_fraction",
                                                   (gi << 20) + trial * 1024 + j)));
    }
    std::vector<TrialRow> rows;
    for (bool icf : {false, true}) {
      PipelineConfig cfg = prm.base;
      if (icf) {
        // design once, reuse for every p
        cfg.use_icf = true;
        cfg.factors = run_cf_vbjs_mmv(ms, cfg).factors;
      }
      for (int p : prm.ps) {
        cfg.p = p;
        const PipelineResult r = run_cf_vbjs_mmv(ms, cfg);
        rows.push_back({prm.gammas[gi], trial, icf ? "icf" : "cf", p,
                        score(r.recon, truth, g, region, kRampXStar)});
      }
    }
    return rows;
  });
  return flatten(std::move(parts));
}

// ---------------------------------------------------------------------------

MissingBandParams MissingBandParams::from_config(const Config& cfg) {
  check(cfg, {"N", "J", "widths", "methods"});
  MissingBandParams p;
  p.N = cfg.integer("N", p.N);
  p.J = cfg.integer("J", p.J);
  p.widths = cfg.ints("widths", p.widths);
  p.methods = str_list(cfg, "methods", p.methods);
  p.ps = checked_ps(cfg);
  if (p.J < 2 || p.N < 8) throw ConfigError("J >= 2 and N >= 8 required");
  p.base = pipeline_config(cfg);
  if (!cfg.has("alphas")) p.base.alphas = default_alphas(p.J);
  return p;
}

std::vector<MissingBandResult> run_missing_band_sweep(const MissingBandParams& prm) {
  const FourierData base = ramp_exact_coeffs(prm.N);
  const Grid1D& g = base.grid;
  const Vector truth = ramp_signal().sample(g);
  const BoolVector region = regions::ramp_smooth(g);
  auto parts = bench::parallel_map<std::vector<MissingBandResult>>(
      prm.widths.size(), prm.workers, [&](std::size_t bi) {
        const int b = prm.widths[bi];
        MeasurementSet ms;
        for (int j = 1; j <= prm.J; ++j) ms.push_back(apply_mask(base, equally_spaced_band(j, prm.J, b, prm.N)));
        std::vector<MissingBandResult> out;
        for (const auto& method : prm.methods) {
          PipelineConfig cfg = prm.base;
          if (method == "icf") {
            cfg.use_icf = true;
            cfg.factors = run_cf_vbjs_mmv(ms, cfg).factors;
          } else if (method != "cf" && method != "baseline") {
            throw ConfigError("unknown method '" + method + "'");
          }
          for (int p : prm.ps) {
            cfg.p = p;
            const PipelineResult r =
                method == "baseline" ? run_vbjs_baseline(ms, cfg) : run_cf_vbjs_mmv(ms, cfg);
            out.push_back({b, method, p, score(r.recon, truth, g, region, kRampXStar),
                           pointwise_log(r.recon, truth)});
          }
        }
        return out;
      });
  std::vector<MissingBandResult> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// ---------------------------------------------------------------------------

EfficiencyParams EfficiencyParams::from_config(const Config& cfg) {
  check(cfg, {"nxs", "J", "fixed_nx", "js", "reps", "icf", "icf_max_nx"});
  EfficiencyParams p;
  p.nxs = cfg.ints("nxs", p.nxs);
  for (int nx : p.nxs) pow2_or_throw(nx, "nxs entries");
  p.J = cfg.integer("J", p.J);
  p.fixed_nx = pow2_or_throw(cfg.integer("fixed_nx", p.fixed_nx), "fixed_nx");
  p.js = cfg.ints("js", {});
  if (p.js.empty())
    for (int j = 2; j <= 20; ++j) p.js.push_back(j);
  p.reps = cfg.integer("reps", p.reps);
  p.icf = cfg.flag("icf", p.icf);
  p.icf_max_nx = cfg.integer("icf_max_nx", p.icf_max_nx);
  if (p.J < 2 || p.reps < 1) throw ConfigError("J >= 2 and reps >= 1 required");
  for (int j : p.js)
    if (j < 2) throw ConfigError("js entries must be >= 2");
  p.base = pipeline_config(cfg);
  return p;
}

double time_method(const std::string& method, int nx, int J, int p, const PipelineConfig& base,
                   int reps) {
  const int N = nx / 2;
  const FourierData data = ramp_exact_coeffs(N);
  PipelineConfig cfg = base;
  cfg.p = p;
  std::function<void()> fn;
  if (method == "cf") {
    cfg.alphas = default_alphas(J);
    fn = [&] { run_cf_vbjs_smv(data, cfg); };
  } else if (method == "icf") {
    const int b = std::max(1, std::min(N / 8, N - 2));
    fn = [&, b] {
      PipelineConfig c = cfg;
      c.factors.clear();
      for (int j = 1; j <= J; ++j) {
        ICFParams ip = cfg.icf;
        ip.N = N;
        ip.grid = data.grid;
        ip.K = equally_spaced_band(j, J, b, N);
        try {
          c.factors.push_back(design_icf(ip).cf);
        } catch (const InfeasibleError&) {
          // same fallback as the MMV pipeline: exponential with the band zeroed
          ConcentrationFactor e = exponential_cf(N, 2.0 * j);
          for (int k : ip.K) e.values(k - 1) = 0.0;
          c.factors.push_back(e);
        }
      }
      run_cf_vbjs_smv(data, c);
    };
  } else if (method == "baseline") {
    cfg.baseline_J = J;
    fn = [&] { run_vbjs_baseline({data}, cfg); };
  } else {
    throw ConfigError("unknown timing method '" + method + "'");
  }
  return bench::time_it(fn, reps).median;
}

std::vector<TimingRow> run_efficiency(const EfficiencyParams& prm) {
  std::vector<TimingRow> rows;
  for (int nx : prm.nxs) {
    for (const char* m : {"cf", "icf", "baseline"}) {
      const std::string method = m;
      if (method == "icf" && (!prm.icf || nx > prm.icf_max_nx || nx < 16)) continue;
      for (int p : {1, 2}) {
        // designs dominate the icf time, one repetition is enough
        const int reps = method == "icf" ? 1 : prm.reps;
        rows.push_back({"nx", nx, prm.J, method, p, time_method(method, nx, prm.J, p, prm.base, reps)});
      }
    }
  }
  for (int J : prm.js) {
    for (const char* m : {"cf", "baseline"}) {
      for (int p : {1, 2}) {
        rows.push_back({"J", prm.fixed_nx, J, m, p, time_method(m, prm.fixed_nx, J, p, prm.base, prm.reps)});
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<std::string> recon_keys() {
  return {"method", "signal", "N", "J", "snr", "bands", "data", "region", "x_star", "icf"};
}

namespace {

MeasurementSet apply_bands(MeasurementSet ms, const std::string& spec, std::uint64_t seed) {
  if (spec.empty() || spec == "none") return ms;
  const auto parts = csv::split(spec, ':');
  const std::string kind = csv::trim(parts[0]);
  const int J = static_cast<int>(ms.size());
  for (int j = 0; j < J; ++j) {
    const int N = ms[j].N();
    if (kind == "example") {
      ms[j] = apply_missing_band(ms[j], j + 1);
    } else if (kind == "equal" && parts.size() == 2) {
      ms[j] = apply_mask(ms[j], equally_spaced_band(j + 1, J, std::stoi(parts[1]), N));
    } else if (kind == "random" && (parts.size() == 2 || parts.size() == 3)) {
      const int bw = parts.size() == 3 ? std::stoi(parts[2]) : 1;
      ms[j] = remove_random_bands(ms[j], std::stod(parts[1]), bw, derive_seed(seed, "bands", j));
    } else {
      throw ConfigError("bands must be none | example | equal:b | random:gamma[:b], got '" +
                        spec + "'");
    }
  }
  return ms;
}

}  // namespace

ReconBundle run_recon(const Config& cfg) {
  check(cfg, recon_keys());
  PipelineConfig pc = pipeline_config(cfg);
  pc.method = parse_method(cfg.str("method", "cf_vbjs_mmv"));
  pc.use_icf = cfg.flag("icf", false);
  if (pc.method == Method::CfVbjs2d) throw ConfigError("recon is 1D; use 'experiment table2' for the 2D scene");
  const std::uint64_t seed = seed_of(cfg);
  const int J = cfg.integer("J", pc.method == Method::CfVbjsMmv ? 4 : 1);
  if (J < 1) throw ConfigError("J must be >= 1");

  ReconBundle b;
  MeasurementSet ms;
  if (cfg.has("data")) {
    for (const auto& path : csv::split(cfg.str("data"), ',')) {
      std::ifstream is(csv::trim(path));
      if (!is) throw ConfigError("cannot open data file '" + csv::trim(path) + "'");
      ms.push_back(read_fourier_csv(is));
    }
    b.grid = ms.front().grid;
  } else {
    const std::string signal = cfg.str("signal", "ramp");
    if (signal != "ramp") throw ConfigError("only signal = ramp is built in");
    const int N = cfg.integer("N", 64);
    if (N < 4) throw ConfigError("N must be >= 4");
    const FourierData base = ramp_exact_coeffs(N);
    b.grid = base.grid;
    const double snr = cfg.has("snr") && cfg.str("snr") != "none" ? cfg.num("snr", 0.0) : kNoNoise;
    ms = noisy_copies(base, J, snr, seed, "recon", 0);
    ms = apply_bands(ms, cfg.str("bands", "none"), seed);
  }
  if (pc.method == Method::CfVbjsMmv && !cfg.has("alphas") && !pc.use_icf) {
    pc.alphas = default_alphas(static_cast<int>(ms.size()));
  }
  if ((pc.method == Method::CfVbjsSmv || pc.method == Method::Masked) && !cfg.has("alphas")) {
    pc.alphas = default_alphas(10);
  }
  if (pc.method == Method::VbjsBaseline && ms.size() == 1) pc.baseline_J = 10;
  if (pc.method == Method::CfVbjsMmv && pc.use_icf && !cfg.has("alphas")) {
    pc.alphas = default_alphas(static_cast<int>(ms.size()));
  }

  const auto t0 = std::chrono::steady_clock::now();
  b.result = run_pipeline(ms, pc);
  b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // data files carry no ground truth unless the signal is named
  if (!cfg.has("data") || cfg.has("signal")) {
    b.truth = ramp_signal().sample(b.grid);
    const BoolVector region = regions::by_name(cfg.str("region", "ramp_smooth"), b.grid);
    b.s = score(b.result.recon, b.truth, b.grid, region, cfg.num("x_star", kRampXStar));
  } else {
    const double nan = std::nan("");
    b.s = {nan, nan, nan};
  }
  return b;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"table1",       "table2",    "convergence",
                                          "snr_sweep",    "missing_band_sweep",
                                          "band_fraction", "efficiency", "custom"};
  return n;
}

Output run_named(const std::string& name, const Config& cfg, int workers) {
  Output out;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return fmt(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };

  if (name == "table1") {
    const auto rows = run_table1(Table1Params::from_config(cfg));
    CsvTable t{"table1.csv", {"method", "p", "rel_total", "rel_smooth", "abs_at", "j_star", "iterations"}, {}};
    for (const auto& r : rows) {
      t.rows.push_back({r.label, std::to_string(r.p), fmt(r.s.total), fmt(r.s.smooth),
                        fmt(r.s.abs_at), std::to_string(r.j_star), std::to_string(r.iterations)});
      out.meta.emplace_back("seconds." + r.label, fmt(r.seconds));
    }
    out.tables.push_back(t);
  } else if (name == "convergence") {
    auto prm = ConvergenceParams::from_config(cfg);
    prm.workers = workers;
    const auto rows = run_convergence(prm);
    const auto sums = summarize(rows);
    out.tables.push_back(trial_table("convergence_trials.csv", "Nx", rows));
    out.tables.push_back(summary_table("convergence_summary.csv", "Nx", sums));
    out.plots = summary_plots("convergence", "Nx", sums, true, false);
  } else if (name == "snr_sweep") {
    auto prm = SnrParams::from_config(cfg);
    prm.workers = workers;
    const auto rows = run_snr_sweep(prm);
    const auto sums = summarize(rows);
    out.tables.push_back(trial_table("snr_trials.csv", "snr_db", rows));
    out.tables.push_back(summary_table("snr_summary.csv", "snr_db", sums));
    out.plots = summary_plots("snr", "SNR (dB)", sums, false, true);
  } else if (name == "table2") {
    auto prm = Table2Params::from_config(cfg);
    prm.workers = workers;
    const auto rows = run_table2(prm);
    out.tables.push_back(trial_table("table2_trials.csv", "x", rows));
    auto sums = summarize(rows);
    CsvTable t{"table2.csv", {"method", "median_total", "median_smooth", "median_abs", "trials"}, {}};
    for (const auto& s : sums) {
      t.rows.push_back({s.method, fmt(s.median.total), fmt(s.median.smooth), fmt(s.median.abs_at),
                        std::to_string(s.count)});
    }
    out.tables.push_back(t);
  } else if (name == "band_fraction") {
    auto prm = BandFractionParams::from_config(cfg);
    prm.workers = workers;
    const auto rows = run_band_fraction(prm);
    const auto sums = summarize(rows);
    out.tables.push_back(trial_table("band_fraction_trials.csv", "gamma", rows));
    out.tables.push_back(summary_table("band_fraction_summary.csv", "gamma", sums));
    out.plots = summary_plots("band_fraction", "gamma", sums, false, false);
  } else if (name == "missing_band_sweep") {
    auto prm = MissingBandParams::from_config(cfg);
    prm.workers = workers;
    const auto res = run_missing_band_sweep(prm);
    const FourierData ref = FourierData::zeros(Grid1D::standard(prm.N));
    CsvTable pw{"missing_band_pointwise.csv", {"b", "method", "p", "j", "x", "log10_error"}, {}};
    CsvTable sm{"missing_band_summary.csv", {"b", "method", "p", "rel_total", "rel_smooth", "abs_at"}, {}};
    for (const auto& r : res) {
      for (Eigen::Index j = 0; j < r.log_error.size(); ++j) {
        pw.rows.push_back({std::to_string(r.b), r.method, std::to_string(r.p), std::to_string(j),
                           fmt(ref.grid.x(static_cast<int>(j))), fmt(r.log_error(j))});
      }
      sm.rows.push_back({std::to_string(r.b), r.method, std::to_string(r.p), fmt(r.s.total),
                         fmt(r.s.smooth), fmt(r.s.abs_at)});
    }
    out.tables.push_back(pw);
    out.tables.push_back(sm);
  } else if (name == "efficiency") {
    const auto rows = run_efficiency(EfficiencyParams::from_config(cfg));
    CsvTable t{"efficiency.csv", {"sweep", "Nx", "J", "method", "p", "seconds"}, {}};
    std::map<std::string, svg::Series> by_nx, by_j;
    for (const auto& r : rows) {
      t.rows.push_back({r.sweep, std::to_string(r.nx), std::to_string(r.J), r.method,
                        std::to_string(r.p), fmt(r.seconds)});
      auto& s = (r.sweep == "nx" ? by_nx : by_j)[r.method + " p=" + std::to_string(r.p)];
      s.label = r.method + " p=" + std::to_string(r.p);
      s.x.push_back(r.sweep == "nx" ? r.nx : r.J);
      s.y.push_back(r.seconds);
    }
    out.tables.push_back(t);
    svg::Plot a{"time vs Nx", "Nx", "seconds", true, true, {}};
    svg::Plot b{"time vs J", "J", "seconds", false, true, {}};
    for (auto& [k, s] : by_nx) a.series.push_back(s);
    for (auto& [k, s] : by_j) b.series.push_back(s);
    out.plots = {{"efficiency_nx.svg", a}, {"efficiency_J.svg", b}};
  } else if (name == "custom") {
    const ReconBundle b = run_recon(cfg);
    CsvTable rec{"reconstruction.csv", {"j", "x", "truth", "recon", "weight"}, {}};
    for (int j = 0; j < b.grid.Nx; ++j) {
      rec.rows.push_back({std::to_string(j), fmt(b.grid.x(j)),
                          b.truth.size() ? fmt(b.truth(j)) : "nan",
                          fmt(b.result.recon(j)), fmt(b.result.applied_weights(j))});
    }
    CsvTable met{"metrics.csv", {"rel_total", "rel_smooth", "abs_at", "j_star", "iterations", "converged"}, {}};
    met.rows.push_back({fmt(b.s.total), fmt(b.s.smooth), fmt(b.s.abs_at),
                        std::to_string(b.result.j_star), std::to_string(b.result.solve.iterations),
                        b.result.solve.converged ? "1" : "0"});
    CsvTable w{"weights.csv", {"j", "S", "v", "T", "w", "applied"}, {}};
    const WeightVector& wv = b.result.weights;
    for (int j = 0; j < b.grid.Nx; ++j) {
      w.rows.push_back({std::to_string(j), fmt(wv.S(j)), fmt(wv.v(j)), fmt(wv.T(j)), fmt(wv.w(j)),
                        fmt(b.result.applied_weights(j))});
    }
    out.tables = {rec, w, met};
    out.meta.emplace_back("pipeline_seconds", fmt(b.seconds));
  } else {
    throw ConfigError("unknown experiment '" + name + "'");
  }
  out.meta.emplace_back("elapsed_seconds", elapsed());
  return out;
}

std::vector<std::string> write_output(const Output& out, const std::string& name,
                                      const Config& cfg, const std::string& dir,
                                      double elapsed_seconds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  const std::string hash = cfg.hash_hex();
  for (const auto& t : out.tables) {
    const std::string path = (fs::path(dir) / t.file).string();
    std::ofstream os(path);
    if (!os) throw Error("cannot write '" + path + "'");
    os << "# experiment=" << name << "\n# config_hash=" << hash << "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    written.push_back(path);
  }
  for (const auto& [file, plot] : out.plots) {
    const std::string path = (fs::path(dir) / file).string();
    std::ofstream(path) << svg::render(plot);
    written.push_back(path);
  }
  {
    const std::string path = (fs::path(dir) / (name + ".cfg")).string();
    std::ofstream(path) << cfg.canonical();
    written.push_back(path);
  }
  const auto now = std::chrono::system_clock::now();
  const auto start = now - std::chrono::duration_cast<std::chrono::system_clock::duration>(
                               std::chrono::duration<double>(elapsed_seconds));
  const std::string path = (fs::path(dir) / (name + ".meta")).string();
  std::ofstream os(path);
  os << "experiment=" << name << "\nconfig_hash=" << hash << "\nstarted=" << utc_now(start)
     << "\nfinished=" << utc_now(now) << "\nwall_seconds=" << fmt(elapsed_seconds) << "\n";
  for (const auto& [k, v] : out.meta) os << k << "=" << v << "\n";
  written.push_back(path);
  return written;
}

}  // namespace vbjs::experiments
