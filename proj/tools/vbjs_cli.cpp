// vbjs: reconstruction, edge maps, factor design and experiment runner.
//
// exit codes: 0 ok, 2 config/input error, 3 solver failure or infeasible design

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vbjs/bench.hpp"
#include "vbjs/csv.hpp"
#include "vbjs/experiments.hpp"
#include "vbjs/icf_design.hpp"
#include "vbjs/pipelines.hpp"

namespace fs = std::filesystem;
using namespace vbjs;

namespace {

struct Common {
  std::string config;
  std::string out;
  long long seed = -1;
  int p = 0;
  int m = 0;
  double tau = -1.0;
  std::string snr;
  int parallel = 1;
};

void add_common(CLI::App* app, Common& c, bool pool) {
  app->add_option("--config", c.config, "flat key = value config file");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "root seed");
  app->add_option("--p", c.p, "regularization norm")->check(CLI::IsMember({1, 2}));
  app->add_option("--m", c.m, "PA order")->check(CLI::Range(1, 6));
  app->add_option("--tau", c.tau, "detection threshold in (0,1)");
  app->add_option("--snr", c.snr, "noise level in dB");
  if (pool) app->add_option("--parallel", c.parallel, "worker threads (0 = all cores)");
}

Config load(const Common& c) {
  Config cfg = c.config.empty() ? Config{} : Config::load(c.config);
  if (c.seed >= 0) cfg.set("seed", std::to_string(c.seed));
  if (c.p) cfg.set("p", std::to_string(c.p));
  if (c.m) cfg.set("m", std::to_string(c.m));
  if (c.tau >= 0.0) cfg.set("tau", csv::fmt(c.tau));
  if (!c.snr.empty()) cfg.set("snr", c.snr);
  return cfg;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
}

// --- edges ----------------------------------------------------------------

struct EdgesArgs {
  std::string data;
  std::vector<double> alphas;
  std::vector<std::string> factors;
  std::string out;
  double tau = 0.0;
  bool weights = false;
};

int cmd_edges(const EdgesArgs& a) {
  std::ifstream is(a.data);
  if (!is) throw ConfigError("cannot open data file '" + a.data + "'");
  const FourierData data = read_fourier_csv(is);
  std::vector<ConcentrationFactor> cfs;
  std::vector<std::string> labels;
  for (double al : a.alphas) {
    cfs.push_back(exponential_cf(data.N(), al));
    labels.push_back("g_exp" + csv::fmt(al));
  }
  for (const auto& f : a.factors) {
    std::ifstream fs_(f);
    if (!fs_) throw ConfigError("cannot open factor file '" + f + "'");
    cfs.push_back(read_cf_csv(fs_));
    if (cfs.back().N != data.N()) throw ConfigError("factor '" + f + "' has the wrong bandwidth");
    labels.push_back("g_" + fs::path(f).stem().string());
  }
  if (cfs.empty()) cfs.push_back(exponential_cf(data.N(), 8.0)), labels.push_back("g_exp8");

  const int Nx = data.grid.Nx;
  Matrix P(Nx, static_cast<Eigen::Index>(cfs.size()));
  for (std::size_t j = 0; j < cfs.size(); ++j) P.col(j) = concentration_edge(data, cfs[j]).values;
  const bool extra = a.weights || cfs.size() > 1;
  WeightVector wv;
  if (extra) {
    wv = build_weights(P, a.tau > 0.0 ? a.tau : 1.0 / data.N(), WeightRule::PenalizeSmooth);
  }

  std::ofstream file;
  if (!a.out.empty()) {
    if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
    file.open(a.out);
    if (!file) throw ConfigError("cannot write '" + a.out + "'");
  }
  std::ostream& os = a.out.empty() ? std::cout : file;
  os << "j,x";
  for (const auto& l : labels) os << "," << l;
  if (extra) os << ",S,v,T,w";
  os << "\n";
  for (int j = 0; j < Nx; ++j) {
    os << j << "," << csv::fmt(data.grid.x(j));
    for (Eigen::Index c = 0; c < P.cols(); ++c) os << "," << csv::fmt(P(j, c));
    if (extra) {
      os << "," << csv::fmt(wv.S(j)) << "," << csv::fmt(wv.v(j)) << "," << csv::fmt(wv.T(j))
         << "," << csv::fmt(wv.w(j));
    }
    os << "\n";
  }
  return 0;
}

// --- design-cf -------------------------------------------------------------

struct DesignArgs {
  int N = 64;
  std::string mask = "none";
  double d1 = 1e-3, d2 = 0.35, d3 = 1e-3, d4 = 1e-6;
  std::string out = "out/design";
};

// none | full | example | example:j | "a-b;c-d" (ranges of |k|)
std::vector<std::pair<std::string, std::set<int>>> parse_masks(const std::string& spec, int N) {
  std::vector<std::pair<std::string, std::set<int>>> out;
  if (spec == "none") return {{"none", {}}};
  if (spec == "full") {
    std::set<int> K;
    for (int k = 1; k <= N; ++k) K.insert(k);
    return {{"full", K}};
  }
  if (spec == "example") {
    for (int j = 1; j <= 4; ++j) out.emplace_back("K" + std::to_string(j), example_band(j, N));
    return out;
  }
  if (spec.rfind("example:", 0) == 0) {
    const int j = std::stoi(spec.substr(8));
    if (j < 1) throw ConfigError("example band index must be >= 1");
    return {{"K" + std::to_string(j), example_band(j, N)}};
  }
  std::set<int> K;
  for (const auto& part : csv::split(spec, ';')) {
    const auto ab = csv::split(part, '-');
    try {
      const int a = std::stoi(ab.at(0));
      const int b = ab.size() > 1 ? std::stoi(ab.at(1)) : a;
      if (a < 1 || b > N || a > b) throw ConfigError("band '" + part + "' outside 1..N");
      for (int k = a; k <= b; ++k) K.insert(k);
    } catch (const std::logic_error&) {
      throw ConfigError("bad mask spec '" + spec + "'");
    }
  }
  return {{"custom", K}};
}

int cmd_design(const DesignArgs& a) {
  fs::create_directories(a.out);
  const std::string rp = (fs::path(a.out) / "design_report.csv").string();
  std::ofstream rep(rp);
  rep << "mask,missing,objective,jump_violation,far_violation,band_violation,iterations,status\n";
  std::vector<std::string> files;
  for (const auto& [name, K] : parse_masks(a.mask, a.N)) {
    ICFParams prm = ICFParams::defaults(a.N, K);
    prm.delta1 = a.d1;
    prm.delta2 = a.d2;
    prm.delta3 = a.d3;
    prm.delta4 = a.d4;
    DesignResult d;
    try {
      d = design_icf(prm);
    } catch (const InfeasibleError& e) {
      rep << name << "," << K.size() << ",nan,nan,nan,nan,0,infeasible\n";
      std::cerr << "design for mask '" << name << "' is infeasible: " << e.what() << "\n";
      return 3;
    }
    const std::string path = (fs::path(a.out) / ("cf_" + name + ".csv")).string();
    std::ofstream os(path);
    write_cf_csv(os, d.cf);
    files.push_back(path);
    const auto& r = d.report;
    rep << name << "," << K.size() << "," << csv::fmt(r.objective) << ","
        << csv::fmt(r.jump_violation) << "," << csv::fmt(r.far_violation) << ","
        << csv::fmt(r.band_violation) << "," << r.iterations << ","
        << (r.status == LPStatus::Optimal ? "optimal" : "max_iter") << "\n";
  }
  files.push_back(rp);
  report(files);
  return 0;
}

// --- bench -----------------------------------------------------------------

int cmd_bench(const Common& c, int reps) {
  Config cfg = load(c);
  const std::string out = c.out.empty() ? "out/bench" : c.out;
  experiments::ReconBundle last;
  const auto t = bench::time_it([&] { last = experiments::run_recon(cfg); }, reps);
  experiments::Output o;
  o.tables.push_back({"bench.csv",
                      {"method", "p", "Nx", "J", "reps", "median_s", "min_s", "max_s", "iterations"},
                      {{cfg.str("method", "cf_vbjs_mmv"), cfg.str("p", "1"),
                        std::to_string(last.grid.Nx), cfg.str("J", "default"), std::to_string(reps),
                        csv::fmt(t.median), csv::fmt(t.min), csv::fmt(t.max),
                        std::to_string(last.result.solve.iterations)}}});
  report(experiments::write_output(o, "bench", cfg, out, t.median * reps));
  std::printf("median %.6f s over %d runs\n", t.median, reps);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VBJS recovery of piecewise-smooth signals from Fourier data"};
  app.require_subcommand(1);

  Common rc;
  auto* recon = app.add_subcommand("recon", "run one pipeline from a config");
  add_common(recon, rc, false);

  EdgesArgs ea;
  auto* edges = app.add_subcommand("edges", "concentration-factor edge maps from a data CSV");
  edges->add_option("--data", ea.data, "Fourier data CSV (k,re,im,known)")->required();
  edges->add_option("--alpha", ea.alphas, "exponential orders")->delimiter(',');
  edges->add_option("--factor", ea.factors, "factor CSV files (k,sigma_k)")->delimiter(',');
  edges->add_option("--tau", ea.tau, "detection threshold");
  edges->add_flag("--weights", ea.weights, "append S, v, T, w columns");
  edges->add_option("--out", ea.out, "output CSV (stdout if omitted)");

  DesignArgs da;
  auto* design = app.add_subcommand("design-cf", "design factors for missing-band masks");
  design->add_option("--N", da.N, "bandwidth")->check(CLI::Range(8, 4096));
  design->add_option("--mask", da.mask, "none | full | example | example:j | a-b;c-d");
  design->add_option("--delta1", da.d1);
  design->add_option("--delta2", da.d2);
  design->add_option("--delta3", da.d3);
  design->add_option("--delta4", da.d4);
  design->add_option("--out", da.out, "output directory");

  Common bc;
  int reps = 5;
  auto* bench_cmd = app.add_subcommand("bench", "time one pipeline (median of repetitions)");
  add_common(bench_cmd, bc, false);
  bench_cmd->add_option("--reps", reps)->check(CLI::PositiveNumber);

  Common xc;
  std::string name;
  auto* exp = app.add_subcommand("experiment", "run a named experiment");
  exp->add_option("name", name, "experiment name")->required()->check(CLI::IsMember(experiments::names()));
  add_common(exp, xc, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_ = app.exit(e);
    return rc_ == 0 ? 0 : 2;
  }

  try {
    if (*recon) {
      Config cfg = load(rc);
      const auto t0 = std::chrono::steady_clock::now();
      const auto out = experiments::run_named("custom", cfg, 1);
      report(experiments::write_output(out, "recon", cfg, rc.out.empty() ? "out/recon" : rc.out,
                                       since(t0)));
    } else if (*edges) {
      return cmd_edges(ea);
    } else if (*design) {
      return cmd_design(da);
    } else if (*bench_cmd) {
      return cmd_bench(bc, reps);
    } else if (*exp) {
      Config cfg = load(xc);
      const int workers = bench::resolve_workers(xc.parallel);
      const auto t0 = std::chrono::steady_clock::now();
      const auto out = experiments::run_named(name, cfg, workers);
      report(experiments::write_output(out, name, cfg, xc.out.empty() ? "out/" + name : xc.out,
                                       since(t0)));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
