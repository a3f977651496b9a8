#include "vbjs/pipelines.hpp"

#include <cmath>
#include <map>

namespace vbjs {

namespace {

Matrix edge_matrix(const std::vector<FourierData>& data, const std::vector<ConcentrationFactor>& cfs) {
  const int Nx = data.front().grid.Nx;
  Matrix P(Nx, static_cast<Eigen::Index>(cfs.size()));
  for (std::size_t j = 0; j < cfs.size(); ++j) {
    P.col(j) = concentration_edge(data[data.size() == 1 ? 0 : j], cfs[j]).values;
  }
  return P;
}

ConcentrationFactor zeroed_exponential(int N, double alpha, const std::set<int>& K) {
  ConcentrationFactor cf = exponential_cf(N, alpha);
  for (int k : K) cf.values(k - 1) = 0.0;
  return cf;
}

std::vector<ConcentrationFactor> smv_factors(int N, const PipelineConfig& cfg) {
  if (!cfg.factors.empty()) {
    for (const auto& f : cfg.factors) require_dim(f.N == N, "explicit factor bandwidth != data bandwidth");
    return cfg.factors;
  }
  std::vector<ConcentrationFactor> out;
  for (double a : cfg.alphas) out.push_back(exponential_cf(N, a));
  return out;
}

ReconProblem make_problem(const FourierData& d, const PipelineConfig& cfg, Vector w) {
  return ReconProblem{d, build_pa(cfg.m, d.grid.Nx), std::move(w), cfg.p, cfg.fidelity_weight};
}

Vector stack(const Matrix& a, const Matrix& b) {
  Vector v(a.size() + b.size());
  v << Eigen::Map<const Vector>(a.data(), a.size()), Eigen::Map<const Vector>(b.data(), b.size());
  return v;
}

Vector flat(const Matrix& a) { return Eigen::Map<const Vector>(a.data(), a.size()); }

PipelineResult2D finish_2d(const MeasurementSet2D& ms, const PipelineConfig& cfg, const Matrix& Px,
                           const Matrix& Py, const std::vector<Vector>& both) {
  const int n = ms.front().gx.Nx;
  const double tau = cfg.tau_for(ms.front().gx.N);
  PipelineResult2D r;
  r.wx = build_weights(Px, tau, cfg.rule);
  r.wy = build_weights(Py, tau, cfg.rule);
  r.W = combine_2d(Eigen::Map<const Matrix>(r.wx.w.data(), n, n),
                   Eigen::Map<const Matrix>(r.wy.w.data(), n, n));
  r.j_star = select_best(both);
  ReconProblem2D prob{ms[r.j_star], build_pa(cfg.m, n), r.W, cfg.p, cfg.fidelity_weight};
  r.solve = solve_weighted_2d(prob, cfg.solver);
  r.recon = r.solve.q;
  return r;
}

void check_2d(const MeasurementSet2D& ms) {
  if (ms.size() < 2) throw InvalidArgument("2D pipeline needs J >= 2 measurements");
  for (const auto& d : ms) {
    d.validate();
    require_dim(d.gx == ms.front().gx && d.gy == ms.front().gy, "2D measurements use different grids");
  }
  require_dim(ms.front().gx.Nx == ms.front().gy.Nx && ms.front().gx.N == ms.front().gy.N,
              "2D pipeline expects square data");
}

}  // namespace

Method parse_method(const std::string& s) {
  if (s == "cf_vbjs_mmv") return Method::CfVbjsMmv;
  if (s == "cf_vbjs_smv") return Method::CfVbjsSmv;
  if (s == "vbjs_baseline") return Method::VbjsBaseline;
  if (s == "cf_vbjs_2d") return Method::CfVbjs2d;
  if (s == "masked") return Method::Masked;
  throw ConfigError("unknown method '" + s + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::CfVbjsMmv: return "cf_vbjs_mmv";
    case Method::CfVbjsSmv: return "cf_vbjs_smv";
    case Method::VbjsBaseline: return "vbjs_baseline";
    case Method::CfVbjs2d: return "cf_vbjs_2d";
    case Method::Masked: return "masked";
  }
  return "?";
}

std::vector<double> default_alphas(int J) {
  std::vector<double> a;
  for (int j = 1; j <= J; ++j) a.push_back(2.0 * j);
  return a;
}

PipelineResult run_cf_vbjs_mmv(const MeasurementSet& ms, const PipelineConfig& cfg) {
  validate(ms);
  const int J = static_cast<int>(ms.size());
  if (J < 2) throw InvalidArgument("Algorithm 1 needs J >= 2 measurements");
  const int N = ms.front().N();
  if (cfg.alphas.size() != 1 && cfg.alphas.size() != static_cast<std::size_t>(J)) {
    throw InvalidArgument("MMV needs one exponential order or one per measurement");
  }
  auto alpha = [&](int j) { return cfg.alphas.size() == 1 ? cfg.alphas[0] : cfg.alphas[j]; };

  PipelineResult r;
  if (!cfg.factors.empty() && cfg.factors.size() != static_cast<std::size_t>(J)) {
    throw InvalidArgument("MMV needs one explicit factor per measurement");
  }
  std::map<std::set<int>, ConcentrationFactor> designed;
  for (int j = 0; j < J; ++j) {
    if (!cfg.factors.empty()) {
      require_dim(cfg.factors[j].N == N, "explicit factor bandwidth != data bandwidth");
      r.factors.push_back(cfg.factors[j]);
      continue;
    }
    if (!cfg.use_icf) {
      r.factors.push_back(exponential_cf(N, alpha(j)));
      continue;
    }
    const std::set<int> K = missing_set(ms[j]);
    auto it = designed.find(K);
    if (it == designed.end()) {
      ICFParams p = cfg.icf;
      p.N = N;
      p.K = K;
      p.grid = ms[j].grid;
      try {
        it = designed.emplace(K, design_icf(p).cf).first;
      } catch (const InfeasibleError&) {
        ++r.icf_fallbacks;
        it = designed.emplace(K, zeroed_exponential(N, alpha(j), K)).first;
      }
    }
    r.factors.push_back(it->second);
  }
  r.P = edge_matrix(ms, r.factors);
  r.weights = build_weights(r.P, cfg.tau_for(N), cfg.rule);
  r.j_star = select_best(r.P);
  r.applied_weights = r.weights.w;
  r.solve = solve_weighted(make_problem(ms[r.j_star], cfg, r.applied_weights), cfg.solver);
  r.recon = r.solve.q;
  return r;
}

PipelineResult run_cf_vbjs_smv(const FourierData& data, const PipelineConfig& cfg) {
  data.validate();
  PipelineResult r;
  r.factors = smv_factors(data.N(), cfg);
  if (r.factors.size() < 2) throw InvalidArgument("Algorithm 2 needs J >= 2 concentration factors");
  r.P = edge_matrix({data}, r.factors);
  r.weights = build_weights(r.P, cfg.tau_for(data.N()), cfg.rule);
  r.applied_weights = r.weights.w;
  r.solve = solve_weighted(make_problem(data, cfg, r.applied_weights), cfg.solver);
  r.recon = r.solve.q;
  return r;
}

PipelineResult run_masked(const FourierData& data, const PipelineConfig& cfg) {
  data.validate();
  PipelineResult r;
  r.factors = smv_factors(data.N(), cfg);
  if (r.factors.size() < 2) throw InvalidArgument("masked variant needs J >= 2 concentration factors");
  r.P = edge_matrix({data}, r.factors);
  r.weights = build_weights(r.P, cfg.tau_for(data.N()), cfg.rule);
  r.applied_weights = build_mask(r.weights, cfg.tau_tilde);
  r.solve = solve_weighted(make_problem(data, cfg, r.applied_weights), cfg.solver);
  r.recon = r.solve.q;
  return r;
}

PipelineResult run_vbjs_baseline(const MeasurementSet& ms, const PipelineConfig& cfg) {
  validate(ms);
  const int Jt = static_cast<int>(ms.size());
  const int J = cfg.baseline_J > 0 ? cfg.baseline_J : Jt;
  if (J < 2) throw InvalidArgument("Algorithm 3 needs J >= 2 approximations");
  const int Nx = ms.front().grid.Nx;
  const PAOperator L = build_pa(cfg.m, Nx);
  const double mu = make_problem(ms.front(), cfg, Vector::Ones(Nx)).mu();

  PipelineResult r;
  r.P.resize(Nx, J);
  for (int j = 0; j < J; ++j) {
    const FourierData& d = ms[j % Jt];
    double lam = cfg.lambda > 0.0 ? cfg.lambda : default_lambda(d, L, mu);
    // a single measurement yields distinct approximations through lambda
    if (J != Jt) lam *= 2.0 * (j + 1) / (J + 1);
    const SolveResult s = solve_classic_l1(d, L, lam, cfg.solver, mu);
    r.P.col(j) = L.apply(s.q);
  }
  r.weights = build_weights(r.P, cfg.tau_for(ms.front().N()), cfg.rule);
  r.j_star = select_best(r.P) % Jt;
  r.applied_weights = r.weights.w;
  r.solve = solve_weighted(make_problem(ms[r.j_star], cfg, r.applied_weights), cfg.solver);
  r.recon = r.solve.q;
  return r;
}

PipelineResult run_pipeline(const MeasurementSet& ms, const PipelineConfig& cfg) {
  switch (cfg.method) {
    case Method::CfVbjsMmv: return run_cf_vbjs_mmv(ms, cfg);
    case Method::CfVbjsSmv: return run_cf_vbjs_smv(ms.at(0), cfg);
    case Method::Masked: return run_masked(ms.at(0), cfg);
    case Method::VbjsBaseline: return run_vbjs_baseline(ms, cfg);
    case Method::CfVbjs2d: break;
  }
  throw InvalidArgument("run_pipeline: 2D method needs 2D data");
}

PipelineResult2D run_cf_vbjs_2d(const MeasurementSet2D& ms, const PipelineConfig& cfg) {
  check_2d(ms);
  const int n = ms.front().gx.Nx;
  const int J = static_cast<int>(ms.size());
  const ConcentrationFactor cf = exponential_cf(ms.front().gx.N, cfg.alphas.at(0));
  Matrix Px(n * n, J), Py(n * n, J);
  std::vector<Vector> both;
  for (int j = 0; j < J; ++j) {
    const auto [gx, gy] = edge_maps_2d(ms[j], cf);
    Px.col(j) = flat(gx);
    Py.col(j) = flat(gy);
    both.push_back(stack(gx, gy));
  }
  return finish_2d(ms, cfg, Px, Py, both);
}

PipelineResult2D run_vbjs_baseline_2d(const MeasurementSet2D& ms, const PipelineConfig& cfg) {
  check_2d(ms);
  const int n = ms.front().gx.Nx;
  const int J = static_cast<int>(ms.size());
  const PAOperator L = build_pa(cfg.m, n);
  Matrix Px(n * n, J), Py(n * n, J);
  std::vector<Vector> both;
  for (int j = 0; j < J; ++j) {
    ReconProblem2D prob{ms[j], L, Matrix(), 1, cfg.fidelity_weight};
    const Matrix b = fidelity_rhs(ms[j], prob.mu());
    double lam = cfg.lambda;
    if (lam <= 0.0) {
      lam = 0.05 * std::max(L.apply_x_transpose(b).cwiseAbs().maxCoeff(),
                            L.apply_y_transpose(b).cwiseAbs().maxCoeff());
    }
    if (!(lam > 0.0)) lam = 1.0;
    prob.weights = Matrix::Constant(n, n, lam);
    const Matrix f = solve_weighted_2d(prob, cfg.solver).q;
    const Matrix gx = L.apply_x(f);
    const Matrix gy = L.apply_y(f);
    Px.col(j) = flat(gx);
    Py.col(j) = flat(gy);
    both.push_back(stack(gx, gy));
  }
  return finish_2d(ms, cfg, Px, Py, both);
}

double raised_cosine(int k, int N) { return 0.5 * (1.0 + std::cos(M_PI * std::abs(k) / N)); }

Vector filtered_fourier_sum(const FourierData& data) {
  const Grid1D& g = data.grid;
  CVector c(g.modes());
  for (int k = -g.N; k <= g.N; ++k) {
    c(k + g.N) = data.is_known(k) ? raised_cosine(k, g.N) * data.at(k) : Complex(0.0);
  }
  return double(g.Nx) * adjoint_apply(c, g).real();
}

Matrix filtered_fourier_sum_2d(const FourierData2D& data) {
  const int N = data.gx.N;
  CMatrix c = CMatrix::Zero(data.coeffs.rows(), data.coeffs.cols());
  for (int kx = -N; kx <= data.gx.N; ++kx) {
    for (int ky = -data.gy.N; ky <= data.gy.N; ++ky) {
      if (!data.known(kx + N, ky + data.gy.N)) continue;
      c(kx + N, ky + data.gy.N) = raised_cosine(kx, N) * raised_cosine(ky, data.gy.N) *
                                  data.coeffs(kx + N, ky + data.gy.N);
    }
  }
  return double(data.gx.Nx) * data.gy.Nx * adjoint_apply_2d(c, data.gx, data.gy).real();
}

}  // namespace vbjs
