#include "vbjs/icf_design.hpp"

#include <cmath>
#include <string>

namespace vbjs {

namespace {

const Grid1D& grid_of(const ICFParams& p, Grid1D& scratch) {
  if (p.grid.Nx != 0) return p.grid;
  scratch = Grid1D::standard(p.N);
  return scratch;
}

// A(j, k-1) = cos(k x_j) / (pi k)
Matrix cosine_matrix(int N, const Grid1D& grid) {
  Matrix A(grid.Nx, N);
  for (int j = 0; j < grid.Nx; ++j) {
    for (int k = 1; k <= N; ++k) A(j, k - 1) = std::cos(k * grid.x(j)) / (M_PI * k);
  }
  return A;
}

}  // namespace

ICFParams ICFParams::defaults(int N, std::set<int> K) {
  ICFParams p;
  p.N = N;
  p.K = std::move(K);
  p.grid = Grid1D::standard(N);
  return p;
}

KernelTable w_kernel(const ConcentrationFactor& cf, int q, const Grid1D& grid) {
  if (q < 0) throw InvalidArgument("kernel order q must be >= 0");
  if (cf.N != grid.N) throw DimensionError("factor bandwidth != grid bandwidth");
  // 1 / i^q
  static const Complex inv_iq[4] = {1.0, Complex(0, -1), -1.0, Complex(0, 1)};
  const Complex pre = inv_iq[q % 4] / (2.0 * M_PI);
  KernelTable t;
  t.q = q;
  t.values = Vector::Zero(grid.Nx);
  for (int j = 0; j < grid.Nx; ++j) {
    Complex s = 0.0;
    for (int k = 1; k <= cf.N; ++k) {
      const double a = cf(k) / std::pow(double(k), q + 1);
      // sgn(-k) (-k)^-(q+1) = (-1)^q k^-(q+1)
      const double b = (q % 2 == 0) ? a : -a;
      s += a * std::polar(1.0, k * grid.x(j)) + b * std::polar(1.0, -k * grid.x(j));
    }
    t.values(j) = (pre * s).real();
  }
  return t;
}

double w0_cosine(const ConcentrationFactor& cf, double x) {
  double s = 0.0;
  for (int k = 1; k <= cf.N; ++k) s += cf(k) * std::cos(k * x) / k;
  return s / M_PI;
}

double w0_l1(const ConcentrationFactor& cf, const Grid1D& grid) {
  return (cosine_matrix(cf.N, grid) * cf.values).cwiseAbs().sum();
}

double DesignReport::max_violation() const {
  return std::max({jump_violation, far_violation, band_violation});
}

DesignReport evaluate_design(const ConcentrationFactor& cf, const ICFParams& params) {
  Grid1D scratch;
  const Grid1D& grid = grid_of(params, scratch);
  require_dim(cf.N == params.N, "factor bandwidth != design bandwidth");
  const Vector w = cosine_matrix(params.N, grid) * cf.values;
  DesignReport r;
  r.objective = w.cwiseAbs().sum();
  r.jump_violation = std::max(0.0, std::abs(w0_cosine(cf, 0.0) - 1.0) - params.delta1);
  double far = 0.0;
  for (int j = 0; j < grid.Nx; ++j) {
    if (std::abs(grid.x(j)) >= params.delta2) far = std::max(far, std::abs(w(j)));
  }
  r.far_violation = std::max(0.0, far - params.delta3);
  double band = 0.0;
  for (int k : params.K) band = std::max(band, std::abs(cf(k)));
  r.band_violation = params.K.empty() ? 0.0 : std::max(0.0, band - params.delta4);
  return r;
}

DesignResult design_icf(const ICFParams& params, const LPOptions& opts) {
  const int N = params.N;
  if (N < 1) throw InvalidArgument("design bandwidth N must be >= 1");
  if (!(params.delta1 > 0 && params.delta2 > 0 && params.delta3 > 0 && params.delta4 > 0)) {
    throw InvalidArgument("design tolerances must be positive");
  }
  for (int k : params.K) {
    if (k < 1 || k > N) throw InvalidArgument("missing index out of range 1..N");
  }
  if (static_cast<int>(params.K.size()) == N) {
    throw InfeasibleError("every mode is masked: no factor can reach the jump height");
  }
  Grid1D scratch;
  const Grid1D& grid = grid_of(params, scratch);
  const int Nx = grid.Nx;
  const Matrix A = cosine_matrix(N, grid);

  std::vector<int> far;
  for (int j = 0; j < Nx; ++j) {
    if (std::abs(grid.x(j)) >= params.delta2) far.push_back(j);
  }
  const int nK = static_cast<int>(params.K.size());
  const int rows = 2 * Nx + 2 + 2 * static_cast<int>(far.size()) + 2 * nK;
  const int cols = N + Nx;

  LPProblem lp;
  lp.c = Vector::Zero(cols);
  lp.c.tail(Nx).setOnes();
  lp.G = Matrix::Zero(rows, cols);
  lp.h = Vector::Zero(rows);
  int r = 0;
  // |A sigma| <= t
  lp.G.block(r, 0, Nx, N) = A;
  lp.G.block(r, N, Nx, Nx) = -Matrix::Identity(Nx, Nx);
  r += Nx;
  lp.G.block(r, 0, Nx, N) = -A;
  lp.G.block(r, N, Nx, Nx) = -Matrix::Identity(Nx, Nx);
  r += Nx;
  // |W_0(0) - 1| <= delta1
  for (int k = 1; k <= N; ++k) {
    lp.G(r, k - 1) = 1.0 / (M_PI * k);
    lp.G(r + 1, k - 1) = -1.0 / (M_PI * k);
  }
  lp.h(r) = 1.0 + params.delta1;
  lp.h(r + 1) = -(1.0 - params.delta1);
  r += 2;
  for (int j : far) {
    lp.G.block(r, 0, 1, N) = A.row(j);
    lp.G.block(r + 1, 0, 1, N) = -A.row(j);
    lp.h(r) = params.delta3;
    lp.h(r + 1) = params.delta3;
    r += 2;
  }
  for (int k : params.K) {
    lp.G(r, k - 1) = 1.0;
    lp.G(r + 1, k - 1) = -1.0;
    lp.h(r) = params.delta4;
    lp.h(r + 1) = params.delta4;
    r += 2;
  }

  const LPResult sol = solve_lp(lp, opts);
  DesignResult out;
  out.cf = ConcentrationFactor::designed(sol.x.head(N));
  out.report = evaluate_design(out.cf, params);
  out.report.iterations = sol.iterations;
  out.report.status = sol.status;
  const double viol = out.report.max_violation();
  if (sol.status == LPStatus::Infeasible ||
      (sol.status != LPStatus::Optimal && viol > 10.0 * 1e-8)) {
    throw InfeasibleError("concentration factor design is infeasible (max violation " +
                          std::to_string(viol) + ")");
  }
  return out;
}

}  // namespace vbjs
