#include "vbjs/cf_edge.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "vbjs/csv.hpp"
#include "vbjs/fft.hpp"

namespace vbjs {

namespace {

double exp_profile(double t, double alpha) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(1.0 / (alpha * t * (t - 1.0)));
}

double sgn(int k) { return (k > 0) - (k < 0); }

}  // namespace

ConcentrationFactor ConcentrationFactor::designed(Vector values) {
  ConcentrationFactor cf;
  cf.N = static_cast<int>(values.size());
  cf.kind = CFKind::Designed;
  cf.values = std::move(values);
  return cf;
}

double exponential_cf_constant(int N, double alpha) {
  if (N < 2) throw InvalidArgument("exponential factor needs N >= 2");
  if (!(alpha > 0.0)) throw InvalidArgument("exponential factor order alpha must be positive");
  // composite Simpson, 2000 panels
  const int n = 2000;
  const double a = 1.0 / N;
  const double b = 1.0 - 1.0 / N;
  const double h = (b - a) / n;
  double s = exp_profile(a, alpha) + exp_profile(b, alpha);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * exp_profile(a + i * h, alpha);
  const double integral = s * h / 3.0;
  if (!(integral > 0.0)) throw InvalidArgument("exponential factor normalization underflows");
  return M_PI / integral;
}

ConcentrationFactor exponential_cf(int N, double alpha) {
  const double C = exponential_cf_constant(N, alpha);
  ConcentrationFactor cf;
  cf.N = N;
  cf.kind = CFKind::Exponential;
  cf.alpha = alpha;
  cf.values.resize(N);
  for (int k = 1; k <= N; ++k) {
    const double eta = double(k) / N;
    cf.values(k - 1) = C * eta * exp_profile(eta, alpha);
  }
  return cf;
}

EdgeMap concentration_edge(const FourierData& data, const ConcentrationFactor& cf,
                           EdgeMethod method) {
  const Grid1D& g = data.grid;
  if (cf.N != g.N) throw DimensionError("concentration factor bandwidth != data bandwidth");
  CVector c(g.modes());
  for (int k = -g.N; k <= g.N; ++k) {
    const Complex fk = data.is_known(k) ? data.at(k) : Complex(0.0);
    c(k + g.N) = Complex(0.0, 1.0) * fk * sgn(k) * cf(k);
  }
  CVector vals;
  if (method == EdgeMethod::Direct) {
    vals = CVector::Zero(g.Nx);
    for (int j = 0; j < g.Nx; ++j) {
      Complex s = 0.0;
      for (int k = -g.N; k <= g.N; ++k) s += c(k + g.N) * std::polar(1.0, g.omega(k) * g.x(j));
      vals(j) = s;
    }
  } else {
    CVector bucket = CVector::Zero(g.Nx);
    for (int k = -g.N; k <= g.N; ++k) bucket(fft::wrap(k, g.Nx)) += std::conj(g.phase(k)) * c(k + g.N);
    vals = fft::backward(bucket);
  }
  EdgeMap out;
  out.values = vals.real();
  out.imag_residual = vals.size() ? vals.imag().cwiseAbs().maxCoeff() : 0.0;
  return out;
}

std::pair<Matrix, Matrix> edge_maps_2d(const FourierData2D& data, const ConcentrationFactor& cf) {
  data.validate();
  if (data.gx.N != data.gy.N || data.gx.Nx != data.gy.Nx) {
    throw DimensionError("edge_maps_2d: coefficient array must be square");
  }
  if (cf.N != data.gx.N) throw DimensionError("concentration factor bandwidth != data bandwidth");
  const int N = data.gx.N;
  const int n = data.gx.Nx;
  CMatrix bx = CMatrix::Zero(n, n);
  CMatrix by = CMatrix::Zero(n, n);
  for (int ky = -N; ky <= N; ++ky) {
    const auto ry = fft::wrap(ky, n);
    const Complex py = std::conj(data.gy.phase(ky));
    for (int kx = -N; kx <= N; ++kx) {
      if (!data.known(kx + N, ky + N)) continue;
      const Complex base =
          Complex(0.0, 1.0) * data.coeffs(kx + N, ky + N) * std::conj(data.gx.phase(kx)) * py;
      const auto rx = fft::wrap(kx, n);
      bx(rx, ry) += base * sgn(kx) * cf(kx);
      by(rx, ry) += base * sgn(ky) * cf(ky);
    }
  }
  return {fft::backward2(bx).real(), fft::backward2(by).real()};
}

AdmissibilityReport admissibility_report(const ConcentrationFactor& cf) {
  AdmissibilityReport r;
  const int N = cf.N;
  if (N < 1) return r;
  // trapezoid on eta_k = k/N; sigma(eta)/eta * d eta = sigma_k / k
  double s = 0.0;
  for (int k = 1; k <= N; ++k) s += (k == 1 || k == N ? 0.5 : 1.0) * cf.values(k - 1) / k;
  r.normalization = s;
  double smooth = 0.0;
  for (int k = 2; k < N; ++k) {
    auto h = [&](int i) { return cf.values(i - 1) * N / i; };
    smooth = std::max(smooth, std::abs(h(k + 1) - 2.0 * h(k) + h(k - 1)));
  }
  r.smoothness_proxy = smooth;
  r.odd_kernel = true;
  r.admissible = cf.kind == CFKind::Exponential &&
                 std::abs(std::abs(r.normalization) - M_PI) <= 0.02 * M_PI;
  return r;
}

void write_cf_csv(std::ostream& os, const ConcentrationFactor& cf) {
  os << "k,sigma_k\n";
  for (int k = 1; k <= cf.N; ++k) os << k << ',' << csv::fmt(cf.values(k - 1)) << '\n';
}

ConcentrationFactor read_cf_csv(std::istream& is) {
  const auto t = csv::Table::parse(is);
  t.require({"k", "sigma_k"});
  const int N = static_cast<int>(t.rows());
  if (N < 1) throw ConfigError("factor CSV has no rows");
  Vector v = Vector::Zero(N);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const int k = static_cast<int>(t.num(r, "k"));
    if (k < 1 || k > N) throw ConfigError("factor CSV: k out of range 1..N");
    v(k - 1) = t.num(r, "sigma_k");
  }
  return ConcentrationFactor::designed(std::move(v));
}

}  // namespace vbjs
