#include "vbjs/signal_models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "vbjs/csv.hpp"
#include "vbjs/fft.hpp"
#include "vbjs/rng.hpp"

namespace vbjs {

namespace {

Grid1D make_grid(int N, int Nx, double lo, double period) {
  if (N < 1) throw InvalidArgument("bandwidth N must be >= 1");
  if (Nx == 0) Nx = 2 * N;
  if (Nx < 2) throw InvalidArgument("grid size Nx must be >= 2");
  return Grid1D{N, Nx, lo, period};
}

Complex phase(const Grid1D& g, int k) { return g.phase(k); }

}  // namespace

Grid1D Grid1D::standard(int N, int Nx) { return make_grid(N, Nx, -M_PI, 2.0 * M_PI); }
Grid1D Grid1D::unit(int N, int Nx) { return make_grid(N, Nx, -1.0, 2.0); }

// For the symmetric grids used here this is (-1)^k exactly.
Complex Grid1D::phase(int k) const {
  if (lo == -0.5 * period) return (k % 2 == 0) ? Complex(1.0) : Complex(-1.0);
  return std::polar(1.0, -omega(k) * lo);
}

Vector Grid1D::points() const {
  Vector p(Nx);
  for (int j = 0; j < Nx; ++j) p(j) = x(j);
  return p;
}

int Grid1D::nearest(double xs) const {
  int best = 0;
  double bd = std::abs(x(0) - xs);
  for (int j = 1; j < Nx; ++j) {
    const double d = std::abs(x(j) - xs);
    if (d < bd) {
      bd = d;
      best = j;
    }
  }
  return best;
}

FourierData FourierData::zeros(const Grid1D& grid) {
  FourierData d;
  d.grid = grid;
  d.coeffs = CVector::Zero(grid.modes());
  d.known = BoolVector::Constant(grid.modes(), true);
  return d;
}

int FourierData::unknown_count() const { return static_cast<int>((!known).count()); }

void FourierData::drop(int k) {
  for (int s : {k, -k}) {
    at(s) = 0.0;
    known(s + grid.N) = false;
  }
}

void FourierData::validate() const {
  require_dim(coeffs.size() == grid.modes(), "FourierData: coefficient count != 2N+1");
  require_dim(known.size() == grid.modes(), "FourierData: mask length != 2N+1");
  for (int i = 0; i < coeffs.size(); ++i) {
    if (!known(i) && coeffs(i) != Complex(0.0)) {
      throw InvalidArgument("FourierData: unknown coefficient stored as nonzero");
    }
  }
}

void validate(const MeasurementSet& ms) {
  if (ms.empty()) throw InvalidArgument("measurement set is empty");
  for (const auto& d : ms) {
    d.validate();
    require_dim(d.grid == ms.front().grid, "measurement set members use different grids");
  }
}

Vector PiecewiseSignal::sample(const Grid1D& grid) const {
  Vector v(grid.Nx);
  for (int j = 0; j < grid.Nx; ++j) v(j) = f(grid.x(j));
  return v;
}

double ramp(double x) {
  return x <= 0.0 ? (-x - M_PI) / (2.0 * M_PI) : (M_PI - x) / (2.0 * M_PI);
}

PiecewiseSignal ramp_signal() { return PiecewiseSignal{ramp, {Jump{0.0, 1.0}}}; }

FourierData ramp_exact_coeffs(int N, int Nx) {
  FourierData d = FourierData::zeros(Grid1D::standard(N, Nx));
  for (int k = -N; k <= N; ++k) {
    if (k != 0) d.at(k) = 1.0 / Complex(0.0, 2.0 * M_PI * k);
  }
  return d;
}

CVector forward_apply(const Vector& f, const Grid1D& grid) {
  require_dim(f.size() == grid.Nx, "forward_apply: signal length != Nx");
  const CVector F = fft::forward(f.cast<Complex>());
  CVector out(grid.modes());
  for (int k = -grid.N; k <= grid.N; ++k) {
    out(k + grid.N) = phase(grid, k) * F(fft::wrap(k, grid.Nx)) / double(grid.Nx);
  }
  return out;
}

CVector adjoint_apply(const CVector& c, const Grid1D& grid) {
  require_dim(c.size() == grid.modes(), "adjoint_apply: coefficient count != 2N+1");
  CVector bucket = CVector::Zero(grid.Nx);
  for (int k = -grid.N; k <= grid.N; ++k) {
    bucket(fft::wrap(k, grid.Nx)) += std::conj(phase(grid, k)) * c(k + grid.N);
  }
  return fft::backward(bucket) / double(grid.Nx);
}

CVector forward_apply_direct(const Vector& f, const Grid1D& grid) {
  require_dim(f.size() == grid.Nx, "forward_apply: signal length != Nx");
  CVector out = CVector::Zero(grid.modes());
  for (int k = -grid.N; k <= grid.N; ++k) {
    Complex s = 0.0;
    for (int j = 0; j < grid.Nx; ++j) s += f(j) * std::polar(1.0, -grid.omega(k) * grid.x(j));
    out(k + grid.N) = s / double(grid.Nx);
  }
  return out;
}

CVector adjoint_apply_direct(const CVector& c, const Grid1D& grid) {
  require_dim(c.size() == grid.modes(), "adjoint_apply: coefficient count != 2N+1");
  CVector out = CVector::Zero(grid.Nx);
  for (int j = 0; j < grid.Nx; ++j) {
    Complex s = 0.0;
    for (int k = -grid.N; k <= grid.N; ++k) {
      s += c(k + grid.N) * std::polar(1.0, grid.omega(k) * grid.x(j));
    }
    out(j) = s / double(grid.Nx);
  }
  return out;
}

CMatrix forward_matrix(const Grid1D& grid) {
  CMatrix F(grid.modes(), grid.Nx);
  for (int k = -grid.N; k <= grid.N; ++k) {
    for (int j = 0; j < grid.Nx; ++j) {
      F(k + grid.N, j) = std::polar(1.0, -grid.omega(k) * grid.x(j)) / double(grid.Nx);
    }
  }
  return F;
}

FourierData fourier_data(const Vector& f, const Grid1D& grid) {
  FourierData d = FourierData::zeros(grid);
  d.coeffs = forward_apply(f, grid);
  return d;
}

// ---------------------------------------------------------------------------

FourierData2D FourierData2D::zeros(const Grid1D& gx, const Grid1D& gy) {
  FourierData2D d;
  d.gx = gx;
  d.gy = gy;
  d.coeffs = CMatrix::Zero(gx.modes(), gy.modes());
  d.known = BoolMatrix::Constant(gx.modes(), gy.modes(), true);
  return d;
}

void FourierData2D::validate() const {
  require_dim(coeffs.rows() == gx.modes() && coeffs.cols() == gy.modes(),
              "FourierData2D: coefficient array shape mismatch");
  require_dim(known.rows() == coeffs.rows() && known.cols() == coeffs.cols(),
              "FourierData2D: mask shape mismatch");
}

double scene2d_value(double x, double y) {
  const double r = std::sqrt(x * x + y * y);
  return r <= 0.5 ? 10.0 * std::cos(1.5 * M_PI * r) : 10.0 * std::cos(0.5 * M_PI * r);
}

CMatrix forward_apply_2d(const Matrix& f, const Grid1D& gx, const Grid1D& gy) {
  require_dim(f.rows() == gx.Nx && f.cols() == gy.Nx, "forward_apply_2d: shape mismatch");
  const CMatrix F = fft::forward2(f.cast<Complex>());
  CMatrix out(gx.modes(), gy.modes());
  const double scale = 1.0 / (double(gx.Nx) * gy.Nx);
  for (int ky = -gy.N; ky <= gy.N; ++ky) {
    const Complex py = phase(gy, ky);
    const auto ry = fft::wrap(ky, gy.Nx);
    for (int kx = -gx.N; kx <= gx.N; ++kx) {
      out(kx + gx.N, ky + gy.N) = phase(gx, kx) * py * F(fft::wrap(kx, gx.Nx), ry) * scale;
    }
  }
  return out;
}

CMatrix adjoint_apply_2d(const CMatrix& c, const Grid1D& gx, const Grid1D& gy) {
  require_dim(c.rows() == gx.modes() && c.cols() == gy.modes(),
              "adjoint_apply_2d: shape mismatch");
  CMatrix bucket = CMatrix::Zero(gx.Nx, gy.Nx);
  for (int ky = -gy.N; ky <= gy.N; ++ky) {
    const Complex py = std::conj(phase(gy, ky));
    const auto ry = fft::wrap(ky, gy.Nx);
    for (int kx = -gx.N; kx <= gx.N; ++kx) {
      bucket(fft::wrap(kx, gx.Nx), ry) += std::conj(phase(gx, kx)) * py * c(kx + gx.N, ky + gy.N);
    }
  }
  return fft::backward2(bucket) / (double(gx.Nx) * gy.Nx);
}

FourierData2D fourier_data_2d(const Matrix& f, const Grid1D& gx, const Grid1D& gy) {
  FourierData2D d = FourierData2D::zeros(gx, gy);
  d.coeffs = forward_apply_2d(f, gx, gy);
  return d;
}

Scene2D sample_scene2d(int N) {
  Scene2D s;
  s.gx = Grid1D::unit(N);
  s.gy = Grid1D::unit(N);
  s.samples.resize(s.gx.Nx, s.gy.Nx);
  for (int i = 0; i < s.gx.Nx; ++i) {
    for (int j = 0; j < s.gy.Nx; ++j) s.samples(i, j) = scene2d_value(s.gx.x(i), s.gy.x(j));
  }
  s.coeffs = forward_apply_2d(s.samples, s.gx, s.gy);
  return s;
}

// ---------------------------------------------------------------------------

double noise_level(const FourierData& data, double snr_db) {
  double sum = 0.0;
  int n = 0;
  for (int i = 0; i < data.coeffs.size(); ++i) {
    if (data.known(i)) {
      sum += std::abs(data.coeffs(i));
      ++n;
    }
  }
  if (n == 0) return 0.0;
  return sum / n * std::pow(10.0, -snr_db / 10.0);
}

double noise_level(const FourierData2D& data, double snr_db) {
  double sum = 0.0;
  long n = 0;
  for (Eigen::Index i = 0; i < data.coeffs.size(); ++i) {
    if (data.known.data()[i]) {
      sum += std::abs(data.coeffs.data()[i]);
      ++n;
    }
  }
  if (n == 0) return 0.0;
  return sum / n * std::pow(10.0, -snr_db / 10.0);
}

FourierData add_noise(const FourierData& data, double snr_db, std::uint64_t seed) {
  if (data.coeffs.size() == 0) throw InvalidArgument("add_noise: empty data");
  FourierData out = data;
  if (std::isinf(snr_db) && snr_db > 0) return out;
  const double s = noise_level(data, snr_db) / std::sqrt(2.0);
  Rng rng(seed);
  for (int i = 0; i < out.coeffs.size(); ++i) {
    if (!out.known(i)) continue;
    const double re = rng.normal();
    const double im = rng.normal();
    out.coeffs(i) += Complex(s * re, s * im);
  }
  return out;
}

FourierData2D add_noise(const FourierData2D& data, double snr_db, std::uint64_t seed) {
  if (data.coeffs.size() == 0) throw InvalidArgument("add_noise: empty data");
  FourierData2D out = data;
  if (std::isinf(snr_db) && snr_db > 0) return out;
  const double s = noise_level(data, snr_db) / std::sqrt(2.0);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < out.coeffs.size(); ++i) {
    if (!out.known.data()[i]) continue;
    const double re = rng.normal();
    const double im = rng.normal();
    out.coeffs.data()[i] += Complex(s * re, s * im);
  }
  return out;
}

std::set<int> example_band(int j, int N) {
  if (j < 1) throw InvalidArgument("missing band index j must be >= 1");
  std::set<int> K;
  for (int k = 10 * j; k <= std::min(N, 10 * j + 20); ++k) K.insert(k);
  return K;
}

FourierData apply_mask(const FourierData& data, const std::set<int>& K) {
  FourierData out = data;
  for (int k : K) {
    if (k < 1 || k > data.N()) throw InvalidArgument("mask index out of range 1..N");
    out.drop(k);
  }
  return out;
}

FourierData apply_missing_band(const FourierData& data, int j) {
  return apply_mask(data, example_band(j, data.N()));
}

FourierData remove_random_bands(const FourierData& data, double gamma, int bandwidth,
                                std::uint64_t seed) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0, 1]");
  if (bandwidth < 1) throw InvalidArgument("bandwidth must be >= 1");
  const int N = data.N();
  const int avail = N - 1;
  const int target =
      std::min(avail, static_cast<int>(std::lround(gamma * (2.0 * N + 1.0) / 2.0)));
  std::vector<char> gone(N + 1, 0);
  Rng rng(seed);
  int removed = 0;
  while (removed < target) {
    const int s = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(avail)));
    for (int k = s; k < s + bandwidth && k <= avail && removed < target; ++k) {
      if (!gone[k]) {
        gone[k] = 1;
        ++removed;
      }
    }
  }
  FourierData out = data;
  for (int k = 1; k <= avail; ++k) {
    if (gone[k]) out.drop(k);
  }
  return out;
}

std::set<int> equally_spaced_band(int j, int J, int b, int N) {
  if (j < 1 || j > J) throw InvalidArgument("band slot out of range");
  if (b < 1 || b > N - 1) throw InvalidArgument("bandwidth must lie in 1..N-1");
  const int span = N - 1 - b;  // last admissible start is N - b
  const int s = 1 + static_cast<int>(std::lround(double(j) * span / (J + 1)));
  std::set<int> K;
  for (int k = s; k < s + b; ++k) K.insert(k);
  return K;
}

std::set<int> missing_set(const FourierData& data) {
  std::set<int> K;
  for (int k = 1; k <= data.N(); ++k) {
    if (!data.is_known(k)) K.insert(k);
  }
  return K;
}

// ---------------------------------------------------------------------------

void write_fourier_csv(std::ostream& os, const FourierData& data) {
  os << "k,re,im,known\n";
  for (int k = -data.N(); k <= data.N(); ++k) {
    const Complex c = data.at(k);
    os << k << ',' << csv::fmt(c.real()) << ',' << csv::fmt(c.imag()) << ','
       << (data.is_known(k) ? 1 : 0) << '\n';
  }
}

FourierData read_fourier_csv(std::istream& is, int Nx) {
  const auto t = csv::Table::parse(is);
  t.require({"k", "re", "im", "known"});
  if (t.rows() == 0 || t.rows() % 2 == 0) {
    throw ConfigError("Fourier CSV must hold 2N+1 rows, got " + std::to_string(t.rows()));
  }
  const int N = static_cast<int>(t.rows() / 2);
  FourierData d = FourierData::zeros(Grid1D::standard(N, Nx));
  std::vector<char> seen(t.rows(), 0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const int k = static_cast<int>(t.num(r, "k"));
    if (k < -N || k > N || seen[k + N]) {
      throw ConfigError("Fourier CSV: bad or duplicate k = " + std::to_string(k));
    }
    seen[k + N] = 1;
    const bool known = t.num(r, "known") != 0.0;
    d.known(k + N) = known;
    d.at(k) = known ? Complex(t.num(r, "re"), t.num(r, "im")) : Complex(0.0);
  }
  return d;
}

void write_fourier_csv(std::ostream& os, const FourierData2D& data) {
  os << "kx,ky,re,im,known\n";
  for (int kx = -data.gx.N; kx <= data.gx.N; ++kx) {
    for (int ky = -data.gy.N; ky <= data.gy.N; ++ky) {
      const Complex c = data.coeffs(kx + data.gx.N, ky + data.gy.N);
      os << kx << ',' << ky << ',' << csv::fmt(c.real()) << ',' << csv::fmt(c.imag()) << ','
         << (data.known(kx + data.gx.N, ky + data.gy.N) ? 1 : 0) << '\n';
    }
  }
}

FourierData2D read_fourier2d_csv(std::istream& is) {
  const auto t = csv::Table::parse(is);
  t.require({"kx", "ky", "re", "im", "known"});
  int N = 0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    N = std::max({N, std::abs(static_cast<int>(t.num(r, "kx"))),
                  std::abs(static_cast<int>(t.num(r, "ky")))});
  }
  if (N < 1 || t.rows() != static_cast<std::size_t>((2 * N + 1) * (2 * N + 1))) {
    throw ConfigError("2D Fourier CSV must hold (2N+1)^2 rows");
  }
  FourierData2D d = FourierData2D::zeros(Grid1D::unit(N), Grid1D::unit(N));
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const int kx = static_cast<int>(t.num(r, "kx")) + N;
    const int ky = static_cast<int>(t.num(r, "ky")) + N;
    const bool known = t.num(r, "known") != 0.0;
    d.known(kx, ky) = known;
    d.coeffs(kx, ky) = known ? Complex(t.num(r, "re"), t.num(r, "im")) : Complex(0.0);
  }
  return d;
}

}  // namespace vbjs
