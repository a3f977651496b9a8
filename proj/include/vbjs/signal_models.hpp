#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "vbjs/types.hpp"

namespace vbjs {

/// Uniform periodic grid x_j = lo + period * j / Nx, j = 0..Nx-1, paired with
/// Fourier modes k = -N..N at angular frequency 2*pi*k/period.
///
/// The 1D experiments use lo = -pi, period = 2*pi (so the frequency of mode k
/// is k); the 2D scene lives on [-1, 1) where mode k has frequency k*pi.
struct Grid1D {
  int N = 0;
  int Nx = 0;
  double lo = -M_PI;
  double period = 2.0 * M_PI;

  /// Grid on [-pi, pi). Nx defaults to 2N.
  static Grid1D standard(int N, int Nx = 0);
  /// Grid on [-1, 1) with frequencies k*pi. Nx defaults to 2N.
  static Grid1D unit(int N, int Nx = 0);

  double dx() const { return period / Nx; }
  double x(int j) const { return lo + period * j / Nx; }
  double omega(int k) const { return 2.0 * M_PI * k / period; }
  /// exp(-i omega_k lo), so that exp(-i omega_k x_j) = phase(k) exp(-2 pi i k j / Nx).
  Complex phase(int k) const;
  Vector points() const;
  int modes() const { return 2 * N + 1; }
  /// Index of the grid point nearest to xs (first one on ties).
  int nearest(double xs) const;

  bool operator==(const Grid1D& o) const {
    return N == o.N && Nx == o.Nx && lo == o.lo && period == o.period;
  }
};

/// Fourier coefficients f_k, k = -N..N, stored at index k + N.
/// Unknown coefficients are held as exact zeros.
struct FourierData {
  Grid1D grid;
  CVector coeffs;
  BoolVector known;

  static FourierData zeros(const Grid1D& grid);

  int N() const { return grid.N; }
  Complex& at(int k) { return coeffs(k + grid.N); }
  const Complex& at(int k) const { return coeffs(k + grid.N); }
  bool is_known(int k) const { return known(k + grid.N); }
  int unknown_count() const;
  /// Mark k and -k unknown and zero them.
  void drop(int k);
  void validate() const;
};

using MeasurementSet = std::vector<FourierData>;
void validate(const MeasurementSet& ms);

struct Jump {
  double location;
  double height;
};

struct PiecewiseSignal {
  std::function<double(double)> f;
  std::vector<Jump> jumps;

  Vector sample(const Grid1D& grid) const;
};

/// Unit ramp with a single downward-facing jump of height 1 at x = 0.
PiecewiseSignal ramp_signal();
double ramp(double x);
FourierData ramp_exact_coeffs(int N, int Nx = 0);

/// Forward model f_k = (1/Nx) sum_j f_j exp(-i omega_k x_j).
CVector forward_apply(const Vector& f, const Grid1D& grid);
/// Adjoint of forward_apply. Returns complex; callers take the real part.
CVector adjoint_apply(const CVector& c, const Grid1D& grid);
/// O(N * Nx) reference versions of the above.
CVector forward_apply_direct(const Vector& f, const Grid1D& grid);
CVector adjoint_apply_direct(const CVector& c, const Grid1D& grid);
/// Dense forward matrix, (2N+1) x Nx. For tests and small problems.
CMatrix forward_matrix(const Grid1D& grid);

FourierData fourier_data(const Vector& f, const Grid1D& grid);

// ---------------------------------------------------------------------------
// 2D

/// Coefficients f_{kx,ky} stored at (kx + N, ky + N).
struct FourierData2D {
  Grid1D gx;
  Grid1D gy;
  CMatrix coeffs;
  BoolMatrix known;

  static FourierData2D zeros(const Grid1D& gx, const Grid1D& gy);
  void validate() const;
};

using MeasurementSet2D = std::vector<FourierData2D>;

struct Scene2D {
  Grid1D gx;
  Grid1D gy;
  Matrix samples;  // Nx x Ny, row index is x
  CMatrix coeffs;  // (2N+1) x (2N+1) from the discrete forward model
};

double scene2d_value(double x, double y);
Scene2D sample_scene2d(int N);
CMatrix forward_apply_2d(const Matrix& f, const Grid1D& gx, const Grid1D& gy);
CMatrix adjoint_apply_2d(const CMatrix& c, const Grid1D& gx, const Grid1D& gy);
FourierData2D fourier_data_2d(const Matrix& f, const Grid1D& gx, const Grid1D& gy);

// ---------------------------------------------------------------------------
// Noise and missing bands

/// Noise level for a target SNR in dB: mean |f_k| over known k times 10^(-snr/10).
double noise_level(const FourierData& data, double snr_db);
double noise_level(const FourierData2D& data, double snr_db);

/// Circular complex Gaussian noise with per-coefficient std from noise_level.
/// snr_db = +inf returns the data unchanged. Only known entries are perturbed.
FourierData add_noise(const FourierData& data, double snr_db, std::uint64_t seed);
FourierData2D add_noise(const FourierData2D& data, double snr_db, std::uint64_t seed);

constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Band K_j = {k : 10j <= |k| <= 10j + 20}, clipped to |k| <= N.
std::set<int> example_band(int j, int N);
FourierData apply_missing_band(const FourierData& data, int j);
FourierData apply_mask(const FourierData& data, const std::set<int>& K);
/// Removes about round(gamma * (2N+1)) coefficients in symmetric +-k pairs,
/// grouped in runs of `bandwidth` consecutive |k|. k = 0 and |k| = N are kept.
FourierData remove_random_bands(const FourierData& data, double gamma, int bandwidth,
                                std::uint64_t seed);
/// |k| in [s, s + b - 1] with s placed at the j-th of J equally spaced slots.
std::set<int> equally_spaced_band(int j, int J, int b, int N);
/// Positive k indices that are unknown.
std::set<int> missing_set(const FourierData& data);

// ---------------------------------------------------------------------------
// CSV

void write_fourier_csv(std::ostream& os, const FourierData& data);
FourierData read_fourier_csv(std::istream& is, int Nx = 0);
void write_fourier_csv(std::ostream& os, const FourierData2D& data);
FourierData2D read_fourier2d_csv(std::istream& is);

}  // namespace vbjs
