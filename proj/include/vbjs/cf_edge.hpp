#pragma once

#include <iosfwd>
#include <utility>

#include "vbjs/signal_models.hpp"

namespace vbjs {

enum class CFKind { Exponential, Designed };

/// sigma_k for k = 1..N stored at index k - 1; k and -k share a value.
struct ConcentrationFactor {
  int N = 0;
  CFKind kind = CFKind::Designed;
  double alpha = 0.0;  // order, exponential kind only
  Vector values;

  double operator()(int k) const { return k == 0 ? 0.0 : values(std::abs(k) - 1); }
  static ConcentrationFactor designed(Vector values);
};

/// sigma(eta) = C eta exp(1 / (alpha eta (eta - 1))), eta = k/N, with C chosen
/// so that the integral of sigma(eta)/eta over [1/N, 1 - 1/N] equals pi.
ConcentrationFactor exponential_cf(int N, double alpha);
/// The normalizing constant C for given (N, alpha).
double exponential_cf_constant(int N, double alpha);

struct EdgeMap {
  Vector values;
  double imag_residual = 0.0;  // max |Im| before the real part was taken
};

enum class EdgeMethod { Direct, Fft };

/// i sum_k f_k sgn(k) sigma_|k| exp(i omega_k x_j) on the data grid.
EdgeMap concentration_edge(const FourierData& data, const ConcentrationFactor& cf,
                           EdgeMethod method = EdgeMethod::Fft);

/// Directional edge maps of 2D data: the concentration sum acts on one index
/// while the other is summed plainly. Returns (gx, gy), each Nx x Ny.
std::pair<Matrix, Matrix> edge_maps_2d(const FourierData2D& data, const ConcentrationFactor& cf);

struct AdmissibilityReport {
  bool odd_kernel = true;
  double normalization = 0.0;  // integral of sigma(eta)/eta over [1/N, 1]
  double smoothness_proxy = 0.0;
  bool admissible = false;
};

AdmissibilityReport admissibility_report(const ConcentrationFactor& cf);

void write_cf_csv(std::ostream& os, const ConcentrationFactor& cf);
ConcentrationFactor read_cf_csv(std::istream& is);

}  // namespace vbjs
