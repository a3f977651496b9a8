#pragma once

#include <cstddef>

#include "vbjs/types.hpp"

namespace vbjs::fft {

// Thin wrappers over FFTW. Unnormalized on both sides:
//   forward:  X_r = sum_j x_j e^{-2 pi i r j / n}
//   backward: x_j = sum_r X_r e^{+2 pi i r j / n}
// Plans are cached per thread; only planning is serialized.

CVector forward(const CVector& x);
CVector backward(const CVector& x);

/// 2D transforms of a column-major matrix (rows x cols).
CMatrix forward2(const CMatrix& x);
CMatrix backward2(const CMatrix& x);

/// Non-negative residue of k modulo n.
inline std::ptrdiff_t wrap(std::ptrdiff_t k, std::ptrdiff_t n) {
  const std::ptrdiff_t r = k % n;
  return r < 0 ? r + n : r;
}

}  // namespace vbjs::fft
