#include "vbjs/pa_transform.hpp"

#include <cmath>
#include <ostream>

#include "vbjs/csv.hpp"
#include "vbjs/fft.hpp"

namespace vbjs {

Vector uniform_pa_coeffs(int m, double dx) {
  if (m < 1) throw InvalidArgument("PA order m must be >= 1");
  if (!(dx > 0.0)) throw InvalidArgument("PA spacing dx must be positive");
  double mfact = 1.0;
  for (int i = 2; i <= m; ++i) mfact *= i;
  Vector c(m + 1);
  for (int j = 1; j <= m + 1; ++j) {
    double prod = 1.0;
    for (int k = 1; k <= m + 1; ++k) {
      if (k != j) prod *= (j - k);
    }
    c(j - 1) = mfact / (prod * dx);
  }
  return c;
}

PAOperator build_pa(int m, int Nx) {
  if (m < 1 || m > 6) throw InvalidArgument("PA order m must lie in 1..6");
  if (Nx <= m + 1) throw InvalidArgument("grid too small for PA order: need Nx > m+1");
  const Vector c = uniform_pa_coeffs(m, 1.0);
  // The normalization is the sum over the right half of the stencil; its sign
  // alternates with m, which gives the reference L^1 and L^3.
  double q = 0.0;
  for (int i = m / 2 + 2; i <= m + 1; ++i) q += c(i - 1);
  const int start = -((m - 1) / 2);
  PAOperator op;
  op.m = m;
  op.Nx = Nx;
  for (int i = 1; i <= m + 1; ++i) {
    op.offsets.push_back(start + m + 1 - i);
    op.weights.push_back(c(i - 1) / q);
  }
  return op;
}

Vector PAOperator::apply(const Vector& f) const {
  require_dim(f.size() == Nx, "PA apply: length != Nx");
  Vector out = Vector::Zero(Nx);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const int o = offsets[i];
    const double a = weights[i];
    for (int r = 0; r < Nx; ++r) out(r) += a * f(fft::wrap(r + o, Nx));
  }
  return out;
}

Vector PAOperator::apply_transpose(const Vector& z) const {
  require_dim(z.size() == Nx, "PA apply_transpose: length != Nx");
  Vector out = Vector::Zero(Nx);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const int o = offsets[i];
    const double a = weights[i];
    for (int r = 0; r < Nx; ++r) out(fft::wrap(r + o, Nx)) += a * z(r);
  }
  return out;
}

Matrix PAOperator::dense() const {
  Matrix L = Matrix::Zero(Nx, Nx);
  for (int r = 0; r < Nx; ++r) {
    for (std::size_t i = 0; i < offsets.size(); ++i) L(r, fft::wrap(r + offsets[i], Nx)) += weights[i];
  }
  return L;
}

CVector PAOperator::symbol() const {
  CVector s = CVector::Zero(Nx);
  for (int r = 0; r < Nx; ++r) {
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const auto t = static_cast<double>(fft::wrap(static_cast<std::ptrdiff_t>(r) * offsets[i], Nx));
      s(r) += weights[i] * std::polar(1.0, 2.0 * M_PI * t / Nx);
    }
  }
  return s;
}

Vector PAOperator::gram_symbol() const { return symbol().cwiseAbs2(); }

Matrix PAOperator::apply_x(const Matrix& f) const {
  require_dim(f.rows() == Nx, "PA apply_x: row count != Nx");
  Matrix out = Matrix::Zero(f.rows(), f.cols());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (int r = 0; r < Nx; ++r) out.row(r) += weights[i] * f.row(fft::wrap(r + offsets[i], Nx));
  }
  return out;
}

Matrix PAOperator::apply_x_transpose(const Matrix& z) const {
  require_dim(z.rows() == Nx, "PA apply_x_transpose: row count != Nx");
  Matrix out = Matrix::Zero(z.rows(), z.cols());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (int r = 0; r < Nx; ++r) out.row(fft::wrap(r + offsets[i], Nx)) += weights[i] * z.row(r);
  }
  return out;
}

Matrix PAOperator::apply_y(const Matrix& f) const {
  require_dim(f.cols() == Nx, "PA apply_y: column count != Nx");
  Matrix out = Matrix::Zero(f.rows(), f.cols());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (int r = 0; r < Nx; ++r) out.col(r) += weights[i] * f.col(fft::wrap(r + offsets[i], Nx));
  }
  return out;
}

Matrix PAOperator::apply_y_transpose(const Matrix& z) const {
  require_dim(z.cols() == Nx, "PA apply_y_transpose: column count != Nx");
  Matrix out = Matrix::Zero(z.rows(), z.cols());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (int r = 0; r < Nx; ++r) out.col(fft::wrap(r + offsets[i], Nx)) += weights[i] * z.col(r);
  }
  return out;
}

void write_dense_csv(std::ostream& os, const PAOperator& op) {
  const Matrix L = op.dense();
  for (int r = 0; r < L.rows(); ++r) {
    for (int c = 0; c < L.cols(); ++c) os << (c ? "," : "") << csv::fmt(L(r, c));
    os << '\n';
  }
}

}  // namespace vbjs
