#include <cmath>
#include <sstream>

#include "doctest.h"
#include "vbjs/signal_models.hpp"

using namespace vbjs;

TEST_CASE("grid geometry") {
  const Grid1D g = Grid1D::standard(4);
  CHECK(g.Nx == 8);
  CHECK(g.x(0) == doctest::Approx(-M_PI));
  CHECK(g.dx() == doctest::Approx(M_PI / 4));
  CHECK(g.nearest(0.0) == 4);
  CHECK(g.omega(3) == doctest::Approx(3.0));
  const Grid1D u = Grid1D::unit(4);
  CHECK(u.x(0) == doctest::Approx(-1.0));
  CHECK(u.omega(1) == doctest::Approx(M_PI));
}

TEST_CASE("forward of a constant is the k = 0 indicator") {
  const Grid1D g = Grid1D::standard(8);
  const CVector c = forward_apply(Vector::Ones(g.Nx), g);
  for (int k = -8; k <= 8; ++k) {
    const Complex expect = k == 0 ? 1.0 : 0.0;
    // k = +-N alias to the Nyquist bin, which a constant does not excite
    CHECK(std::abs(c(k + 8) - expect) < 1e-14);
  }
}

TEST_CASE("forward of e_1 on Nx = 8") {
  const Grid1D g = Grid1D::standard(4);
  Vector e = Vector::Zero(8);
  e(1) = 1.0;
  const CVector c = forward_apply(e, g);
  // x_1 = -pi + pi/4, so f_k = exp(-i k x_1) / 8
  for (int k = -4; k <= 4; ++k) {
    const Complex expect = std::exp(Complex(0, -k * g.x(1))) / 8.0;
    CHECK(std::abs(c(k + 4) - expect) < 1e-14);
  }
}

TEST_CASE("fft and direct forward and adjoint agree") {
  for (const Grid1D& g : {Grid1D::standard(7, 16), Grid1D::standard(16), Grid1D::unit(5, 12)}) {
    Vector f(g.Nx);
    for (int j = 0; j < g.Nx; ++j) f(j) = std::sin(1.3 * j) + 0.1 * j;
    CHECK((forward_apply(f, g) - forward_apply_direct(f, g)).norm() < 1e-12);
    CVector c(g.modes());
    for (int i = 0; i < c.size(); ++i) c(i) = Complex(std::cos(0.7 * i), std::sin(0.3 * i));
    CHECK((adjoint_apply(c, g) - adjoint_apply_direct(c, g)).norm() < 1e-12);
    // <F f, c> = <f, F^H c>
    const Complex lhs = forward_apply(f, g).dot(c);
    const Complex rhs = f.cast<Complex>().dot(adjoint_apply(c, g));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("ramp values and exact coefficients") {
  CHECK(ramp(-M_PI) == doctest::Approx(0.0));
  CHECK(ramp(M_PI / 2) == doctest::Approx(0.25));
  CHECK(ramp(-1e-12) - ramp(1e-12) == doctest::Approx(-1.0).epsilon(1e-9));
  const FourierData d = ramp_exact_coeffs(8);
  CHECK(std::abs(d.at(1) - Complex(0, -1.0 / (2 * M_PI))) < 1e-15);
  CHECK(std::abs(d.at(-2) - Complex(0, 1.0 / (4 * M_PI))) < 1e-15);
  CHECK(std::abs(d.at(0)) == 0.0);
  CHECK(d.unknown_count() == 0);
}

TEST_CASE("scene values") {
  CHECK(scene2d_value(0, 0) == doctest::Approx(10.0));
  CHECK(std::abs(scene2d_value(1, 0)) < 1e-12);
  const double inside = scene2d_value(0.5 - 1e-12, 0);
  const double outside = scene2d_value(0.5 + 1e-12, 0);
  CHECK(inside - outside == doctest::Approx(-10 * std::sqrt(2.0)).epsilon(1e-9));
  const Scene2D s = sample_scene2d(8);
  CHECK(s.samples.rows() == 16);
  CHECK(s.coeffs.rows() == 17);
  CHECK((forward_apply_2d(s.samples, s.gx, s.gy) - s.coeffs).norm() < 1e-12);
}

TEST_CASE("noise level and empirical noise") {
  const FourierData d = ramp_exact_coeffs(32);
  double mean = 0;
  for (int i = 0; i < d.coeffs.size(); ++i) mean += std::abs(d.coeffs(i));
  mean /= d.coeffs.size();
  CHECK(noise_level(d, 0.0) == doctest::Approx(mean));

  // SNR 5 dB over 10^4 draws: sample std within 15 %
  const FourierData big = ramp_exact_coeffs(5000);
  const FourierData noisy = add_noise(big, 5.0, 7);
  const double target = noise_level(big, 5.0);
  double ss = 0;
  for (int i = 0; i < big.coeffs.size(); ++i) ss += std::norm(noisy.coeffs(i) - big.coeffs(i));
  const double std_emp = std::sqrt(ss / big.coeffs.size());
  CHECK(std::abs(std_emp / target - 1.0) < 0.15);

  const FourierData clean = add_noise(d, kNoNoise, 3);
  CHECK((clean.coeffs - d.coeffs).norm() == 0.0);
}

TEST_CASE("noise is determined by the seed") {
  const FourierData d = ramp_exact_coeffs(16);
  const FourierData a = add_noise(d, 0.0, 42);
  const FourierData b = add_noise(d, 0.0, 42);
  const FourierData c = add_noise(d, 0.0, 43);
  CHECK((a.coeffs - b.coeffs).norm() == 0.0);
  CHECK((a.coeffs - c.coeffs).norm() > 0.0);
}

TEST_CASE("missing bands of the example") {
  const FourierData d = ramp_exact_coeffs(64);
  const FourierData d1 = apply_missing_band(d, 1);
  CHECK(d1.unknown_count() == 42);
  for (int k = 10; k <= 30; ++k) {
    CHECK_FALSE(d1.is_known(k));
    CHECK_FALSE(d1.is_known(-k));
    CHECK(d1.at(k) == Complex(0));
  }
  CHECK(d1.is_known(9));
  CHECK(d1.is_known(31));
  const std::set<int> K4 = example_band(4, 64);
  CHECK(*K4.begin() == 40);
  CHECK(*K4.rbegin() == 60);
  CHECK(missing_set(apply_missing_band(d, 4)) == K4);
}

TEST_CASE("random band removal") {
  const FourierData d = ramp_exact_coeffs(64);
  CHECK(remove_random_bands(d, 0.0, 1, 5).unknown_count() == 0);
  for (double gamma : {0.1, 0.5, 0.95}) {
    for (int b : {1, 3}) {
      const FourierData r = remove_random_bands(d, gamma, b, 11);
      CHECK(r.is_known(0));
      CHECK(r.unknown_count() % 2 == 0);
      for (int k = 1; k <= 64; ++k) CHECK(r.is_known(k) == r.is_known(-k));
      CHECK(r.unknown_count() ==
            std::min(2 * 63, 2 * static_cast<int>(std::lround(gamma * 129 / 2.0))));
    }
  }
}

TEST_CASE("equally spaced bands stay inside 1..N") {
  for (int b : {1, 4, 16}) {
    for (int j = 1; j <= 4; ++j) {
      const std::set<int> K = equally_spaced_band(j, 4, b, 64);
      CHECK(static_cast<int>(K.size()) == b);
      CHECK(*K.begin() >= 1);
      CHECK(*K.rbegin() <= 64);
    }
  }
  CHECK_THROWS_AS(equally_spaced_band(5, 4, 2, 64), InvalidArgument);
}

TEST_CASE("property: F^H F is close to a multiple of the identity") {
  for (int N : {4, 16, 64}) {
    const Grid1D g = Grid1D::standard(N);
    const double c = (2.0 * N + 1) / (double(g.Nx) * g.Nx);
    for (int trial = 0; trial < 5; ++trial) {
      Vector q(g.Nx);
      for (int j = 0; j < g.Nx; ++j) q(j) = std::cos(0.37 * j * (trial + 1) + trial);
      q.normalize();
      const Vector FhF = adjoint_apply(forward_apply(q, g), g).real();
      CHECK((FhF - c * q).norm() <= 2.0 / g.Nx);
    }
  }
}

TEST_CASE("property: real signals give conjugate-symmetric coefficients") {
  const Grid1D g = Grid1D::standard(20);
  Vector f(g.Nx);
  for (int j = 0; j < g.Nx; ++j) f(j) = ramp(g.x(j)) + std::sin(3.0 * g.x(j));
  const FourierData d = fourier_data(f, g);
  for (int k = 1; k <= 20; ++k) CHECK(std::abs(d.at(-k) - std::conj(d.at(k))) < 1e-14);
}

TEST_CASE("property: k = 0 is never removed") {
  const FourierData d = ramp_exact_coeffs(32);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(remove_random_bands(d, 1.0, 2, seed).is_known(0));
  }
  CHECK_THROWS_AS(apply_mask(d, {0}), InvalidArgument);
}

TEST_CASE("fourier csv round trip") {
  const FourierData d = apply_missing_band(ramp_exact_coeffs(32), 1);
  std::stringstream ss;
  write_fourier_csv(ss, d);
  const FourierData r = read_fourier_csv(ss);
  CHECK(r.grid == d.grid);
  CHECK((r.coeffs - d.coeffs).norm() < 1e-15);
  CHECK((r.known == d.known).all());
}
