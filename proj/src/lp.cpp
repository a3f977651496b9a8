#include "vbjs/lp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace vbjs {

namespace {

// Largest a in (0, 1] with v + a * dv >= 0.
double max_step(const Vector& v, const Vector& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  }
  return a;
}

struct Newton {
  const Matrix& G;
  Vector d;  // z / s
  Matrix M;
  Eigen::LDLT<Matrix> ldlt;

  Newton(const Matrix& G_, const Vector& s, const Vector& z) : G(G_) {
    d = z.cwiseQuotient(s);
    M = G.transpose() * d.asDiagonal() * G;
    // tiny diagonal shift keeps the factorization alive once d spans many decades
    Matrix Ms = M;
    Ms.diagonal().array() += 1e-14 * std::max(1.0, M.diagonal().maxCoeff());
    ldlt.compute(Ms);
  }

  // Solves the linearized KKT system for residuals (rd, rp, rc).
  void solve(const Vector& s, const Vector& z, const Vector& rd, const Vector& rp,
             const Vector& rc, Vector& dx, Vector& ds, Vector& dz) const {
    const Vector w = (z.cwiseProduct(rp) - rc).cwiseQuotient(s);
    const Vector rhs = -rd - G.transpose() * w;
    dx = ldlt.solve(rhs);
    // refine against the unshifted matrix
    for (int r = 0; r < 2; ++r) dx += ldlt.solve(rhs - M * dx);
    dz = (z.cwiseProduct(G * dx + rp) - rc).cwiseQuotient(s);
    ds = -(rc + s.cwiseProduct(dz)).cwiseQuotient(z);
  }
};

}  // namespace

LPResult solve_lp(const LPProblem& lp, const LPOptions& opts) {
  const auto m = lp.G.rows();
  const auto n = lp.G.cols();
  require_dim(lp.c.size() == n && lp.h.size() == m, "solve_lp: dimension mismatch");

  LPResult res;
  Vector x = Vector::Zero(n);
  Vector s = Vector::Ones(m);
  Vector z = Vector::Ones(m);
  const double hn = 1.0 + lp.h.cwiseAbs().maxCoeff();
  const double cn = 1.0 + lp.c.cwiseAbs().maxCoeff();

  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector rd = lp.c + lp.G.transpose() * z;
    const Vector rp = lp.G * x + s - lp.h;
    const double mu = s.dot(z) / m;
    const double pobj = lp.c.dot(x);
    const double dobj = -lp.h.dot(z);

    res.primal_residual = rp.cwiseAbs().maxCoeff() / hn;
    res.dual_residual = rd.cwiseAbs().maxCoeff() / cn;
    res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    res.iterations = it;
    if (res.primal_residual <= opts.tol && res.dual_residual <= opts.tol &&
        (res.gap <= opts.tol || mu <= opts.tol * opts.tol)) {
      res.status = LPStatus::Optimal;
      break;
    }
    // Farkas certificate: z >= 0, G^T z = 0, h^T z < 0.
    const double hz = lp.h.dot(z);
    if (hz < 0.0 && (lp.G.transpose() * z).cwiseAbs().maxCoeff() <= 1e-9 * -hz &&
        res.primal_residual > opts.tol) {
      res.status = LPStatus::Infeasible;
      break;
    }

    Newton nt(lp.G, s, z);
    Vector dxa, dsa, dza;
    nt.solve(s, z, rd, rp, s.cwiseProduct(z), dxa, dsa, dza);
    const double aa = std::min(max_step(s, dsa), max_step(z, dza));
    const double mu_aff = (s + aa * dsa).dot(z + aa * dza) / m;
    const double sigma = std::pow(mu_aff / mu, 3);

    const Vector rc =
        s.cwiseProduct(z) + dsa.cwiseProduct(dza) - Vector::Constant(m, sigma * mu);
    Vector dx, ds, dz;
    nt.solve(s, z, rd, rp, rc, dx, ds, dz);
    const double a = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
    x += a * dx;
    s += a * ds;
    z += a * dz;
    res.iterations = it + 1;
  }

  res.x = x;
  res.s = s;
  res.z = z;
  res.objective = lp.c.dot(x);
  return res;
}

}  // namespace vbjs
