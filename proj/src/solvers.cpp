#include "vbjs/solvers.hpp"

#include <cmath>
#include <ostream>

#include "vbjs/csv.hpp"
#include "vbjs/fft.hpp"

namespace vbjs {

namespace {

// Multiplies a real vector by a real circulant given by its DFT symbol.
Vector circ_apply(const Vector& sym, const Vector& q) {
  CVector Q = fft::forward(q.cast<Complex>());
  Q.array() *= sym.array().cast<Complex>();
  return fft::backward(Q).real() / double(q.size());
}

Matrix circ_apply(const Matrix& sym, const Matrix& q) {
  CMatrix Q = fft::forward2(q.cast<Complex>());
  Q.array() *= sym.array().cast<Complex>();
  return fft::backward2(Q).real() / double(q.size());
}

template <class T>
T pinv_symbol(const T& sym) {
  const double cut = 1e-13 * sym.cwiseAbs().maxCoeff();
  T inv = sym;
  for (Eigen::Index i = 0; i < sym.size(); ++i) {
    inv.data()[i] = std::abs(sym.data()[i]) > cut ? 1.0 / sym.data()[i] : 0.0;
  }
  return inv;
}

Vector shrink(const Vector& a, const Vector& t) {
  return a.array().sign() * (a.array().abs() - t.array()).max(0.0);
}

double fidelity_misfit(const FourierData& d, const Vector& q) {
  const CVector Fq = forward_apply(q, d.grid);
  double s = 0.0;
  for (int i = 0; i < Fq.size(); ++i) {
    if (d.known(i)) s += std::norm(Fq(i) - d.coeffs(i));
  }
  return s;
}

double fidelity_misfit(const FourierData2D& d, const Matrix& q) {
  const CMatrix Fq = forward_apply_2d(q, d.gx, d.gy);
  double s = 0.0;
  for (Eigen::Index i = 0; i < Fq.size(); ++i) {
    if (d.known.data()[i]) s += std::norm(Fq.data()[i] - d.coeffs.data()[i]);
  }
  return s;
}

Matrix as_matrix(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Vector as_vector(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace

double ReconProblem::mu() const {
  return fidelity_weight > 0.0 ? fidelity_weight : double(data.grid.Nx) * data.grid.Nx;
}

void ReconProblem::validate() const {
  data.validate();
  require_dim(L.Nx == data.grid.Nx, "regularizer size != grid size");
  require_dim(weights.size() == data.grid.Nx, "weight vector length != grid size");
  if ((weights.array() < 0.0).any()) throw InvalidArgument("weights must be nonnegative");
  if (p != 1 && p != 2) throw InvalidArgument("p must be 1 or 2");
}

double ReconProblem2D::mu() const {
  return fidelity_weight > 0.0 ? fidelity_weight : double(data.gx.Nx) * data.gy.Nx;
}

void ReconProblem2D::validate() const {
  data.validate();
  require_dim(data.gx.Nx == data.gy.Nx, "2D solver expects a square grid");
  require_dim(L.Nx == data.gx.Nx, "regularizer size != grid size");
  require_dim(weights.rows() == data.gx.Nx && weights.cols() == data.gy.Nx,
              "weight matrix shape != grid shape");
  if ((weights.array() < 0.0).any()) throw InvalidArgument("weights must be nonnegative");
  if (p != 1 && p != 2) throw InvalidArgument("p must be 1 or 2");
}

Vector fidelity_symbol(const FourierData& data) {
  const Grid1D& g = data.grid;
  Vector mult = Vector::Zero(g.Nx);
  for (int k = -g.N; k <= g.N; ++k) {
    if (data.is_known(k)) mult(fft::wrap(k, g.Nx)) += 1.0;
  }
  Vector sym(g.Nx);
  for (int r = 0; r < g.Nx; ++r) sym(r) = (mult(r) + mult(fft::wrap(-r, g.Nx))) / (2.0 * g.Nx);
  return sym;
}

Matrix fidelity_symbol(const FourierData2D& data) {
  const int nx = data.gx.Nx;
  const int ny = data.gy.Nx;
  Matrix mult = Matrix::Zero(nx, ny);
  for (int kx = -data.gx.N; kx <= data.gx.N; ++kx) {
    for (int ky = -data.gy.N; ky <= data.gy.N; ++ky) {
      if (data.known(kx + data.gx.N, ky + data.gy.N)) mult(fft::wrap(kx, nx), fft::wrap(ky, ny)) += 1.0;
    }
  }
  Matrix sym(nx, ny);
  for (int r = 0; r < nx; ++r) {
    for (int s = 0; s < ny; ++s) {
      sym(r, s) = (mult(r, s) + mult(fft::wrap(-r, nx), fft::wrap(-s, ny))) / (2.0 * nx * ny);
    }
  }
  return sym;
}

Vector fidelity_rhs(const FourierData& data, double mu) {
  CVector c = data.coeffs;
  for (int i = 0; i < c.size(); ++i) {
    if (!data.known(i)) c(i) = 0.0;
  }
  return mu * adjoint_apply(c, data.grid).real();
}

Matrix fidelity_rhs(const FourierData2D& data, double mu) {
  CMatrix c = data.coeffs;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!data.known.data()[i]) c.data()[i] = 0.0;
  }
  return mu * adjoint_apply_2d(c, data.gx, data.gy).real();
}

double objective(const ReconProblem& prob, const Vector& q) {
  const Vector wl = prob.weights.cwiseProduct(prob.L.apply(q));
  const double reg = prob.p == 1 ? wl.lpNorm<1>() : 0.5 * wl.squaredNorm();
  return reg + 0.5 * prob.mu() * fidelity_misfit(prob.data, q);
}

double objective(const ReconProblem2D& prob, const Matrix& q) {
  const Matrix ax = prob.weights.cwiseProduct(prob.L.apply_x(q));
  const Matrix ay = prob.weights.cwiseProduct(prob.L.apply_y(q));
  const double reg = prob.p == 1 ? ax.cwiseAbs().sum() + ay.cwiseAbs().sum()
                                 : 0.5 * (ax.squaredNorm() + ay.squaredNorm());
  return reg + 0.5 * prob.mu() * fidelity_misfit(prob.data, q);
}

Vector gradient_l2(const ReconProblem& prob, const Vector& q) {
  const Vector w2 = prob.weights.cwiseAbs2();
  return prob.L.apply_transpose(w2.cwiseProduct(prob.L.apply(q))) +
         prob.mu() * circ_apply(fidelity_symbol(prob.data), q) - fidelity_rhs(prob.data, prob.mu());
}

int pcg(const std::function<Vector(const Vector&)>& A,
        const std::function<Vector(const Vector&)>& M_inv, const Vector& b, Vector& x,
        double tol, int max_iter) {
  const double bn = b.norm();
  if (bn == 0.0) {
    x.setZero(b.size());
    return 0;
  }
  if (x.size() != b.size()) x = Vector::Zero(b.size());
  Vector r = b - A(x);
  double rn = r.norm();
  if (rn <= tol * bn) return 0;
  Vector z = M_inv(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Vector Ap = A(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw SolverError("CG breakdown: operator not positive on search direction", rn / bn);
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    rn = r.norm();
    if (rn <= tol * bn) return it;
    z = M_inv(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw SolverError("CG did not converge in " + std::to_string(max_iter) + " iterations", rn / bn);
}

SolveResult solve_weighted_l2(const ReconProblem& prob, const SolverOpts& opts) {
  prob.validate();
  if (prob.p != 2) throw InvalidArgument("solve_weighted_l2 requires p = 2");
  const double mu = prob.mu();
  const Vector symA = fidelity_symbol(prob.data);
  const Vector w2 = prob.weights.cwiseAbs2();
  const Vector b = fidelity_rhs(prob.data, mu);
  const Vector pre = pinv_symbol(Vector(w2.mean() * prob.L.gram_symbol() + mu * symA));
  auto A = [&](const Vector& q) {
    return Vector(prob.L.apply_transpose(w2.cwiseProduct(prob.L.apply(q))) + mu * circ_apply(symA, q));
  };
  auto M = [&](const Vector& r) { return circ_apply(pre, r); };
  SolveResult res;
  res.q = Vector::Zero(prob.data.grid.Nx);
  res.iterations = pcg(A, M, b, res.q, opts.cg_tol, 10 * prob.data.grid.Nx);
  res.converged = true;
  res.primal_residual = (A(res.q) - b).norm();
  res.objective = objective(prob, res.q);
  return res;
}

SolveResult solve_weighted_l1(const ReconProblem& prob, const SolverOpts& opts) {
  prob.validate();
  if (prob.p != 1) throw InvalidArgument("solve_weighted_l1 requires p = 1");
  const int n = prob.data.grid.Nx;
  const double mu = prob.mu();
  if (!(opts.rho > 0.0)) throw InvalidArgument("ADMM penalty rho must be positive");
  if (!(opts.relax > 0.0 && opts.relax < 2.0)) throw InvalidArgument("relax must lie in (0, 2)");
  // rho is relative to the largest fidelity eigenvalue mu / Nx; residuals are
  // reported for the problem scaled by Nx / mu, where the penalty is opts.rho
  const double rho = opts.rho * mu / n;
  const Vector b = fidelity_rhs(prob.data, mu);
  // (mu A + rho L^T L) is circulant, so the q-update is an exact Fourier solve
  const Vector sys_inv =
      pinv_symbol(Vector(mu * fidelity_symbol(prob.data) + rho * prob.L.gram_symbol()));
  const Vector thresh = prob.weights / rho;
  const double stop = opts.tol * std::sqrt(double(n));

  SolveResult res;
  Vector q = Vector::Zero(n);
  Vector z = Vector::Zero(n);
  Vector u = Vector::Zero(n);
  for (int it = 1; it <= opts.max_iter; ++it) {
    q = circ_apply(sys_inv, Vector(b + rho * prob.L.apply_transpose(z - u)));
    const Vector Lq = prob.L.apply(q);
    const Vector z_old = z;
    const Vector u_old = u;
    const Vector Lh = opts.relax * Lq + (1.0 - opts.relax) * z_old;
    z = shrink(Lh + u, thresh);
    u += Lh - z;
    res.primal_residual = (Lq - z).norm();
    res.dual_residual = opts.rho * prob.L.apply_transpose(z - z_old).norm();
    res.iterations = it;
    if (opts.keep_trace) {
      const double fpr = rho * ((z - z_old).squaredNorm() + (u - u_old).squaredNorm());
      res.trace.push_back({it, res.primal_residual, res.dual_residual, objective(prob, q), fpr});
    }
    if (res.primal_residual <= stop && res.dual_residual <= stop) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    res.warning = "ADMM reached the iteration cap: primal " + std::to_string(res.primal_residual) +
                  ", dual " + std::to_string(res.dual_residual);
  }
  res.q = q;
  res.objective = objective(prob, q);
  return res;
}

SolveResult solve_weighted(const ReconProblem& prob, const SolverOpts& opts) {
  return prob.p == 1 ? solve_weighted_l1(prob, opts) : solve_weighted_l2(prob, opts);
}

double default_lambda(const FourierData& data, const PAOperator& L, double mu) {
  return 0.05 * L.apply_transpose(fidelity_rhs(data, mu)).cwiseAbs().maxCoeff();
}

SolveResult solve_classic_l1(const FourierData& data, const PAOperator& L, double lambda,
                             const SolverOpts& opts, double fidelity_weight) {
  ReconProblem prob{data, L, Vector(), 1, fidelity_weight};
  if (lambda <= 0.0) lambda = default_lambda(data, L, prob.mu());
  if (!(lambda > 0.0)) lambda = 1.0;  // zero data: any positive lambda gives q = 0
  prob.weights = Vector::Constant(data.grid.Nx, lambda);
  return solve_weighted_l1(prob, opts);
}

SolveResult2D solve_weighted_2d(const ReconProblem2D& prob, const SolverOpts& opts) {
  prob.validate();
  const int nx = prob.data.gx.Nx;
  const int ny = prob.data.gy.Nx;
  const double mu = prob.mu();
  const Matrix symA = fidelity_symbol(prob.data);
  const Vector g = prob.L.gram_symbol();
  Matrix symLL(nx, ny);
  for (int r = 0; r < nx; ++r) {
    for (int s = 0; s < ny; ++s) symLL(r, s) = g(r) + g(s);
  }
  const Matrix b = fidelity_rhs(prob.data, mu);
  const PAOperator& L = prob.L;
  SolveResult2D res;

  if (prob.p == 2) {
    const Matrix w2 = prob.weights.cwiseAbs2();
    const Matrix pre = pinv_symbol(Matrix(w2.mean() * symLL + mu * symA));
    auto A = [&](const Vector& qv) {
      const Matrix q = as_matrix(qv, nx, ny);
      const Matrix out = L.apply_x_transpose(w2.cwiseProduct(L.apply_x(q))) +
                         L.apply_y_transpose(w2.cwiseProduct(L.apply_y(q))) + mu * circ_apply(symA, q);
      return as_vector(out);
    };
    auto M = [&](const Vector& rv) { return as_vector(circ_apply(pre, as_matrix(rv, nx, ny))); };
    Vector qv = Vector::Zero(nx * ny);
    const Vector bv = as_vector(b);
    res.iterations = pcg(A, M, bv, qv, opts.cg_tol, 10 * nx * ny);
    res.converged = true;
    res.primal_residual = (A(qv) - bv).norm();
    res.q = as_matrix(qv, nx, ny);
    res.objective = objective(prob, res.q);
    return res;
  }

  if (!(opts.rho > 0.0)) throw InvalidArgument("ADMM penalty rho must be positive");
  if (!(opts.relax > 0.0 && opts.relax < 2.0)) throw InvalidArgument("relax must lie in (0, 2)");
  const double rho = opts.rho * mu / (double(nx) * ny);
  const Matrix sys_inv = pinv_symbol(Matrix(mu * symA + rho * symLL));
  const Matrix thresh = prob.weights / rho;
  const double stop = opts.tol * std::sqrt(2.0 * nx * ny);
  auto shrink2 = [](const Matrix& a, const Matrix& t) -> Matrix {
    return a.array().sign() * (a.array().abs() - t.array()).max(0.0);
  };

  Matrix q = Matrix::Zero(nx, ny);
  Matrix z1 = q, z2 = q, u1 = q, u2 = q;
  for (int it = 1; it <= opts.max_iter; ++it) {
    q = circ_apply(sys_inv, Matrix(b + rho * (L.apply_x_transpose(z1 - u1) + L.apply_y_transpose(z2 - u2))));
    const Matrix Lx = L.apply_x(q);
    const Matrix Ly = L.apply_y(q);
    const Matrix z1o = z1, z2o = z2, u1o = u1, u2o = u2;
    const Matrix h1 = opts.relax * Lx + (1.0 - opts.relax) * z1o;
    const Matrix h2 = opts.relax * Ly + (1.0 - opts.relax) * z2o;
    z1 = shrink2(h1 + u1, thresh);
    z2 = shrink2(h2 + u2, thresh);
    u1 += h1 - z1;
    u2 += h2 - z2;
    res.primal_residual = std::sqrt((Lx - z1).squaredNorm() + (Ly - z2).squaredNorm());
    res.dual_residual =
        opts.rho * (L.apply_x_transpose(z1 - z1o) + L.apply_y_transpose(z2 - z2o)).norm();
    res.iterations = it;
    if (opts.keep_trace) {
      const double fpr = rho * ((z1 - z1o).squaredNorm() + (z2 - z2o).squaredNorm() +
                                (u1 - u1o).squaredNorm() + (u2 - u2o).squaredNorm());
      res.trace.push_back({it, res.primal_residual, res.dual_residual, objective(prob, q), fpr});
    }
    if (res.primal_residual <= stop && res.dual_residual <= stop) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    res.warning = "ADMM reached the iteration cap: primal " + std::to_string(res.primal_residual) +
                  ", dual " + std::to_string(res.dual_residual);
  }
  res.q = q;
  res.objective = objective(prob, q);
  return res;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iter,primal,dual,objective,fpr\n";
  for (const auto& t : trace) {
    os << t.iter << ',' << csv::fmt(t.primal) << ',' << csv::fmt(t.dual) << ','
       << csv::fmt(t.objective) << ',' << csv::fmt(t.fpr) << '\n';
  }
}

}  // namespace vbjs
