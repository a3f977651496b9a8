#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vbjs/pa_transform.hpp"
#include "vbjs/signal_models.hpp"

namespace vbjs {

/// (1/p) ||W L q||_p^p + (mu/2) ||F q - f||^2 over the known coefficients.
///
/// mu = 0 selects the default Nx^2, which puts the fidelity on the scale of
/// the unnormalized DFT so that O(1) weights are meaningful.
struct ReconProblem {
  FourierData data;
  PAOperator L;
  Vector weights;  // one per row of L, nonnegative
  int p = 1;
  double fidelity_weight = 0.0;

  double mu() const;
  void validate() const;
};

/// 2D analogue with the penalty applied along both axes:
/// (1/p) (||W o (Lx q)||_p^p + ||W o (Ly q)||_p^p) + (mu/2) ||F q - f||^2.
/// mu = 0 selects Nx * Ny.
struct ReconProblem2D {
  FourierData2D data;
  PAOperator L;  // acts along both axes; square grids only
  Matrix weights;
  int p = 1;
  double fidelity_weight = 0.0;

  double mu() const;
  void validate() const;
};

struct SolverOpts {
  double rho = 1.0;
  double tol = 1e-6;
  int max_iter = 2000;
  double cg_tol = 1e-10;
  double relax = 1.0;  // ADMM over-relaxation in (0, 2); 1 is plain ADMM
  bool keep_trace = false;
};

struct TraceRow {
  int iter;
  double primal;
  double dual;
  double objective;
  double fpr;  // rho ||z_k - z_{k+1}||^2 + rho ||u_k - u_{k+1}||^2
};

struct SolveResult {
  Vector q;  // 1D solution, or the 2D solution flattened column-major
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  std::string warning;
  std::vector<TraceRow> trace;
};

struct SolveResult2D {
  Matrix q;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  std::string warning;
  std::vector<TraceRow> trace;
};

/// Eigenvalues of Re(F^H D F) on the DFT modes, D the known-coefficient mask.
Vector fidelity_symbol(const FourierData& data);
Matrix fidelity_symbol(const FourierData2D& data);
/// mu * Re(F^H f) restricted to the known coefficients.
Vector fidelity_rhs(const FourierData& data, double mu);
Matrix fidelity_rhs(const FourierData2D& data, double mu);

double objective(const ReconProblem& prob, const Vector& q);
double objective(const ReconProblem2D& prob, const Matrix& q);
/// Gradient of the p = 2 objective.
Vector gradient_l2(const ReconProblem& prob, const Vector& q);

/// Preconditioned CG for a symmetric positive semidefinite operator.
/// Returns the iteration count; throws SolverError if max_iter is reached.
int pcg(const std::function<Vector(const Vector&)>& A,
        const std::function<Vector(const Vector&)>& M_inv, const Vector& b, Vector& x,
        double tol, int max_iter);

SolveResult solve_weighted_l2(const ReconProblem& prob, const SolverOpts& opts = {});
SolveResult solve_weighted_l1(const ReconProblem& prob, const SolverOpts& opts = {});
/// Dispatches on prob.p.
SolveResult solve_weighted(const ReconProblem& prob, const SolverOpts& opts = {});

/// lambda ||L q||_1 + (mu/2) ||F q - f||^2. lambda <= 0 selects the default.
SolveResult solve_classic_l1(const FourierData& data, const PAOperator& L, double lambda,
                             const SolverOpts& opts = {}, double fidelity_weight = 0.0);
/// 0.05 * max |L^T mu Re(F^H f)|.
double default_lambda(const FourierData& data, const PAOperator& L, double mu);

SolveResult2D solve_weighted_2d(const ReconProblem2D& prob, const SolverOpts& opts = {});

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace vbjs
