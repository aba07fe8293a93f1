#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "polyopt/moment.hpp"

namespace polyopt {

// Euclidean projection onto the PSD cone: symmetrize, then clip negative
// eigenvalues.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& M);

// Full iterate of the primal-dual splitting.  Holding (y, y_prev, duals,
// sigma, tau) makes a resumed run bit-for-bit identical to an uninterrupted
// one; block_vars are the per-block splitting copies from the last iteration
// (PSD by construction for inequality blocks, zero for equality blocks).
struct SdpState {
  Eigen::VectorXd y;
  Eigen::VectorXd y_prev;
  std::vector<Eigen::MatrixXd> duals;       // PSD blocks first, then zero blocks
  std::vector<Eigen::MatrixXd> block_vars;  // same ordering
  double sigma = 0.0;
  double tau = 0.0;
  long iteration = 0;
};

struct SolveOptions {
  long budget = 1000;   // iterations for this call; 0 performs no work
  double tol = 1e-7;    // residual target (max of primal and dual)
  std::ostream* trace = nullptr;  // optional CSV: iter,objective,primal,dual,gap
};

struct SolveReport {
  long iterations = 0;        // iterations run in this call
  long total_iterations = 0;  // state.iteration after the call
  bool converged = false;
  double objective = 0.0;        // c . y at the current iterate
  double dual_objective = 0.0;   // lower bound candidate (see dual_residual)
  double primal_residual = 0.0;  // cone distance of the blocks, / (1 + ||y||)
  double dual_residual = 0.0;    // || (c - K* dual)_{pos != 0} || / (1 + ||c||)
  double gap = 0.0;              // |objective - dual_objective| / (1 + |objective|)
};

// Fresh state: y is the Dirac-at-origin moment vector (y_0 = 1, rest 0) or a
// caller-supplied warm start; duals start at zero; step sizes satisfy
// sigma * tau * ||K||^2 < 1 with ||K|| estimated by power iteration.
SdpState make_state(const MomentSdp& sdp);
SdpState make_state(const MomentSdp& sdp, const Eigen::VectorXd& y_init);

// Runs at most options.budget iterations, stopping early once both residuals
// are <= options.tol.  The state is advanced in place.  Residual blow-up
// (growth by more than 1e6x over 1000 iterations) raises DivergenceError.
SolveReport solve_partial(const MomentSdp& sdp, SdpState& state, const SolveOptions& options);

// The dual objective is a certified lower bound only when the dual iterate is
// (near-)feasible; gate on the dual residual.
std::optional<double> lower_bound(const SolveReport& report, double tol);

}  // namespace polyopt
