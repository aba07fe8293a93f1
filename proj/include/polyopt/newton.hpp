#pragma once

#include <vector>

#include "polyopt/errors.hpp"
#include "polyopt/poly.hpp"

namespace polyopt {

struct NewtonIterate {
  Eigen::VectorXd z;
  double residual_norm;  // ||F(z)||
  double step_norm;      // ||z - previous z|| (0 for the starting point)
};

struct NewtonTrace {
  std::vector<NewtonIterate> iterates;  // starting point included
  bool converged = false;
  double final_residual = 0.0;
  int iterations = 0;  // Newton steps taken
};

struct NewtonOptions {
  double eps = 1e-12;  // residual target on ||F(z)||
  int max_iter = 50;
};

// Raised when the Jacobian becomes singular mid-run; carries the partial trace.
class NewtonSingularError : public SingularJacobianError {
 public:
  NewtonSingularError(const std::string& msg, double sigma_min, NewtonTrace trace)
      : SingularJacobianError(msg, sigma_min), trace_(std::move(trace)) {}
  const NewtonTrace& trace() const { return trace_; }

 private:
  NewtonTrace trace_;
};

// One Newton step z - D_F(z)^{-1} F(z), via partial-pivoting LU with one step
// of iterative refinement.  Singular Jacobian raises SingularJacobianError.
Eigen::VectorXd newton_step(const PolySystem& F, const Eigen::VectorXd& z);

// Iteration budget from the quadratic-convergence envelope:
//   ceil(log2(1 - log2(eps / initial_distance))), 0 when eps >= distance.
int required_iterations(double initial_distance, double eps);

// Iterates newton_step until ||F(z)|| <= eps or max_iter steps; starting at a
// point already below eps performs no steps.
NewtonTrace newton_solve(const PolySystem& F, const Eigen::VectorXd& z0,
                         const NewtonOptions& options = {});

}  // namespace polyopt
