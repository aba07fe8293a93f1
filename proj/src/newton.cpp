#include "polyopt/newton.hpp"

#include <cmath>

namespace polyopt {

namespace {

// Computes the Newton displacement s with D_F(z) s = F(z).
Eigen::VectorXd newton_displacement(const PolySystem& F, const Eigen::VectorXd& z) {
  if (F.size() != F.input_dim()) throw InputError("Newton requires a square system");
  if (z.size() != F.input_dim()) throw InputError("point dimension mismatch");
  Eigen::MatrixXd J = F.jacobian(z);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  Eigen::VectorXd u_diag = lu.matrixLU().diagonal().cwiseAbs();
  double u_max = u_diag.maxCoeff();
  double u_min = u_diag.minCoeff();
  if (u_max <= 0.0 || u_min <= 1e-14 * u_max) {
    throw SingularJacobianError("Jacobian numerically singular in Newton step", u_min);
  }
  Eigen::VectorXd rhs = F.eval(z);
  Eigen::VectorXd s = lu.solve(rhs);
  // One step of iterative refinement tightens agreement with the beta oracle.
  s += lu.solve(rhs - J * s);
  return s;
}

}  // namespace

Eigen::VectorXd newton_step(const PolySystem& F, const Eigen::VectorXd& z) {
  return z - newton_displacement(F, z);
}

int required_iterations(double initial_distance, double eps) {
  if (!(initial_distance > 0.0) || !(eps > 0.0)) {
    throw InputError("required_iterations needs positive arguments");
  }
  if (eps >= initial_distance) return 0;
  double v = std::log2(1.0 - std::log2(eps / initial_distance));
  // Guard against a last-ulp overshoot at exact integer values.
  return static_cast<int>(std::ceil(v - 1e-12));
}

NewtonTrace newton_solve(const PolySystem& F, const Eigen::VectorXd& z0,
                         const NewtonOptions& options) {
  NewtonTrace trace;
  Eigen::VectorXd z = z0;
  double res = F.eval(z).norm();
  trace.iterates.push_back({z, res, 0.0});
  while (res > options.eps && trace.iterations < options.max_iter) {
    Eigen::VectorXd next;
    try {
      next = newton_step(F, z);
    } catch (const SingularJacobianError& e) {
      trace.converged = false;
      trace.final_residual = res;
      throw NewtonSingularError(e.what(), e.sigma_min(), trace);
    }
    double step = (next - z).norm();
    z = next;
    res = F.eval(z).norm();
    ++trace.iterations;
    trace.iterates.push_back({z, res, step});
  }
  trace.converged = res <= options.eps;
  trace.final_residual = res;
  return trace;
}

}  // namespace polyopt
