#pragma once

#include "polyopt/poly.hpp"

namespace polyopt {

enum class AlphaForm { Generic, Degree3Specialized };

struct AlphaReport {
  double beta = 0.0;
  double mu = 1.0;
  double sigma_min = 0.0;   // smallest singular value of the Jacobian at z
  double alpha_hat = 0.0;
  double threshold = 0.0;   // (13 - 3 sqrt 17) / 4
  bool passes = false;
  AlphaForm form = AlphaForm::Generic;
};

// The universal point-estimation threshold (13 - 3 sqrt 17) / 4, evaluated
// from the irrational constant rather than a decimal literal.
double alpha_threshold();

// Newton-step length ||D_F(z)^{-1} F(z)||; requires a square system with an
// invertible Jacobian (sigma_min > 1e-14 sigma_max), else SingularJacobianError.
double beta(const PolySystem& F, const Eigen::VectorXd& z);

// Generic bound: alpha_hat = beta * mu * (max d_i)^{3/2} / (2 ||z||_1) with
// mu = max(1, ||F|| * ||D_F(z)^{-1} Delta_d(z)||) and the degree-weighted
// diagonal Delta_d(z)_ii = d_i^{1/2} ||z||_1^{d_i - 1}.
AlphaReport alpha_hat(const PolySystem& F, const Eigen::VectorXd& z);

// Specialized bound for systems with all component degrees <= 3:
//   alpha_hat = beta * max(1.5 sqrt(3) / ||z||_1,
//                          4.5 sqrt(dim) ||F|| ||z||_1 / sigma_min).
// Degree > 3 components raise WrongFormError.
AlphaReport alpha_hat_degree3(const PolySystem& F, const Eigen::VectorXd& z);

bool passes(const AlphaReport& report);

}  // namespace polyopt
