#include "polyopt/alpha.hpp"

#include <cmath>

#include "polyopt/errors.hpp"

namespace polyopt {

namespace {

struct JacobianData {
  Eigen::MatrixXd J;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  double sigma_min;
  double sigma_max;
};

JacobianData factor_jacobian(const PolySystem& F, const Eigen::VectorXd& z) {
  if (F.size() != F.input_dim()) throw InputError("alpha test requires a square system");
  if (z.size() != F.input_dim()) throw InputError("point dimension mismatch");
  JacobianData data;
  data.J = F.jacobian(z);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(data.J);
  data.sigma_max = svd.singularValues()(0);
  data.sigma_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (data.sigma_max <= 0.0 || data.sigma_min <= 1e-14 * data.sigma_max) {
    throw SingularJacobianError("Jacobian numerically singular", data.sigma_min);
  }
  data.qr.compute(data.J);
  return data;
}

}  // namespace

double alpha_threshold() { return (13.0 - 3.0 * std::sqrt(17.0)) / 4.0; }

double beta(const PolySystem& F, const Eigen::VectorXd& z) {
  JacobianData data = factor_jacobian(F, z);
  return data.qr.solve(F.eval(z)).norm();
}

AlphaReport alpha_hat(const PolySystem& F, const Eigen::VectorXd& z) {
  JacobianData data = factor_jacobian(F, z);
  AlphaReport report;
  report.form = AlphaForm::Generic;
  report.sigma_min = data.sigma_min;
  report.threshold = alpha_threshold();
  report.beta = data.qr.solve(F.eval(z)).norm();

  const double zn = one_norm(z);
  const int m = F.size();
  // Delta_d(z) is diagonal, so D_F^{-1} Delta is a column-scaled inverse.
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(m, m);
  int dmax = 1;
  for (int i = 0; i < m; ++i) {
    int di = F.degrees()[i];
    dmax = std::max(dmax, di);
    delta(i, i) = std::sqrt(static_cast<double>(di)) * std::pow(zn, di - 1);
  }
  Eigen::MatrixXd M = data.qr.solve(delta);
  double op_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
  report.mu = std::max(1.0, F.bw_norm() * op_norm);
  report.alpha_hat =
      report.beta * report.mu * std::pow(static_cast<double>(dmax), 1.5) / (2.0 * zn);
  report.passes = report.alpha_hat <= report.threshold;
  return report;
}

AlphaReport alpha_hat_degree3(const PolySystem& F, const Eigen::VectorXd& z) {
  for (int d : F.degrees()) {
    if (d > 3) throw WrongFormError("specialized bound requires all component degrees <= 3");
  }
  JacobianData data = factor_jacobian(F, z);
  AlphaReport report;
  report.form = AlphaForm::Degree3Specialized;
  report.sigma_min = data.sigma_min;
  report.threshold = alpha_threshold();
  report.beta = data.qr.solve(F.eval(z)).norm();

  const double zn = one_norm(z);
  const double dim = static_cast<double>(F.size());
  double branch1 = 1.5 * std::sqrt(3.0) / zn;
  double branch2 = 4.5 * std::sqrt(dim) * F.bw_norm() * zn / data.sigma_min;
  report.alpha_hat = report.beta * std::max(branch1, branch2);
  // Written in the generic shape alpha = beta * mu * 3^{3/2} / (2 ||z||_1),
  // the specialized factor plays the role of mu.
  report.mu = std::max(1.0, std::sqrt(3.0 * dim) * F.bw_norm() * zn * zn / data.sigma_min);
  report.passes = report.alpha_hat <= report.threshold;
  return report;
}

bool passes(const AlphaReport& report) { return report.alpha_hat <= alpha_threshold(); }

}  // namespace polyopt
