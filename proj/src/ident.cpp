#include "polyopt/ident.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "polyopt/errors.hpp"

namespace polyopt {

namespace {

// theta(x, lambda) with x-dependent data frozen:
//   theta = ||b - G lambda|| + const_feas + |d . lambda| + ||max(0, -lambda_I)||
// where b = grad f(x), G columns are grad g_i(x), d_i = g_i(x) on I (0 on E),
// and const_feas collects the x-only feasibility terms.
struct OmegaData {
  Eigen::VectorXd b;
  Eigen::MatrixXd G;            // n x m
  Eigen::VectorXd d;            // m
  double const_feas = 0.0;
  std::vector<bool> is_ineq;

  double theta(const Eigen::VectorXd& lam) const {
    double sign_viol = 0.0;
    for (int i = 0; i < lam.size(); ++i) {
      if (is_ineq[i]) {
        double neg = std::max(0.0, -lam[i]);
        sign_viol += neg * neg;
      }
    }
    return (b - G * lam).norm() + const_feas + std::abs(d.dot(lam)) + std::sqrt(sign_viol);
  }

  Eigen::VectorXd project(Eigen::VectorXd lam) const {
    for (int i = 0; i < lam.size(); ++i) {
      if (is_ineq[i] && lam[i] < 0.0) lam[i] = 0.0;
    }
    return lam;
  }
};

OmegaData make_data(const Pop& pop, const Eigen::VectorXd& x) {
  const int m = pop.constraint_count();
  OmegaData data;
  data.b = pop.objective.gradient(x);
  data.G.resize(pop.n, m);
  data.d = Eigen::VectorXd::Zero(m);
  data.is_ineq.resize(m);
  double eq_sq = 0.0, ineq_sq = 0.0;
  for (int i = 0; i < m; ++i) {
    data.G.col(i) = pop.constraints[i].gradient(x);
    double gi = pop.constraints[i].eval(x);
    data.is_ineq[i] = !pop.is_equality(i);
    if (pop.is_equality(i)) {
      eq_sq += gi * gi;
    } else {
      data.d[i] = gi;
      double v = std::max(0.0, -gi);
      ineq_sq += v * v;
    }
  }
  data.const_feas = std::sqrt(eq_sq) + std::sqrt(ineq_sq);
  return data;
}

// Gradient of the Huber-smoothed objective
//   ||b - G lam||_mu + |d . lam|_mu  (feasible part only; projection handles signs).
Eigen::VectorXd smoothed_gradient(const OmegaData& data, const Eigen::VectorXd& lam,
                                  double mu) {
  Eigen::VectorXd q = data.b - data.G * lam;
  double qn = q.norm();
  Eigen::VectorXd grad = -data.G.transpose() * (q / std::max(mu, qn));
  double s = data.d.dot(lam);
  grad += data.d * std::clamp(s / mu, -1.0, 1.0);
  return grad;
}

double smoothed_value(const OmegaData& data, const Eigen::VectorXd& lam, double mu) {
  auto huber = [mu](double t) { return t >= mu ? t - 0.5 * mu : 0.5 * t * t / mu; };
  return huber((data.b - data.G * lam).norm()) + huber(std::abs(data.d.dot(lam)));
}

// One continuation stage of FISTA with function-value restarts.  Returns the
// final point; sets *stalled when the prox-gradient tolerance was not met.
Eigen::VectorXd fista_stage(const OmegaData& data, Eigen::VectorXd lam, double mu,
                            double lipschitz, int max_iter, double grad_tol, bool* stalled) {
  Eigen::VectorXd point = data.project(std::move(lam));
  Eigen::VectorXd momentum = point;
  double t = 1.0;
  double step = 1.0 / lipschitz;
  double prev_val = std::numeric_limits<double>::infinity();
  *stalled = true;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd grad = smoothed_gradient(data, momentum, mu);
    Eigen::VectorXd next = data.project(momentum - step * grad);
    double prox_norm = (next - momentum).norm() / step;
    if (prox_norm <= grad_tol) {
      *stalled = false;
      return next;
    }
    double val = smoothed_value(data, next, mu);
    if (val > prev_val) {
      // restart the momentum sequence
      t = 1.0;
      momentum = point;
      prev_val = std::numeric_limits<double>::infinity();
      continue;
    }
    prev_val = val;
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    momentum = next + ((t - 1.0) / t_next) * (next - point);
    point = next;
    t = t_next;
  }
  return point;
}

// Least-squares candidate on a fixed support: minimize ||b - G_P lam_P||,
// optionally pinned to d_P . lam_P = 0, then clipped to the sign constraints.
Eigen::VectorXd support_candidate(const OmegaData& data, const std::vector<int>& support,
                                  bool pin_complementarity) {
  const int m = static_cast<int>(data.d.size());
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  if (support.empty()) return lam;
  const int k = static_cast<int>(support.size());
  Eigen::VectorXd dP(k);
  for (int c = 0; c < k; ++c) dP[c] = data.d[support[c]];
  int rows = static_cast<int>(data.b.size()) + (pin_complementarity ? 1 : 0);
  Eigen::MatrixXd A(rows, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  rhs.head(data.b.size()) = data.b;
  for (int c = 0; c < k; ++c) A.col(c).head(data.b.size()) = data.G.col(support[c]);
  if (pin_complementarity) {
    // Weighted row approximating the hard constraint d_P . lam = 0.
    double scale = 1e6 * std::max(1.0, data.G.norm());
    A.row(rows - 1) = scale * dP.transpose();
    rhs[rows - 1] = 0.0;
  }
  Eigen::VectorXd sol =
      A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
  for (int c = 0; c < k; ++c) lam[support[c]] = sol[c];
  // Clip the sign constraints, then re-solve on the surviving support once.
  std::vector<int> kept;
  for (int c = 0; c < k; ++c) {
    int i = support[c];
    if (data.is_ineq[i] && lam[i] < 0.0) {
      lam[i] = 0.0;
    } else {
      kept.push_back(i);
    }
  }
  if (kept.size() < support.size() && !kept.empty() && !pin_complementarity) {
    return support_candidate(data, kept, false);
  }
  return lam;
}

}  // namespace

OmegaResult omega(const Pop& pop, const Eigen::VectorXd& x) {
  if (x.size() != pop.n) throw InputError("point dimension mismatch");
  const int m = pop.constraint_count();
  OmegaResult result;
  if (m == 0) {
    result.omega = pop.objective.gradient(x).norm();
    result.lambda = Eigen::VectorXd(0);
    return result;
  }
  OmegaData data = make_data(pop, x);

  double G_norm = data.G.norm();  // Frobenius bounds the spectral norm
  double lipschitz_base = G_norm * G_norm + data.d.squaredNorm() + 1e-12;

  // Smoothing continuation: coarse-to-fine Huber parameter.
  double scale = std::max(1.0, data.b.norm());
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  bool stalled = false;
  for (double mu = 0.1 * scale; mu >= 1e-7 * scale; mu *= 0.1) {
    double lipschitz = lipschitz_base / mu;
    lam = fista_stage(data, lam, mu, lipschitz, 2000, 1e-4 * scale * std::sqrt(mu / scale),
                      &stalled);
  }

  double best = data.theta(lam);
  Eigen::VectorXd best_lam = lam;
  auto consider = [&](const Eigen::VectorXd& cand) {
    double v = data.theta(cand);
    if (v < best) {
      best = v;
      best_lam = cand;
    }
  };

  consider(Eigen::VectorXd::Zero(m));

  // Candidate supports: equalities always in; inequalities entering in order
  // of increasing g_i(x) (bottom-k sets), plus the support found by the
  // first-order pass.
  std::vector<int> eq = pop.equality_indices();
  std::vector<int> ineq = pop.inequality_indices();
  std::sort(ineq.begin(), ineq.end(), [&](int a, int b) {
    if (data.d[a] != data.d[b]) return data.d[a] < data.d[b];
    return a < b;
  });
  int max_extra = std::min<int>(static_cast<int>(ineq.size()), pop.n + 4);
  for (int k = 0; k <= max_extra; ++k) {
    std::vector<int> support = eq;
    support.insert(support.end(), ineq.begin(), ineq.begin() + k);
    std::sort(support.begin(), support.end());
    consider(support_candidate(data, support, false));
    consider(support_candidate(data, support, true));
  }
  {
    double lam_max = lam.cwiseAbs().maxCoeff();
    std::vector<int> support;
    for (int i = 0; i < m; ++i) {
      if (std::abs(lam[i]) > 1e-10 * std::max(1.0, lam_max)) support.push_back(i);
    }
    for (int i : eq) {
      if (!std::binary_search(support.begin(), support.end(), i)) support.push_back(i);
    }
    std::sort(support.begin(), support.end());
    consider(support_candidate(data, support, false));
    consider(support_candidate(data, support, true));
  }

  // Every candidate above is sign-feasible, so best_lam attains best exactly.
  result.omega = best;
  result.lambda = best_lam;
  result.accuracy_warning = stalled;
  return result;
}

IdentReport active_set(const Pop& pop, const Eigen::VectorXd& x) {
  OmegaResult base = omega(pop, x);
  IdentReport report;
  report.omega = base.omega;
  report.lambda = base.lambda;
  report.accuracy_warning = base.accuracy_warning;

  // The residual scales linearly with f, so the activity rule is driven by
  // the normalized variant (f rescaled to unit gradient at x); the raw value
  // is reported alongside for diagnostics.
  double grad_norm = pop.objective.gradient(x).norm();
  if (grad_norm > 0.0 && grad_norm != 1.0) {
    Pop scaled = pop;
    scaled.objective *= 1.0 / grad_norm;
    report.omega_scaled = omega(scaled, x).omega;
  } else {
    report.omega_scaled = base.omega;
  }

  double clamped = std::clamp(report.omega_scaled, 1e-300, 0.99);
  report.threshold = -1.0 / std::log(clamped);
  for (int i : pop.inequality_indices()) {
    if (pop.constraints[i].eval(x) <= report.threshold) report.active.push_back(i);
  }
  return report;
}

}  // namespace polyopt
