#pragma once

#include <vector>

#include "polyopt/pop.hpp"

namespace polyopt {

struct OmegaResult {
  double omega = 0.0;          // min over admissible lambda of theta(x, lambda)
  Eigen::VectorXd lambda;      // minimizer over all constraints (zeros off support)
  bool accuracy_warning = false;
};

struct IdentReport {
  double omega = 0.0;          // raw residual, reported for diagnostics
  double omega_scaled = 0.0;   // omega with f rescaled to unit gradient at x
  Eigen::VectorXd lambda;      // minimizing multiplier over E u I
  double threshold = 0.0;      // -1 / log(omega_scaled clamped to [1e-300, 0.99])
  std::vector<int> active;     // A(x), sorted inequality indices
  bool accuracy_warning = false;
};

// Minimizes theta(x, .) over lambda_E free, lambda_I >= 0.  The problem is
// convex (a sum of two norms, an absolute value and constants), solved by
// accelerated projected proximal-gradient descent on a smoothed objective with
// continuation, followed by least-squares polishing on candidate supports.
OmegaResult omega(const Pop& pop, const Eigen::VectorXd& x);

// Activity rule A(x) = { i in I : g_i(x) <= -1/log(omega) } with omega
// clamped to [1e-300, 0.99]; ties count as active.  Because theta scales
// linearly with f, the rule uses the scale-normalized omega (objective
// rescaled to unit gradient at x), making A(x) invariant under f -> c f.
IdentReport active_set(const Pop& pop, const Eigen::VectorXd& x);

}  // namespace polyopt
