#pragma once

#include <optional>
#include <string>

#include "polyopt/alpha.hpp"
#include "polyopt/ident.hpp"
#include "polyopt/newton.hpp"
#include "polyopt/sdp.hpp"

namespace polyopt {

struct HybridConfig {
  int max_order = 3;
  std::optional<int> initial_order;  // raised to the minimum admissible order
  long slice_budget = 2000;          // SDP iterations per outer slice
  double sdp_tol = 1e-7;             // per-order residual target
  double gap_tol = 1e-6;
  double feas_tol = 1e-8;
  double newton_eps = 1e-12;
  int newton_max_iter = 50;
  int max_outer = 400;               // safety cap on outer iterations
  int stall_limit = 3;               // converged-at-max-order slices before giving up
  AlphaForm alpha_form = AlphaForm::Generic;
  // Optional candidate point: probed through the certification pipeline before
  // the first slice and used to warm-start the moment vector.
  std::optional<Eigen::VectorXd> initial_point;
  bool verbose = false;
  std::ostream* sdp_trace = nullptr;
};

// One outer iteration of the hybrid loop.
struct TraceEntry {
  int outer = 0;
  int order = 0;
  bool probe = false;  // entry produced by the initial-point probe, not a slice
  SolveReport sdp;
  Eigen::VectorXd x;
  double omega = 0.0;
  double threshold = 0.0;
  std::vector<int> active;
  bool licq_ok = false;
  double licq_sigma_min = 0.0;
  bool alpha_ran = false;
  AlphaReport alpha;
  bool newton_ran = false;
  bool newton_converged = false;
  int newton_iterations = 0;
  bool global_ok = false;
  double global_gap = 0.0;
  std::string note;
};

struct Certificate {
  double gap = 0.0;     // f(xbar) - bound
  double bound = 0.0;
  AlphaReport alpha;
  int newton_iterations = 0;
  double kkt_residual = 0.0;
};

struct HybridResult {
  bool certified = false;
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;  // over all constraints (zeros off the working set)
  double objective = 0.0;
  std::optional<double> bound;  // best lower bound encountered
  std::optional<Certificate> certificate;
  int final_order = 0;
  std::vector<TraceEntry> trace;
};

struct LicqReport {
  bool pass = false;
  double sigma_min = 0.0;
};

struct GlobalCheckResult {
  bool pass = false;
  double gap = 0.0;  // f(xbar) - bound when a bound exists
  std::string reason;
};

// Numerical LICQ probe: stacks the gradients of E u A at x and passes iff
// sigma_min >= 1e-8 sigma_max.  Duplicates in `active` simply repeat rows.
LicqReport check_licq(const Pop& pop, const Eigen::VectorXd& x, const std::vector<int>& active);

// Global-optimality gate: feasibility within feas_tol, a lower bound present,
// and f(xbar) - bound <= gap_tol * max(1, |bound|).
GlobalCheckResult global_check(const Pop& pop, const Eigen::VectorXd& xbar,
                               std::optional<double> bound, double feas_tol, double gap_tol);

// The hybrid two-phase loop: partial relaxation solves, point extraction,
// active-set identification, Fletcher multipliers, the alpha-hat gate,
// certified Newton, the global gate, and order escalation up to max_order.
HybridResult run(const Pop& pop, const HybridConfig& cfg);

}  // namespace polyopt
