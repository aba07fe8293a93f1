#include "polyopt/driver.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "polyopt/errors.hpp"

namespace polyopt {

LicqReport check_licq(const Pop& pop, const Eigen::VectorXd& x,
                      const std::vector<int>& active) {
  std::vector<int> rows = pop.equality_indices();
  rows.insert(rows.end(), active.begin(), active.end());
  LicqReport report;
  if (rows.empty()) {
    report.pass = true;  // vacuous
    report.sigma_min = std::numeric_limits<double>::infinity();
    return report;
  }
  Eigen::MatrixXd J(static_cast<int>(rows.size()), pop.n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    J.row(static_cast<int>(r)) = pop.constraints[rows[r]].gradient(x).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (static_cast<int>(rows.size()) > pop.n) smin = 0.0;  // more rows than columns
  report.sigma_min = smin;
  report.pass = smax > 0.0 && smin >= 1e-8 * smax;
  return report;
}

GlobalCheckResult global_check(const Pop& pop, const Eigen::VectorXd& xbar,
                               std::optional<double> bound, double feas_tol,
                               double gap_tol) {
  GlobalCheckResult result;
  double viol = violation(pop, xbar);
  if (viol > feas_tol) {
    result.gap = std::numeric_limits<double>::quiet_NaN();
    result.reason = "infeasible: violation " + std::to_string(viol);
    return result;
  }
  if (!bound.has_value()) {
    result.gap = std::numeric_limits<double>::quiet_NaN();
    result.reason = "no lower bound available";
    return result;
  }
  double f = pop.objective.eval(xbar);
  result.gap = f - *bound;
  if (result.gap <= gap_tol * std::max(1.0, std::abs(*bound))) {
    result.pass = true;
  } else {
    result.reason = "bound gap " + std::to_string(result.gap);
  }
  return result;
}

namespace {

Eigen::VectorXd scatter_multiplier(const Pop& pop, const std::vector<int>& ws,
                                   const Eigen::VectorXd& lam_ws) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(pop.constraint_count());
  for (std::size_t c = 0; c < ws.size(); ++c) full[ws[c]] = lam_ws[static_cast<int>(c)];
  return full;
}

}  // namespace

HybridResult run(const Pop& pop, const HybridConfig& cfg) {
  if (cfg.max_order < 1) throw InputError("max_order must be >= 1");
  if (cfg.slice_budget < 0) throw InputError("slice budget must be >= 0");
  const int r0 = min_order(pop);
  int r = std::max(r0, cfg.initial_order.value_or(r0));
  if (cfg.max_order < r) {
    throw InputError("max_order " + std::to_string(cfg.max_order) +
                     " below required order " + std::to_string(r));
  }
  if (cfg.initial_point && cfg.initial_point->size() != pop.n) {
    throw InputError("initial point dimension mismatch");
  }

  MomentSdp sdp = build_moment_sdp(pop, r);
  SdpState state = cfg.initial_point
                       ? make_state(sdp, point_moments(sdp.index, *cfg.initial_point))
                       : make_state(sdp);

  HybridResult out;
  std::optional<double> best_bound;

  // Best-effort bookkeeping: prefer the feasible candidate with lowest
  // objective, else the least infeasible point seen.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double best_f = kInf, least_viol = kInf;
  Eigen::VectorXd best_x, best_lambda, least_viol_x;
  auto record_candidate = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& lam_full) {
    double viol = violation(pop, x);
    if (viol <= cfg.feas_tol) {
      double f = pop.objective.eval(x);
      if (f < best_f) {
        best_f = f;
        best_x = x;
        best_lambda = lam_full;
      }
    }
    if (viol < least_viol) {
      least_viol = viol;
      least_viol_x = x;
    }
  };

  bool pending_probe = cfg.initial_point.has_value();
  int stall = 0;
  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    TraceEntry entry;
    entry.outer = outer;
    entry.order = r;

    Eigen::VectorXd x;
    if (pending_probe) {
      pending_probe = false;
      entry.probe = true;
      SolveOptions probe_opt;
      probe_opt.budget = 0;
      probe_opt.tol = cfg.sdp_tol;
      entry.sdp = solve_partial(sdp, state, probe_opt);
      x = *cfg.initial_point;
    } else {
      SolveOptions opt;
      opt.budget = cfg.slice_budget;
      opt.tol = cfg.sdp_tol;
      opt.trace = cfg.sdp_trace;
      entry.sdp = solve_partial(sdp, state, opt);
      x = extract_point(sdp, state.y);
    }
    entry.x = x;
    if (auto b = lower_bound(entry.sdp, cfg.sdp_tol)) {
      if (!best_bound || *b > *best_bound) best_bound = *b;
    }
    record_candidate(x, Eigen::VectorXd::Zero(pop.constraint_count()));

    IdentReport ident = active_set(pop, x);
    entry.omega = ident.omega;
    entry.threshold = ident.threshold;
    entry.active = ident.active;

    LicqReport licq = check_licq(pop, x, ident.active);
    entry.licq_ok = licq.pass;
    entry.licq_sigma_min = licq.sigma_min;

    bool escalate_now = false;
    if (licq.pass) {
      try {
        ActiveSet A(pop, ident.active);
        std::vector<int> ws = working_set(pop, A);
        Eigen::VectorXd lam_ws = fletcher_multiplier(pop, A, x);
        PolySystem F = reduce(pop, A);
        Eigen::VectorXd z(pop.n + static_cast<int>(ws.size()));
        z << x, lam_ws;
        AlphaReport arep = cfg.alpha_form == AlphaForm::Generic
                               ? alpha_hat(F, z)
                               : alpha_hat_degree3(F, z);
        entry.alpha_ran = true;
        entry.alpha = arep;
        if (passes(arep)) {
          NewtonOptions nopt;
          nopt.eps = cfg.newton_eps;
          nopt.max_iter = cfg.newton_max_iter;
          NewtonTrace nt = newton_solve(F, z, nopt);
          entry.newton_ran = true;
          entry.newton_converged = nt.converged;
          entry.newton_iterations = nt.iterations;
          if (nt.converged) {
            Eigen::VectorXd zf = nt.iterates.back().z;
            Eigen::VectorXd xbar = zf.head(pop.n);
            Eigen::VectorXd lam_full = scatter_multiplier(pop, ws, zf.tail(ws.size()));
            GlobalCheckResult gc =
                global_check(pop, xbar, best_bound, cfg.feas_tol, cfg.gap_tol);
            entry.global_ok = gc.pass;
            entry.global_gap = gc.gap;
            record_candidate(xbar, lam_full);
            if (gc.pass) {
              out.certified = true;
              out.x = xbar;
              out.lambda = lam_full;
              out.objective = pop.objective.eval(xbar);
              out.bound = best_bound;
              Certificate cert;
              cert.gap = gc.gap;
              cert.bound = *best_bound;
              cert.alpha = arep;
              cert.newton_iterations = nt.iterations;
              cert.kkt_residual = kkt_residual(pop, xbar, lam_full);
              out.certificate = cert;
              out.final_order = r;
              out.trace.push_back(entry);
              if (cfg.verbose) {
                std::cerr << "certified at order " << r << ", gap " << gc.gap << "\n";
              }
              return out;
            }
            // Backtrack: the Newton output is discarded (beyond best-effort
            // bookkeeping); the SDP warm-start state is untouched.
            entry.note = gc.reason;
            escalate_now = true;
          }
        }
      } catch (const DegenerateConstraintsError& e) {
        entry.note = e.what();
      } catch (const SingularJacobianError& e) {
        entry.note = e.what();
      } catch (const WrongFormError& e) {
        entry.note = e.what();
      }
    }

    if (entry.sdp.converged || escalate_now) {
      if (r < cfg.max_order) {
        ++r;
        sdp = build_moment_sdp(pop, r);
        state = make_state(sdp, point_moments(sdp.index, x));
        stall = 0;
        entry.note += entry.note.empty() ? "" : "; ";
        entry.note += "escalate to order " + std::to_string(r);
      } else if (entry.sdp.converged) {
        ++stall;
      }
    }
    if (cfg.verbose) {
      std::cerr << "outer " << outer << " order " << entry.order << " obj "
                << entry.sdp.objective << " res " << entry.sdp.primal_residual << "/"
                << entry.sdp.dual_residual << " |A| " << entry.active.size()
                << (entry.newton_ran ? " newton" : "") << " " << entry.note << "\n";
    }
    out.trace.push_back(entry);
    if (stall >= cfg.stall_limit) break;
  }

  // No certification: report the best feasible point seen, else the least
  // infeasible one, flagged uncertified.
  out.certified = false;
  if (best_f < kInf) {
    out.x = best_x;
    out.lambda = best_lambda;
    out.objective = best_f;
  } else {
    out.x = least_viol_x;
    out.lambda = Eigen::VectorXd::Zero(pop.constraint_count());
    out.objective = pop.objective.eval(least_viol_x);
  }
  out.bound = best_bound;
  out.final_order = r;
  return out;
}

}  // namespace polyopt
