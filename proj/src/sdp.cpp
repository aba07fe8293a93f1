#include "polyopt/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <ostream>

#include "polyopt/errors.hpp"

namespace polyopt {

namespace {

constexpr int kPowerIterations = 50;
constexpr double kStepSafety = 0.9;
constexpr int kCheckEvery = 25;
constexpr double kDivergenceFactor = 1e6;
constexpr long kDivergenceWindow = 1000;

std::vector<const MomentBlock*> all_blocks(const MomentSdp& sdp) {
  std::vector<const MomentBlock*> out;
  out.reserve(sdp.psd_blocks.size() + sdp.zero_blocks.size());
  for (const auto& b : sdp.psd_blocks) out.push_back(&b);
  for (const auto& b : sdp.zero_blocks) out.push_back(&b);
  return out;
}

// Accumulates the adjoint K^* applied to the stacked block matrices.
// Matrices must be symmetric; off-diagonal entries count twice because only
// the upper triangle of each block operator is stored.
Eigen::VectorXd apply_adjoint(const MomentSdp& sdp, const std::vector<Eigen::MatrixXd>& mats) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sdp.length());
  auto blocks = all_blocks(sdp);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (const auto& e : blocks[b]->entries) {
      double mult = (e.row == e.col) ? 1.0 : 2.0;
      out[e.pos] += mult * e.coef * mats[b](e.row, e.col);
    }
  }
  return out;
}

Eigen::VectorXd objective_vector(const MomentSdp& sdp) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sdp.length());
  for (const auto& [pos, coef] : sdp.objective) c[pos] += coef;
  return c;
}

double estimate_operator_norm(const MomentSdp& sdp) {
  auto blocks = all_blocks(sdp);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(sdp.length());
  v /= v.norm();
  double lambda = 0.0;
  for (int it = 0; it < kPowerIterations; ++it) {
    std::vector<Eigen::MatrixXd> Kv;
    Kv.reserve(blocks.size());
    for (const auto* blk : blocks) Kv.push_back(sdp.block_value(*blk, v));
    Eigen::VectorXd w = apply_adjoint(sdp, Kv);
    lambda = w.norm();
    if (lambda == 0.0) return 1.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

struct Residuals {
  double primal;
  double dual;
  double gap;
  double objective;
  double dual_objective;
};

Residuals compute_residuals(const MomentSdp& sdp, const SdpState& state,
                            const Eigen::VectorXd& c) {
  double primal_sq = 0.0;
  std::size_t nb = sdp.psd_blocks.size();
  for (std::size_t b = 0; b < nb; ++b) {
    Eigen::MatrixXd B = sdp.block_value(sdp.psd_blocks[b], state.y);
    primal_sq += (B - project_psd(B)).squaredNorm();
  }
  for (const auto& blk : sdp.zero_blocks) {
    primal_sq += sdp.block_value(blk, state.y).squaredNorm();
  }
  Eigen::VectorXd r = c - apply_adjoint(sdp, state.duals);
  double dual_obj = r[0];
  r[0] = 0.0;
  Residuals res;
  res.primal = std::sqrt(primal_sq) / (1.0 + state.y.norm());
  res.dual = r.norm() / (1.0 + c.norm());
  res.objective = sdp.objective_value(state.y);
  res.dual_objective = dual_obj;
  res.gap = std::abs(res.objective - res.dual_objective) / (1.0 + std::abs(res.objective));
  return res;
}

}  // namespace

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw InputError("project_psd needs a square matrix");
  Eigen::MatrixXd A = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

SdpState make_state(const MomentSdp& sdp) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(sdp.length());
  y[0] = 1.0;
  return make_state(sdp, y);
}

SdpState make_state(const MomentSdp& sdp, const Eigen::VectorXd& y_init) {
  if (y_init.size() != sdp.length()) throw InputError("warm-start vector length mismatch");
  SdpState st;
  st.y = y_init;
  st.y[0] = 1.0;
  st.y_prev = st.y;
  auto blocks = all_blocks(sdp);
  for (const auto* blk : blocks) {
    st.duals.push_back(Eigen::MatrixXd::Zero(blk->size, blk->size));
    st.block_vars.push_back(Eigen::MatrixXd::Zero(blk->size, blk->size));
  }
  double norm_K = estimate_operator_norm(sdp);
  st.sigma = kStepSafety / norm_K;
  st.tau = kStepSafety / norm_K;
  return st;
}

SolveReport solve_partial(const MomentSdp& sdp, SdpState& state, const SolveOptions& options) {
  if (options.budget < 0) throw InputError("negative iteration budget");
  const Eigen::VectorXd c = objective_vector(sdp);
  const std::size_t n_psd = sdp.psd_blocks.size();
  const std::size_t n_zero = sdp.zero_blocks.size();

  SolveReport report;
  Residuals res = compute_residuals(sdp, state, c);
  bool header = options.trace != nullptr && state.iteration == 0;
  if (header) *options.trace << "iteration,objective,primal_residual,dual_residual,gap\n";
  auto emit_trace = [&](const Residuals& r) {
    if (options.trace != nullptr) {
      *options.trace << state.iteration << "," << r.objective << "," << r.primal << ","
                     << r.dual << "," << r.gap << "\n";
    }
  };
  emit_trace(res);

  // Divergence guard: (iteration, residual) checkpoints.
  std::vector<std::pair<long, double>> history;
  history.emplace_back(state.iteration, std::max(res.primal, res.dual));

  long done = 0;
  bool converged = res.primal <= options.tol && res.dual <= options.tol;
  while (!converged && done < options.budget) {
    Eigen::VectorXd ybar = 2.0 * state.y - state.y_prev;
    // Dual ascent with the splitting copies: V_j is the cone projection of
    // B_j(ybar) shifted by the running dual, and the dual moves by the gap
    // between copy and block value.
    for (std::size_t b = 0; b < n_psd; ++b) {
      Eigen::MatrixXd B = sdp.block_value(sdp.psd_blocks[b], ybar);
      state.block_vars[b] = project_psd(B - state.duals[b] / state.sigma);
      state.duals[b] += state.sigma * (state.block_vars[b] - B);
    }
    for (std::size_t b = 0; b < n_zero; ++b) {
      Eigen::MatrixXd B = sdp.block_value(sdp.zero_blocks[b], ybar);
      state.block_vars[n_psd + b].setZero();
      state.duals[n_psd + b] -= state.sigma * B;
    }
    Eigen::VectorXd y_next =
        state.y + state.tau * (apply_adjoint(sdp, state.duals) - c);
    y_next[0] = 1.0;  // normalization y_0 = 1 is kept exactly
    state.y_prev = state.y;
    state.y = y_next;
    ++state.iteration;
    ++done;

    if (done % kCheckEvery == 0 || done == options.budget) {
      res = compute_residuals(sdp, state, c);
      emit_trace(res);
      double combined = std::max(res.primal, res.dual);
      history.emplace_back(state.iteration, combined);
      // Compare against the newest checkpoint at least one window old, and
      // drop anything older so growth is measured over a sliding window.
      std::size_t ref = history.size();
      for (std::size_t i = history.size(); i-- > 0;) {
        if (state.iteration - history[i].first >= kDivergenceWindow) {
          ref = i;
          break;
        }
      }
      if (ref < history.size()) {
        if (combined > kDivergenceFactor * history[ref].second) {
          throw DivergenceError("splitting solver diverged: residual " +
                                std::to_string(combined) + " vs " +
                                std::to_string(history[ref].second) + " at iteration " +
                                std::to_string(state.iteration));
        }
        history.erase(history.begin(), history.begin() + static_cast<long>(ref));
      }
      converged = res.primal <= options.tol && res.dual <= options.tol;
    }
  }

  report.iterations = done;
  report.total_iterations = state.iteration;
  report.converged = res.primal <= options.tol && res.dual <= options.tol;
  report.objective = res.objective;
  report.dual_objective = res.dual_objective;
  report.primal_residual = res.primal;
  report.dual_residual = res.dual;
  report.gap = res.gap;
  return report;
}

std::optional<double> lower_bound(const SolveReport& report, double tol) {
  if (report.dual_residual <= 10.0 * tol) return report.dual_objective;
  return std::nullopt;
}

}  // namespace polyopt
