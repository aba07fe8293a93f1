#include "polyopt/moment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <tuple>

#include "polyopt/errors.hpp"

namespace polyopt {

namespace {

// Enumerates all exponents in n variables with degree <= two_r.
void enumerate_exponents(int n, int two_r, std::vector<Exponent>& out) {
  std::vector<int> cur(n, 0);
  // Depth-first over positions; collects every vector with sum <= two_r.
  std::function<void(int, int)> rec = [&](int idx, int remaining) {
    if (idx == n) {
      out.emplace_back(cur);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      cur[idx] = v;
      rec(idx + 1, remaining - v);
    }
    cur[idx] = 0;
  };
  rec(0, two_r);
}

int ceil_half(int d) { return (d + 1) / 2; }

}  // namespace

MomentIndex::MomentIndex(int n, int two_r) : n_(n), two_r_(two_r) {
  if (n <= 0) throw InputError("moment index needs at least one variable");
  if (two_r < 0) throw InputError("negative moment degree");
  enumerate_exponents(n, two_r, forward_);
  std::sort(forward_.begin(), forward_.end());
  backward_.reserve(forward_.size() * 2);
  prefix_.assign(two_r + 1, 0);
  for (int pos = 0; pos < static_cast<int>(forward_.size()); ++pos) {
    backward_.emplace(forward_[pos], pos);
    ++prefix_[forward_[pos].degree()];
  }
  for (int d = 1; d <= two_r; ++d) prefix_[d] += prefix_[d - 1];
}

int MomentIndex::position(const Exponent& e) const {
  auto it = backward_.find(e);
  if (it == backward_.end()) throw InputError("exponent outside moment index range");
  return it->second;
}

int MomentIndex::count_up_to(int d) const {
  if (d < 0) return 0;
  return prefix_[std::min(d, two_r_)];
}

double MomentSdp::objective_value(const Eigen::VectorXd& y) const {
  double acc = 0.0;
  for (const auto& [pos, coef] : objective) acc += coef * y[pos];
  return acc;
}

Eigen::MatrixXd MomentSdp::block_value(const MomentBlock& b, const Eigen::VectorXd& y) const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(b.size, b.size);
  for (const auto& e : b.entries) M(e.row, e.col) += e.coef * y[e.pos];
  for (int r = 0; r < b.size; ++r) {
    for (int c = r + 1; c < b.size; ++c) M(c, r) = M(r, c);
  }
  return M;
}

int min_order(const Pop& pop) {
  int r0 = ceil_half(pop.objective.degree());
  for (const auto& g : pop.constraints) r0 = std::max(r0, ceil_half(g.degree()));
  return std::max(r0, 1);
}

namespace {

// Localizing block for polynomial g at order s: entry (a, b) carries
// sum_delta g_delta * y_{alpha_a + alpha_b + delta}.  g = 1 gives the plain
// moment block.  Duplicate positions are kept as repeated entries.
MomentBlock make_block(const MomentIndex& index, const Polynomial& g, int s,
                       const std::string& label) {
  MomentBlock blk;
  blk.size = index.count_up_to(s);
  blk.label = label;
  for (int a = 0; a < blk.size; ++a) {
    for (int b = a; b < blk.size; ++b) {
      Exponent ab = index.exponent(a).plus(index.exponent(b));
      for (const auto& [delta, coef] : g.terms()) {
        blk.entries.push_back({a, b, index.position(ab.plus(delta)), coef});
      }
    }
  }
  return blk;
}

}  // namespace

MomentSdp build_moment_sdp(const Pop& pop, int r) {
  int r0 = min_order(pop);
  if (r < r0) {
    throw OrderTooLowError("relaxation order " + std::to_string(r) +
                           " below minimum admissible order " + std::to_string(r0));
  }
  MomentSdp sdp;
  sdp.order = r;
  sdp.index = MomentIndex(pop.n, 2 * r);

  for (const auto& [e, c] : pop.objective.terms()) {
    sdp.objective.emplace_back(sdp.index.position(e), c);
  }

  Polynomial unit = Polynomial::constant(pop.n, 1.0);
  sdp.psd_blocks.push_back(make_block(sdp.index, unit, r, "moment"));
  for (int j = 0; j < pop.constraint_count(); ++j) {
    int rj = ceil_half(pop.constraints[j].degree());
    MomentBlock blk = make_block(sdp.index, pop.constraints[j], r - rj,
                                 "g" + std::to_string(j + 1));
    if (pop.is_equality(j)) {
      sdp.zero_blocks.push_back(std::move(blk));
    } else {
      sdp.psd_blocks.push_back(std::move(blk));
    }
  }
  return sdp;
}

double riesz(const MomentIndex& index, const Polynomial& p, const Eigen::VectorXd& y) {
  if (p.var_count() != index.var_count()) throw InputError("variable count mismatch");
  if (p.degree() > index.max_degree()) {
    throw InputError("polynomial degree exceeds moment index range");
  }
  double acc = 0.0;
  for (const auto& [e, c] : p.terms()) acc += c * y[index.position(e)];
  return acc;
}

Eigen::VectorXd point_moments(const MomentIndex& index, const Eigen::VectorXd& x) {
  if (x.size() != index.var_count()) throw InputError("point dimension mismatch");
  Eigen::VectorXd y(index.length());
  for (int pos = 0; pos < index.length(); ++pos) {
    const Exponent& e = index.exponent(pos);
    double v = 1.0;
    for (int i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) v *= x[i];
    }
    y[pos] = v;
  }
  return y;
}

Eigen::VectorXd extract_point(const MomentSdp& sdp, const Eigen::VectorXd& y) {
  if (y.size() != sdp.length()) throw InputError("moment vector length mismatch");
  double y0 = y[0];
  if (y0 <= 0.0) throw DegenerateMomentsError("moment vector has non-positive mass");
  const int n = sdp.index.var_count();
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = y[sdp.index.position(Exponent::unit(n, i))] / y0;
  }
  return x;
}

void write_sdpa(const MomentSdp& sdp, std::ostream& os) {
  const int m = sdp.length() - 1;  // y_0 is eliminated
  const int nblocks =
      static_cast<int>(sdp.psd_blocks.size()) + 2 * static_cast<int>(sdp.zero_blocks.size());
  os << "\" moment relaxation, order " << sdp.order << "\n";
  os << m << " = mDIM\n" << nblocks << " = nBLOCK\n";
  for (std::size_t b = 0; b < sdp.psd_blocks.size(); ++b) {
    os << sdp.psd_blocks[b].size << (b + 1 < sdp.psd_blocks.size() || !sdp.zero_blocks.empty()
                                         ? " "
                                         : "");
  }
  for (std::size_t b = 0; b < sdp.zero_blocks.size(); ++b) {
    os << sdp.zero_blocks[b].size << " " << sdp.zero_blocks[b].size
       << (b + 1 < sdp.zero_blocks.size() ? " " : "");
  }
  os << "\n";
  // Objective over y_1..y_m (the constant coefficient at y_0 only shifts the value).
  std::vector<double> c(m, 0.0);
  for (const auto& [pos, coef] : sdp.objective) {
    if (pos > 0) c[pos - 1] += coef;
  }
  for (int i = 0; i < m; ++i) os << c[i] << (i + 1 < m ? " " : "");
  os << "\n";

  // Entry lines: k b i j v means (F_k)_{b;ij} = v with the SDP
  //   min c.x  s.t.  sum_k x_k F_k - F_0 PSD.
  // Our block constraint B_const + sum_{pos>=1} y_pos B_pos >= 0 maps to
  // F_pos = B_pos and F_0 = -B_const.  Duplicate entries are accumulated.
  auto emit_block = [&os, m](const MomentBlock& blk, int block_id, double sign) {
    (void)m;
    std::map<std::tuple<int, int, int>, double> acc;  // (k, i, j) -> value
    for (const auto& e : blk.entries) {
      double v = sign * e.coef;
      if (e.pos == 0) {
        acc[{0, e.row, e.col}] -= v;  // F_0 = -B_const
      } else {
        acc[{e.pos, e.row, e.col}] += v;
      }
    }
    for (const auto& [key, v] : acc) {
      if (v == 0.0) continue;
      auto [k, i, j] = key;
      os << k << " " << block_id << " " << (i + 1) << " " << (j + 1) << " " << v << "\n";
    }
  };
  int block_id = 1;
  for (const auto& blk : sdp.psd_blocks) emit_block(blk, block_id++, 1.0);
  for (const auto& blk : sdp.zero_blocks) {
    emit_block(blk, block_id++, 1.0);
    emit_block(blk, block_id++, -1.0);
  }
}

}  // namespace polyopt
