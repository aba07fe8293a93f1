#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "polyopt/pop.hpp"

namespace polyopt {

// Bijection between the monomials of degree <= 2r in n variables and the
// positions 0..L-1 of the moment vector, in graded-lex order (position 0 is
// the constant monomial).  Because the order is graded, the first C(n+d, n)
// positions are exactly the exponents of degree <= d.
class MomentIndex {
 public:
  MomentIndex() = default;
  MomentIndex(int n, int two_r);

  int var_count() const { return n_; }
  int max_degree() const { return two_r_; }
  int length() const { return static_cast<int>(forward_.size()); }
  const Exponent& exponent(int pos) const { return forward_[pos]; }
  int position(const Exponent& e) const;  // InputError when |e| > 2r
  // Number of exponents with degree <= d (prefix length of the ordering).
  int count_up_to(int d) const;

 private:
  int n_ = 0;
  int two_r_ = 0;
  std::vector<Exponent> forward_;
  std::unordered_map<Exponent, int, ExponentHash> backward_;
  std::vector<int> prefix_;  // prefix_[d] = #exponents of degree <= d
};

// One linear-matrix-valued slot of the relaxation: entry (row, col) of the
// symmetric matrix B(y) is sum over stored entries of coef * y[pos].  Only the
// upper triangle (row <= col) is stored.
struct BlockEntry {
  int row;
  int col;
  int pos;
  double coef;
};

struct MomentBlock {
  int size = 0;
  std::string label;
  std::vector<BlockEntry> entries;
};

// Order-r moment relaxation of a Pop in SDP form:
//   min  c . y   s.t.  y_0 = 1,  B_j(y) PSD (moment + inequality localizers),
//                      B_e(y) = 0 (equality localizers).
struct MomentSdp {
  MomentIndex index;
  int order = 0;
  std::vector<std::pair<int, double>> objective;  // (position, coefficient)
  std::vector<MomentBlock> psd_blocks;
  std::vector<MomentBlock> zero_blocks;

  int length() const { return index.length(); }
  double objective_value(const Eigen::VectorXd& y) const;
  // Materializes block(y) as a dense symmetric matrix.
  Eigen::MatrixXd block_value(const MomentBlock& b, const Eigen::VectorXd& y) const;
};

// Minimum admissible relaxation order: max(ceil(deg f / 2), max_j ceil(deg g_j / 2)).
int min_order(const Pop& pop);

// Builds the order-r relaxation; r < min_order(pop) raises OrderTooLowError.
MomentSdp build_moment_sdp(const Pop& pop, int r);

// Riesz functional L_y(p) = sum_nu p_nu y_nu; deg p > 2r raises InputError.
double riesz(const MomentIndex& index, const Polynomial& p, const Eigen::VectorXd& y);

// Moment vector of the Dirac measure at x (y_nu = x^nu).
Eigen::VectorXd point_moments(const MomentIndex& index, const Eigen::VectorXd& x);

// First-order moments y_{e_i} / y_0; y_0 <= 0 raises DegenerateMomentsError.
Eigen::VectorXd extract_point(const MomentSdp& sdp, const Eigen::VectorXd& y);

// Writes the relaxation in sparse SDPA (.dat-s) format.  The normalization
// y_0 = 1 is eliminated into the constant matrices; equality blocks are
// emitted as +/- PSD pairs.
void write_sdpa(const MomentSdp& sdp, std::ostream& os);

}  // namespace polyopt
