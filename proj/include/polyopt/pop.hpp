#pragma once

#include <vector>

#include "polyopt/poly.hpp"

namespace polyopt {

enum class ConstraintKind { Equality, Inequality };

// Polynomial optimization problem
//   min f(x)  s.t.  g_i(x) = 0 (i in E),  g_i(x) >= 0 (i in I),
// with E and I a disjoint partition of the constraint index set.
struct Pop {
  int n = 0;
  Polynomial objective;
  std::vector<Polynomial> constraints;
  std::vector<ConstraintKind> kinds;

  Pop() = default;
  Pop(int n_vars, Polynomial f, std::vector<Polynomial> g, std::vector<ConstraintKind> k);

  int constraint_count() const { return static_cast<int>(constraints.size()); }
  std::vector<int> equality_indices() const;
  std::vector<int> inequality_indices() const;
  bool is_equality(int i) const { return kinds[i] == ConstraintKind::Equality; }
};

// Sorted, duplicate-free subset of the inequality indices of a Pop.
class ActiveSet {
 public:
  ActiveSet() = default;
  ActiveSet(const Pop& pop, std::vector<int> indices);

  const std::vector<int>& indices() const { return idx_; }
  int size() const { return static_cast<int>(idx_.size()); }
  bool contains(int i) const;
  bool operator==(const ActiveSet& o) const { return idx_ == o.idx_; }

 private:
  std::vector<int> idx_;
};

struct KktPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd lambda;  // over all constraints, in constraint-index order
};

// grad f(x) - sum_i lambda_i grad g_i(x); lambda runs over all constraints.
Eigen::VectorXd lagrangian_grad(const Pop& pop, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& lambda);

// Scalar KKT residual
//   theta(x, lambda) = ||grad_x L|| + ||g_E(x)|| + ||max(0, -g_I(x))||
//                      + |lambda_I . g_I(x)| + ||max(0, -lambda_I)||.
double kkt_residual(const Pop& pop, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

// Least-squares multiplier for the working set E u A:
//   lambda = argmin ||grad f(x) - J^T lambda||,  J rows = grad g_i(x), i in E u A.
// Entries returned in E-then-A order.  Rank-deficient J (relative tolerance
// 1e-10) raises DegenerateConstraintsError.
Eigen::VectorXd fletcher_multiplier(const Pop& pop, const ActiveSet& active,
                                    const Eigen::VectorXd& x);

// Square KKT system in (x, lambda_{E u A}):
//   F(x, lambda) = ( grad f(x) - sum_{i in E u A} lambda_i grad g_i(x),
//                    g_i(x) for i in E u A ).
// Variables are ordered x_1..x_n then lambda in E-then-A order.  Declared
// component degrees follow the bookkeeping max(deg f - 1, deg g_i) for the
// gradient rows and deg g_i for the constraint rows.
PolySystem reduce(const Pop& pop, const ActiveSet& active);

// Ordered working-set indices (E ascending, then A ascending) used by
// fletcher_multiplier and reduce.
std::vector<int> working_set(const Pop& pop, const ActiveSet& active);

// max_i of |g_i(x)| over E and max(0, -g_i(x)) over I; 0 when feasible.
double violation(const Pop& pop, const Eigen::VectorXd& x);

}  // namespace polyopt
