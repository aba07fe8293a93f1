#include "polyopt/pop.hpp"

#include <algorithm>
#include <cmath>

#include "polyopt/errors.hpp"

namespace polyopt {

Pop::Pop(int n_vars, Polynomial f, std::vector<Polynomial> g, std::vector<ConstraintKind> k)
    : n(n_vars), objective(std::move(f)), constraints(std::move(g)), kinds(std::move(k)) {
  if (objective.var_count() != n) throw InputError("objective variable count mismatch");
  if (constraints.size() != kinds.size()) throw InputError("constraint/kind size mismatch");
  for (const auto& c : constraints) {
    if (c.var_count() != n) throw InputError("constraint variable count mismatch");
  }
}

std::vector<int> Pop::equality_indices() const {
  std::vector<int> out;
  for (int i = 0; i < constraint_count(); ++i) {
    if (kinds[i] == ConstraintKind::Equality) out.push_back(i);
  }
  return out;
}

std::vector<int> Pop::inequality_indices() const {
  std::vector<int> out;
  for (int i = 0; i < constraint_count(); ++i) {
    if (kinds[i] == ConstraintKind::Inequality) out.push_back(i);
  }
  return out;
}

ActiveSet::ActiveSet(const Pop& pop, std::vector<int> indices) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end()) {
    throw InputError("duplicate index in active set");
  }
  for (int i : idx_) {
    if (i < 0 || i >= pop.constraint_count()) throw InputError("active index out of range");
    if (pop.is_equality(i)) throw InputError("active set may only contain inequality indices");
  }
}

bool ActiveSet::contains(int i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

std::vector<int> working_set(const Pop& pop, const ActiveSet& active) {
  std::vector<int> ws = pop.equality_indices();
  ws.insert(ws.end(), active.indices().begin(), active.indices().end());
  return ws;
}

Eigen::VectorXd lagrangian_grad(const Pop& pop, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& lambda) {
  if (x.size() != pop.n) throw InputError("point dimension mismatch");
  if (lambda.size() != pop.constraint_count()) throw InputError("multiplier length mismatch");
  Eigen::VectorXd g = pop.objective.gradient(x);
  for (int i = 0; i < pop.constraint_count(); ++i) {
    if (lambda[i] != 0.0) g -= lambda[i] * pop.constraints[i].gradient(x);
  }
  return g;
}

double kkt_residual(const Pop& pop, const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
  double stationarity = lagrangian_grad(pop, x, lambda).norm();
  double eq = 0.0, ineq = 0.0, compl_sum = 0.0, sign = 0.0;
  for (int i = 0; i < pop.constraint_count(); ++i) {
    double gi = pop.constraints[i].eval(x);
    if (pop.is_equality(i)) {
      eq += gi * gi;
    } else {
      double viol = std::max(0.0, -gi);
      ineq += viol * viol;
      compl_sum += lambda[i] * gi;
      double neg = std::max(0.0, -lambda[i]);
      sign += neg * neg;
    }
  }
  return stationarity + std::sqrt(eq) + std::sqrt(ineq) + std::abs(compl_sum) + std::sqrt(sign);
}

Eigen::VectorXd fletcher_multiplier(const Pop& pop, const ActiveSet& active,
                                    const Eigen::VectorXd& x) {
  std::vector<int> ws = working_set(pop, active);
  const int k = static_cast<int>(ws.size());
  if (k == 0) return Eigen::VectorXd(0);
  Eigen::MatrixXd Jt(pop.n, k);  // columns are active constraint gradients
  for (int c = 0; c < k; ++c) Jt.col(c) = pop.constraints[ws[c]].gradient(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Jt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smax <= 0.0 || smin < 1e-10 * smax) {
    throw DegenerateConstraintsError("active constraint gradients are rank deficient");
  }
  return svd.solve(pop.objective.gradient(x));
}

PolySystem reduce(const Pop& pop, const ActiveSet& active) {
  std::vector<int> ws = working_set(pop, active);
  const int k = static_cast<int>(ws.size());
  const int m = pop.n + k;

  // Gradient rows: embed df/dx_j, then subtract lambda_i * dg_i/dx_j with the
  // multiplier for ws[c] living at variable n + c.
  std::vector<Polynomial> comps;
  comps.reserve(m);
  int grad_deg = std::max(1, pop.objective.degree() - 1);
  for (int c = 0; c < k; ++c) grad_deg = std::max(grad_deg, pop.constraints[ws[c]].degree());
  for (int j = 0; j < pop.n; ++j) {
    Polynomial row = pop.objective.derivative(j).embedded(m);
    for (int c = 0; c < k; ++c) {
      Polynomial lam = Polynomial::variable(m, pop.n + c);
      row -= lam * pop.constraints[ws[c]].derivative(j).embedded(m);
    }
    comps.push_back(std::move(row));
  }
  std::vector<int> degrees(pop.n, grad_deg);
  for (int c = 0; c < k; ++c) {
    comps.push_back(pop.constraints[ws[c]].embedded(m));
    degrees.push_back(std::max(1, pop.constraints[ws[c]].degree()));
  }
  return PolySystem(std::move(comps), std::move(degrees));
}

double violation(const Pop& pop, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (int i = 0; i < pop.constraint_count(); ++i) {
    double gi = pop.constraints[i].eval(x);
    double v = pop.is_equality(i) ? std::abs(gi) : std::max(0.0, -gi);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace polyopt
