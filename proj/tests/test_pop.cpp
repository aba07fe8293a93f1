#include <cmath>

#include "doctest.h"
#include "polyopt/errors.hpp"
#include "polyopt/pop.hpp"
#include "support.hpp"

using polyopt::ActiveSet;
using polyopt::ConstraintKind;
using polyopt::Polynomial;
using polyopt::Pop;

namespace {

// min 2 x1 + 3 x2  s.t.  x1 >= 0, x2 = 0, x1 + x2 >= 0.  Gradients are
// constant, so multipliers and KKT terms are hand-checkable.
Pop linear_pop() {
  Polynomial f(2), g1(2), g2(2), g3(2);
  f.add_term({1, 0}, 2.0);
  f.add_term({0, 1}, 3.0);
  g1.add_term({1, 0}, 1.0);
  g2.add_term({0, 1}, 1.0);
  g3.add_term({1, 0}, 1.0);
  g3.add_term({0, 1}, 1.0);
  return Pop(2, f, {g1, g2, g3},
             {ConstraintKind::Inequality, ConstraintKind::Equality,
              ConstraintKind::Inequality});
}

}  // namespace

TEST_CASE("constraint kinds partition into equality and inequality indices") {
  const Pop pop = linear_pop();
  CHECK(pop.constraint_count() == 3);
  CHECK(pop.equality_indices() == std::vector<int>{1});
  CHECK(pop.inequality_indices() == std::vector<int>{0, 2});
  CHECK(pop.is_equality(1));
  CHECK_FALSE(pop.is_equality(0));

  // Construction rejects inconsistent shapes.
  Polynomial f3(3);
  CHECK_THROWS_AS(Pop(2, f3, {}, {}), polyopt::InputError);
  CHECK_THROWS_AS(Pop(2, Polynomial(2), {Polynomial(2)}, {}), polyopt::InputError);
}

TEST_CASE("active sets sort, validate, and reject equalities") {
  const Pop pop = linear_pop();
  const ActiveSet a(pop, {2, 0});
  CHECK(a.indices() == std::vector<int>{0, 2});
  CHECK(a.size() == 2);
  CHECK(a.contains(2));
  CHECK_FALSE(a.contains(1));

  CHECK_THROWS_AS(ActiveSet(pop, {0, 0}), polyopt::InputError);  // duplicate
  CHECK_THROWS_AS(ActiveSet(pop, {3}), polyopt::InputError);     // out of range
  CHECK_THROWS_AS(ActiveSet(pop, {1}), polyopt::InputError);     // equality index
}

TEST_CASE("working set lists equalities first, then active inequalities") {
  const Pop pop = linear_pop();
  CHECK(polyopt::working_set(pop, ActiveSet(pop, {2, 0})) ==
        std::vector<int>{1, 0, 2});
  CHECK(polyopt::working_set(pop, ActiveSet(pop, {})) == std::vector<int>{1});
}

TEST_CASE("lagrangian gradient subtracts weighted constraint gradients") {
  const Pop pop = linear_pop();
  Eigen::VectorXd x(2), lambda(3);
  x << 0.4, -0.2;
  lambda << 1.0, 2.0, 0.5;
  // grad f = (2,3); grad g = (1,0), (0,1), (1,1).
  const Eigen::VectorXd g = polyopt::lagrangian_grad(pop, x, lambda);
  CHECK(g(0) == doctest::Approx(2.0 - 1.0 - 0.5).epsilon(1e-15));
  CHECK(g(1) == doctest::Approx(3.0 - 2.0 - 0.5).epsilon(1e-15));

  Eigen::VectorXd short_lambda(2);
  CHECK_THROWS_AS(polyopt::lagrangian_grad(pop, x, short_lambda), polyopt::InputError);
}

TEST_CASE("kkt residual sums its five terms") {
  const Pop pop = linear_pop();

  // At x = (1, 0) with lambda = (2, 3, 0): stationarity holds exactly
  // (2,3) - 2(1,0) - 3(0,1) = 0, x is feasible, complementarity
  // |lambda_I . g_I| = |2*1 + 0| = 2 is the only nonzero term.
  Eigen::VectorXd x(2), lambda(3);
  x << 1.0, 0.0;
  lambda << 2.0, 3.0, 0.0;
  CHECK(polyopt::kkt_residual(pop, x, lambda) == doctest::Approx(2.0).epsilon(1e-14));

  // Same multipliers at x = (0, 0): every residual term vanishes.
  x << 0.0, 0.0;
  CHECK(polyopt::kkt_residual(pop, x, lambda) == doctest::Approx(0.0).epsilon(1e-14));

  // Equality violation enters through |g_E|.
  x << 0.0, 0.7;
  lambda << 2.0, 3.0, 0.0;
  // stationarity still 0, |g_E| = 0.7, inequality g3 = 0.7 feasible,
  // complementarity |2*0 + 0*0.7| = 0.
  CHECK(polyopt::kkt_residual(pop, x, lambda) == doctest::Approx(0.7).epsilon(1e-14));

  // Negative inequality multipliers are penalized.
  x << 0.0, 0.0;
  lambda << 2.0, 3.0, -0.25;
  // stationarity picks up +0.25 in each coordinate: ||(0.25, 0.25)||.
  const double expect = std::sqrt(2.0) * 0.25 + 0.25;
  CHECK(polyopt::kkt_residual(pop, x, lambda) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("kkt residual vanishes at the benchmark optimum") {
  const Pop pop = testutil::toy_pop();
  const Eigen::VectorXd x = testutil::toy_global();
  Eigen::VectorXd lambda(3);
  lambda << testutil::toy_global_multiplier(), 0.0, 0.0;
  CHECK(polyopt::kkt_residual(pop, x, lambda) < 1e-12);
  CHECK(polyopt::lagrangian_grad(pop, x, lambda).norm() < 1e-12);
}

TEST_CASE("violation is the worst constraint breach") {
  const Pop pop = linear_pop();
  Eigen::VectorXd x(2);
  x << -0.5, 0.2;
  // |g_E| = 0.2, inequality breaches: max(0, 0.5) and max(0, 0.3).
  CHECK(polyopt::violation(pop, x) == doctest::Approx(0.5).epsilon(1e-15));
  x << 1.0, 0.0;
  CHECK(polyopt::violation(pop, x) == doctest::Approx(0.0));

  const Pop toy = testutil::toy_pop();
  CHECK(polyopt::violation(toy, testutil::toy_global()) < 1e-12);
}

TEST_CASE("least-squares multipliers recover exact decompositions") {
  const Pop pop = linear_pop();
  Eigen::VectorXd x(2);
  x << 0.3, 0.0;
  // Working set {g2 (equality), g1}: J^T = [(0,1),(1,0)] columns; grad f =
  // (2,3) decomposes exactly as 3 grad g2 + 2 grad g1.
  const Eigen::VectorXd lam = polyopt::fletcher_multiplier(pop, ActiveSet(pop, {0}), x);
  REQUIRE(lam.size() == 2);
  CHECK(lam(0) == doctest::Approx(3.0).epsilon(1e-12));  // equality first
  CHECK(lam(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("multiplier at the benchmark optimum matches the closed form") {
  const Pop pop = testutil::toy_pop();
  const Eigen::VectorXd x = testutil::toy_global();
  const Eigen::VectorXd lam = polyopt::fletcher_multiplier(pop, ActiveSet(pop, {0}), x);
  REQUIRE(lam.size() == 1);
  CHECK(lam(0) == doctest::Approx(testutil::toy_global_multiplier()).epsilon(1e-10));

  // Independent least-squares oracle: lambda = (J grad f) / (J J^T) for the
  // single row J = grad g1(x).
  const Eigen::VectorXd row = pop.constraints[0].gradient(x);
  const double oracle = row.dot(pop.objective.gradient(x)) / row.squaredNorm();
  CHECK(lam(0) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("rank-deficient working sets are rejected") {
  // g1 = x1 and g2 = 2 x1 have parallel gradients everywhere.
  Polynomial f(2), g1(2), g2(2);
  f.add_term({1, 0}, 1.0);
  g1.add_term({1, 0}, 1.0);
  g2.add_term({1, 0}, 2.0);
  const Pop pop(2, f, {g1, g2},
                {ConstraintKind::Inequality, ConstraintKind::Inequality});
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(polyopt::fletcher_multiplier(pop, ActiveSet(pop, {0, 1}), x),
                  polyopt::DegenerateConstraintsError);
}

TEST_CASE("reduced KKT system stacks stationarity over active constraints") {
  const Pop pop = testutil::toy_pop();
  const ActiveSet active(pop, {0});
  const polyopt::PolySystem F = polyopt::reduce(pop, active);

  // Two stationarity rows plus one constraint row, in (x1, x2, lambda).
  CHECK(F.size() == 3);
  CHECK(F.input_dim() == 3);
  // Declared degrees: max(deg f - 1, deg g1) = 3 for gradient rows, deg g1 = 3
  // for the constraint row.
  CHECK(F.degrees() == std::vector<int>{3, 3, 3});
  CHECK(F.max_degree() == 3);

  Eigen::VectorXd z(3);
  z << testutil::toy_global()(0), testutil::toy_global()(1),
      testutil::toy_global_multiplier();
  CHECK(F.eval(z).norm() < 1e-12);

  // Away from the optimum the rows match the defining formulas.
  z << 0.5, 0.25, 2.0;
  const Eigen::VectorXd v = F.eval(z);
  CHECK(v(0) == doctest::Approx(-5.0 * 0.5 + 3.0 * 0.25 - 3.0 - 2.0 * (-1.5 * 0.25))
                    .epsilon(1e-14));
  CHECK(v(1) == doctest::Approx(3.0 * 0.5 - 5.0 * 0.25 + 5.0 - 2.0).epsilon(1e-14));
  CHECK(v(2) == doctest::Approx(-0.5 * 0.125 + 0.25).epsilon(1e-14));
}

TEST_CASE("reduced system with no active constraints is plain stationarity") {
  const Pop pop = testutil::toy_pop();
  const polyopt::PolySystem F = polyopt::reduce(pop, ActiveSet(pop, {}));
  CHECK(F.size() == 2);
  CHECK(F.input_dim() == 2);
  Eigen::VectorXd x(2);
  x << 0.1, -0.2;
  const Eigen::VectorXd v = F.eval(x);
  const Eigen::VectorXd grad = pop.objective.gradient(x);
  CHECK(v(0) == doctest::Approx(grad(0)).epsilon(1e-15));
  CHECK(v(1) == doctest::Approx(grad(1)).epsilon(1e-15));
}

TEST_CASE("equalities always participate in the reduced system") {
  const Pop pop = linear_pop();
  const polyopt::PolySystem F = polyopt::reduce(pop, ActiveSet(pop, {0}));
  // Variables: x1, x2, lambda_eq, lambda_1; rows: 2 stationarity + g2 + g1.
  CHECK(F.size() == 4);
  CHECK(F.input_dim() == 4);
  Eigen::VectorXd z(4);
  z << 0.0, 0.0, 3.0, 2.0;
  CHECK(F.eval(z).norm() < 1e-14);
}
