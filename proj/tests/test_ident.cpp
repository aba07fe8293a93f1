#include <cmath>

#include "doctest.h"
#include "polyopt/errors.hpp"
#include "polyopt/ident.hpp"
#include "support.hpp"

using polyopt::ConstraintKind;
using polyopt::Polynomial;
using polyopt::Pop;

namespace {

// min x  s.t.  x >= 0.  theta(x, lambda) = |1 - lambda| + max(0, -x)
// + |lambda x| + max(0, -lambda) has a closed-form minimum.
Pop half_line() {
  Polynomial f(1), g(1);
  f.add_term({1}, 1.0);
  g.add_term({1}, 1.0);
  return Pop(1, f, {g}, {ConstraintKind::Inequality});
}

// min -x  s.t.  x = 0.  The equality multiplier is free and the minimizer
// is lambda = -1.
Pop pinned_line() {
  Polynomial f(1), g(1);
  f.add_term({1}, -1.0);
  g.add_term({1}, 1.0);
  return Pop(1, f, {g}, {ConstraintKind::Equality});
}

}  // namespace

TEST_CASE("omega matches the closed form on the half line") {
  const Pop pop = half_line();
  Eigen::VectorXd x(1);

  // Interior: |1 - lambda| + lambda/2 decreases until lambda = 1, so
  // omega = 1/2 with the complementarity term paying |1 * 0.5|.
  x << 0.5;
  polyopt::OmegaResult r = polyopt::omega(pop, x);
  CHECK(r.omega == doctest::Approx(0.5).epsilon(1e-8));
  REQUIRE(r.lambda.size() == 1);
  CHECK(r.lambda(0) == doctest::Approx(1.0).epsilon(1e-6));

  // At the solution both terms vanish.
  x << 0.0;
  r = polyopt::omega(pop, x);
  CHECK(r.omega < 1e-10);
  CHECK(r.lambda(0) == doctest::Approx(1.0).epsilon(1e-6));

  // Far out the complementarity price dominates and lambda = 0 wins.
  x << 2.0;
  r = polyopt::omega(pop, x);
  CHECK(r.omega == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(r.lambda(0)) < 1e-6);
}

TEST_CASE("equality multipliers may go negative") {
  const Pop pop = pinned_line();
  Eigen::VectorXd x(1);
  x << 0.3;
  const polyopt::OmegaResult r = polyopt::omega(pop, x);
  // Stationarity -1 - lambda = 0 forces lambda = -1; only |g| = 0.3 remains.
  CHECK(r.omega == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(r.lambda(0) == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("omega is the value of theta at its own multiplier") {
  const Pop pop = testutil::toy_pop();
  testutil::Rng rng(47);
  for (int trial = 0; trial < 15; ++trial) {
    Eigen::VectorXd x(2);
    x << rng.uniform(-0.5, 1.2), rng.uniform(-0.5, 1.2);
    const polyopt::OmegaResult r = polyopt::omega(pop, x);
    CHECK(r.omega >= 0.0);
    // Self-consistency: plugging the reported multiplier into theta
    // reproduces the reported value.
    CHECK(polyopt::kkt_residual(pop, x, r.lambda) ==
          doctest::Approx(r.omega).epsilon(1e-7));
    // Minimality: no sampled admissible multiplier does better.
    for (int s = 0; s < 10; ++s) {
      Eigen::VectorXd lam(3);
      lam << rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0);
      CHECK(r.omega <= polyopt::kkt_residual(pop, x, lam) + 1e-7);
    }
  }
}

TEST_CASE("omega scales linearly with the objective, its diagnostic does not") {
  const Pop pop = testutil::toy_pop();
  Pop scaled = pop;
  scaled.objective *= 1000.0;
  Eigen::VectorXd x(2);
  x << 0.6, 0.4;  // strictly feasible, away from any KKT point
  const polyopt::OmegaResult base = polyopt::omega(pop, x);
  const polyopt::OmegaResult big = polyopt::omega(scaled, x);
  CHECK(big.omega == doctest::Approx(1000.0 * base.omega).epsilon(1e-4));

  const polyopt::IdentReport ra = polyopt::active_set(pop, x);
  const polyopt::IdentReport rb = polyopt::active_set(scaled, x);
  CHECK(ra.omega_scaled == doctest::Approx(rb.omega_scaled).epsilon(1e-4));
  // ... which is what makes the activity rule invariant under f -> c f.
  CHECK(ra.threshold == doctest::Approx(rb.threshold).epsilon(1e-4));
  CHECK(ra.active == rb.active);
}

TEST_CASE("activity threshold follows -1/log(omega)") {
  const Pop pop = half_line();
  Eigen::VectorXd x(1);
  x << 0.5;
  const polyopt::IdentReport rep = polyopt::active_set(pop, x);
  CHECK(rep.omega == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(rep.threshold == doctest::Approx(-1.0 / std::log(0.5)).epsilon(1e-6));
  // g(0.5) = 0.5 <= 1.44..., so the lone constraint is flagged active.
  CHECK(rep.active == std::vector<int>{0});

  // omega >= 0.99 clamps, giving the ceiling threshold -1/log(0.99).
  x << 2.0;
  const polyopt::IdentReport far = polyopt::active_set(pop, x);
  CHECK(far.threshold == doctest::Approx(-1.0 / std::log(0.99)).epsilon(1e-6));
}

TEST_CASE("identification at the benchmark optimum finds the binding cubic") {
  const Pop pop = testutil::toy_pop();
  const polyopt::IdentReport rep = polyopt::active_set(pop, testutil::toy_global());
  CHECK(rep.omega < 1e-8);
  CHECK(rep.active == std::vector<int>{0});
  REQUIRE(rep.lambda.size() == 3);
  CHECK(rep.lambda(0) == doctest::Approx(testutil::toy_global_multiplier()).epsilon(1e-6));
  CHECK(std::abs(rep.lambda(1)) < 1e-6);
  CHECK(std::abs(rep.lambda(2)) < 1e-6);

  // Identification is stable under a modest perturbation of the point.
  Eigen::VectorXd x = testutil::toy_global();
  x(0) += 0.03;
  x(1) += 0.03;
  CHECK(polyopt::active_set(pop, x).active == std::vector<int>{0});
}

TEST_CASE("far from any KKT point everything within the threshold is active") {
  const Pop pop = testutil::toy_pop();
  Eigen::VectorXd x(2);
  x << 0.017, 0.437;  // barycenter-like point deep inside the feasible set
  const polyopt::IdentReport rep = polyopt::active_set(pop, x);
  CHECK(rep.omega > 0.99);  // raw residual is O(1) here
  const double clamped = std::clamp(rep.omega_scaled, 1e-300, 0.99);
  CHECK(rep.threshold == doctest::Approx(-1.0 / std::log(clamped)).epsilon(1e-10));
  // The threshold dwarfs every constraint value, so all of them are flagged.
  CHECK(rep.threshold > 1.5);
  CHECK(rep.active == std::vector<int>{0, 1, 2});
}

TEST_CASE("dimension mismatches are rejected") {
  const Pop pop = testutil::toy_pop();
  Eigen::VectorXd bad(3);
  bad.setZero();
  CHECK_THROWS_AS(polyopt::omega(pop, bad), polyopt::InputError);
}
