#include <cmath>

#include "doctest.h"
#include "polyopt/errors.hpp"
#include "polyopt/poly.hpp"
#include "support.hpp"

using polyopt::Exponent;
using polyopt::Polynomial;
using polyopt::PolySystem;

TEST_CASE("exponents order by total degree first, then lexicographically") {
  const Exponent one({0, 0}), x1({1, 0}), x2({0, 1}), x1sq({2, 0}), x1x2({1, 1}),
      x2sq({0, 2});
  CHECK(one < x1);
  CHECK(x1 < x2);        // within a degree, x1-heavy monomials come first
  CHECK(x2 < x1sq);      // degree 1 before degree 2
  CHECK(x1sq < x1x2);
  CHECK(x1x2 < x2sq);
  CHECK(x1sq.degree() == 2);
  CHECK(x1.plus(x2) == x1x2);
  CHECK_THROWS_AS(Exponent({-1, 0}), polyopt::InputError);
  CHECK_THROWS_AS(x1.plus(Exponent({1, 0, 0})), polyopt::InputError);
}

TEST_CASE("coefficients accumulate and cancellations erase terms") {
  Polynomial p(2);
  p.add_term({1, 0}, 2.0);
  p.add_term({1, 0}, 3.0);
  CHECK(p.coefficient(Exponent({1, 0})) == doctest::Approx(5.0));
  CHECK(p.term_count() == 1);

  p.add_term({1, 0}, -5.0);
  CHECK(p.is_zero());
  CHECK(p.degree() == 0);  // zero polynomial reports degree 0

  Polynomial tiny(2);
  tiny.add_term({3, 3}, 1e-305);  // below the storage threshold
  CHECK(tiny.is_zero());
}

TEST_CASE("evaluation matches a hand-expanded computation") {
  const Polynomial f = testutil::toy_objective();
  Eigen::VectorXd x(2);
  x << 0.83271, 0.28870;
  const double direct = -2.5 * x(0) * x(0) + 3.0 * x(0) * x(1) - 2.5 * x(1) * x(1) -
                        3.0 * x(0) + 5.0 * x(1) - 2.5;
  CHECK(f.eval(x) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(f.eval(x) == doctest::Approx(-4.77529).epsilon(1e-4));

  Eigen::VectorXd bad(3);
  CHECK_THROWS_AS(f.eval(bad), polyopt::InputError);
}

TEST_CASE("derivatives agree with central finite differences") {
  const Polynomial f = testutil::toy_objective();
  const Polynomial g1 = testutil::toy_constraints()[0];
  testutil::Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd x(2);
    x << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    const double h = 1e-6;
    for (const Polynomial* p : {&f, &g1}) {
      const Eigen::VectorXd grad = p->gradient(x);
      for (int i = 0; i < 2; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fd = (p->eval(xp) - p->eval(xm)) / (2.0 * h);
        CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
  // Exact check on a simple component: d/dx2 of the toy objective.
  const Polynomial d2 = f.derivative(1);
  Eigen::VectorXd x(2);
  x << 1.25, -0.5;
  CHECK(d2.eval(x) == doctest::Approx(3.0 * x(0) - 5.0 * x(1) + 5.0).epsilon(1e-14));
}

TEST_CASE("products expand correctly and respect evaluation") {
  Polynomial s(2);  // x1 + x2
  s.add_term({1, 0}, 1.0);
  s.add_term({0, 1}, 1.0);
  const Polynomial sq = s * s;
  CHECK(sq.degree() == 2);
  CHECK(sq.coefficient(Exponent({2, 0})) == doctest::Approx(1.0));
  CHECK(sq.coefficient(Exponent({1, 1})) == doctest::Approx(2.0));
  CHECK(sq.coefficient(Exponent({0, 2})) == doctest::Approx(1.0));

  testutil::Rng rng(11);
  const Polynomial f = testutil::toy_objective();
  const Polynomial g = testutil::toy_constraints()[2];
  const Polynomial prod = f * g;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(2);
    x << rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5);
    CHECK(prod.eval(x) == doctest::Approx(f.eval(x) * g.eval(x)).epsilon(1e-12));
  }
}

TEST_CASE("weighted coefficient norm reproduces hand-computed values") {
  Polynomial x1sq(2);
  x1sq.add_term({2, 0}, 1.0);
  // nu = (2,0), d = 2: weight 2! 0! / 2! = 1.
  CHECK(x1sq.bw_norm(2) == doctest::Approx(1.0).epsilon(1e-15));

  Polynomial x1x2(2);
  x1x2.add_term({1, 1}, 1.0);
  // nu = (1,1), d = 2: weight 1! 1! 0! / 2! = 1/2.
  CHECK(x1x2.bw_norm(2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  Polynomial lin(2);
  lin.add_term({1, 0}, 1.0);
  // nu = (1,0), d = 3: weight 1! (3-1)! / 3! = 1/3.
  CHECK(lin.bw_norm(3) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));

  Polynomial c(2);
  c.add_term({0, 0}, -4.0);
  // Constant at any declared degree d: weight d!/d! = 1.
  CHECK(c.bw_norm(5) == doctest::Approx(4.0).epsilon(1e-15));

  CHECK_THROWS_AS(x1sq.bw_norm(1), polyopt::InputError);   // below actual degree
  CHECK_THROWS_AS(x1sq.bw_norm(40), polyopt::InputError);  // factorial range
}

TEST_CASE("projective norm sqrt(1 + |x|^2)") {
  Eigen::VectorXd empty(0);
  CHECK(polyopt::one_norm(empty) == doctest::Approx(1.0));
  Eigen::VectorXd a(1);
  a << std::sqrt(2.0);
  CHECK(polyopt::one_norm(a) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  Eigen::VectorXd b(2);
  b << 3.0, 4.0;
  CHECK(polyopt::one_norm(b) == doctest::Approx(std::sqrt(26.0)).epsilon(1e-15));
}

TEST_CASE("polynomial systems evaluate components and Jacobians") {
  // F = (x1^2 - 1, x1 x2) with default declared degrees (2, 2).
  Polynomial f1(2), f2(2);
  f1.add_term({2, 0}, 1.0);
  f1.add_term({0, 0}, -1.0);
  f2.add_term({1, 1}, 1.0);
  const PolySystem F({f1, f2});
  CHECK(F.size() == 2);
  CHECK(F.input_dim() == 2);
  CHECK(F.degrees() == std::vector<int>{2, 2});
  CHECK(F.max_degree() == 2);

  Eigen::VectorXd z(2);
  z << 1.5, -2.0;
  const Eigen::VectorXd v = F.eval(z);
  CHECK(v(0) == doctest::Approx(1.25));
  CHECK(v(1) == doctest::Approx(-3.0));

  const Eigen::MatrixXd J = F.jacobian(z);
  CHECK(J(0, 0) == doctest::Approx(3.0));   // 2 x1
  CHECK(J(0, 1) == doctest::Approx(0.0));
  CHECK(J(1, 0) == doctest::Approx(-2.0));  // x2
  CHECK(J(1, 1) == doctest::Approx(1.5));   // x1

  // System norm aggregates component norms: sqrt(bw(f1)^2 + bw(f2)^2).
  const double expected =
      std::sqrt(f1.bw_norm(2) * f1.bw_norm(2) + f2.bw_norm(2) * f2.bw_norm(2));
  CHECK(F.bw_norm() == doctest::Approx(expected).epsilon(1e-15));

  // Declared degrees may exceed, but never undercut, the component degrees.
  CHECK_NOTHROW(PolySystem({f1, f2}, {3, 2}));
  CHECK_THROWS_AS(PolySystem({f1, f2}, {1, 2}), polyopt::InputError);
  CHECK_THROWS_AS(PolySystem(std::vector<Polynomial>{}), polyopt::InputError);
}

TEST_CASE("jacobians agree with central finite differences") {
  const auto g = testutil::toy_constraints();
  const PolySystem F({g[0], g[1], g[2]});
  testutil::Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd z(2);
    z << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    const Eigen::MatrixXd J = F.jacobian(z);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd zp = z, zm = z;
      zp(j) += h;
      zm(j) -= h;
      const Eigen::VectorXd col = (F.eval(zp) - F.eval(zm)) / (2.0 * h);
      for (int i = 0; i < 3; ++i) {
        CHECK(J(i, j) == doctest::Approx(col(i)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("embedding shifts variables into a larger space") {
  const Polynomial g1 = testutil::toy_constraints()[0];
  const Polynomial lifted = g1.embedded(4, 1);  // x1 -> y2, x2 -> y3
  CHECK(lifted.var_count() == 4);
  Eigen::VectorXd y(4);
  y << 9.0, 0.7, -0.3, 9.0;  // outer coordinates must be ignored
  Eigen::VectorXd x(2);
  x << 0.7, -0.3;
  CHECK(lifted.eval(y) == doctest::Approx(g1.eval(x)).epsilon(1e-14));
  CHECK_THROWS_AS(g1.embedded(2, 1), polyopt::InputError);
}
