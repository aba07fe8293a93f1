#pragma once

// Shared fixtures and independent oracles for the test suite.  Everything here
// is deliberately written against plain formulas (bisection, classical Jacobi
// sweeps, hand-expanded polynomials) so that library results are checked by
// code that shares no implementation with the library.

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyopt/pop.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// Deterministic RNG (xorshift64*), independent of <random> distributions so
// sampled sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545f4914f6cdd1dull;
  }

  // Uniform in [a, b).
  double uniform(double a, double b) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }

  // Uniform integer in {lo, ..., hi}.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t s_;
};

// ---------------------------------------------------------------------------
// Two-variable benchmark problem used across the suite:
//   min  -2.5 x1^2 + 3 x1 x2 - 2.5 x2^2 - 3 x1 + 5 x2 - 2.5
//   s.t. g1 = -0.5 x1^3 + x2            >= 0
//        g2 = -0.05 x1^2 - x2 + 1.8     >= 0
//        g3 = -0.05 x2^2 + x1 + 0.1 x2 + 0.35 >= 0
inline polyopt::Polynomial toy_objective() {
  polyopt::Polynomial f(2);
  f.add_term({2, 0}, -2.5);
  f.add_term({1, 1}, 3.0);
  f.add_term({0, 2}, -2.5);
  f.add_term({1, 0}, -3.0);
  f.add_term({0, 1}, 5.0);
  f.add_term({0, 0}, -2.5);
  return f;
}

inline std::vector<polyopt::Polynomial> toy_constraints() {
  polyopt::Polynomial g1(2), g2(2), g3(2);
  g1.add_term({3, 0}, -0.5);
  g1.add_term({0, 1}, 1.0);
  g2.add_term({2, 0}, -0.05);
  g2.add_term({0, 1}, -1.0);
  g2.add_term({0, 0}, 1.8);
  g3.add_term({0, 2}, -0.05);
  g3.add_term({1, 0}, 1.0);
  g3.add_term({0, 1}, 0.1);
  g3.add_term({0, 0}, 0.35);
  return {g1, g2, g3};
}

inline polyopt::Pop toy_pop() {
  using polyopt::ConstraintKind;
  return polyopt::Pop(2, toy_objective(), toy_constraints(),
                      {ConstraintKind::Inequality, ConstraintKind::Inequality,
                       ConstraintKind::Inequality});
}

// On the surface g1 = 0 (x2 = 0.5 x1^3) the stationarity system of the toy
// problem collapses to a single quintic in t = x1:
//   q(t) = -3.75 t^5 + 6 t^3 + 7.5 t^2 - 5 t - 3 = 0,
// obtained by eliminating lambda = 3 x1 - 5 x2 + 5 from
//   -5 x1 + 3 x2 - 3 + 1.5 lambda x1^2 = 0.
inline double toy_quintic(double t) {
  return ((((-3.75 * t + 0.0) * t + 6.0) * t + 7.5) * t - 5.0) * t - 3.0;
}

// Bisection to ~1e-15; the bracket must change sign.
inline double bisect(double (*fn)(double), double lo, double hi) {
  double flo = fn(lo);
  if (flo == 0.0) return lo;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Global minimizer of the toy problem (on g1 = 0, root of q near 0.83).
inline Eigen::VectorXd toy_global() {
  const double t = bisect(&toy_quintic, 0.8, 0.9);
  Eigen::VectorXd x(2);
  x << t, 0.5 * t * t * t;
  return x;
}

// Multiplier of g1 at the global minimizer.
inline double toy_global_multiplier() {
  const Eigen::VectorXd x = toy_global();
  return 3.0 * x(0) - 5.0 * x(1) + 5.0;
}

// Second (non-global) KKT point on g1 = 0: root of q near 1.44, with a
// strictly positive multiplier and both other constraints inactive.
inline Eigen::VectorXd toy_spurious() {
  const double t = bisect(&toy_quintic, 1.4, 1.5);
  Eigen::VectorXd x(2);
  x << t, 0.5 * t * t * t;
  return x;
}

inline double toy_spurious_multiplier() {
  const Eigen::VectorXd x = toy_spurious();
  return 3.0 * x(0) - 5.0 * x(1) + 5.0;
}

// ---------------------------------------------------------------------------
// Classical cyclic Jacobi diagonalization for symmetric matrices; used as an
// eigenvalue oracle independent of Eigen's solvers.  A = V diag(w) V^T.
inline void jacobi_eig(Eigen::MatrixXd A, Eigen::VectorXd& w, Eigen::MatrixXd& V) {
  const int n = static_cast<int>(A.rows());
  V = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-28 * (1.0 + A.diagonal().squaredNorm())) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (A(p, q) == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  w = A.diagonal();
}

// PSD projection through the Jacobi oracle: clip negative eigenvalues.
inline Eigen::MatrixXd jacobi_psd_projection(const Eigen::MatrixXd& M) {
  const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::VectorXd w;
  Eigen::MatrixXd V;
  jacobi_eig(S, w, V);
  for (int i = 0; i < w.size(); ++i) w(i) = std::max(0.0, w(i));
  return V * w.asDiagonal() * V.transpose();
}

// ---------------------------------------------------------------------------
// Paths injected by the build; subprocess helper for CLI tests.
inline std::string data_dir() { return POLYOPT_DATA_DIR; }
inline std::string cli_path() { return POLYOPT_CLI_PATH; }

inline std::string data_file(const std::string& name) { return data_dir() + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string temp_path(const std::string& name) {
  return std::string("/tmp/polyopt_test_") + name;
}

// Runs the CLI with the given argument string; captures stdout in `out` and
// returns the exit status.
inline int run_cli(const std::string& args, std::string& out) {
  const std::string out_path = temp_path("stdout.txt");
  const std::string cmd = cli_path() + " " + args + " > " + out_path + " 2> " +
                          temp_path("stderr.txt");
  const int raw = std::system(cmd.c_str());
  out = read_file(out_path);
  if (raw == -1) return -1;
  return WEXITSTATUS(raw);
}

inline std::string cli_stderr() { return read_file(temp_path("stderr.txt")); }

}  // namespace testutil
