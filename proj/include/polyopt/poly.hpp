#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace polyopt {

// Multi-exponent nu = (nu_1, ..., nu_n).  Ordered graded-lexicographically:
// lower total degree first, and within a degree x_1 -heavy monomials first,
// so the induced listing is 1, x1, x2, ..., xn, x1^2, x1 x2, ...
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(std::vector<int> powers);
  static Exponent zero(int n);
  static Exponent unit(int n, int i);

  int size() const { return static_cast<int>(p_.size()); }
  int degree() const { return total_; }
  int operator[](int i) const { return p_[i]; }
  const std::vector<int>& powers() const { return p_; }

  Exponent plus(const Exponent& o) const;

  bool operator==(const Exponent& o) const { return p_ == o.p_; }
  bool operator!=(const Exponent& o) const { return p_ != o.p_; }
  bool operator<(const Exponent& o) const;

 private:
  std::vector<int> p_;
  int total_ = 0;
};

struct ExponentHash {
  std::size_t operator()(const Exponent& e) const {
    std::size_t h = 1469598103934665603ull;
    for (int i = 0; i < e.size(); ++i) {
      h ^= static_cast<std::size_t>(e[i]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Sparse real polynomial in n variables: a graded-lex ordered map from
// exponents to coefficients.  Coefficients with |a| < 1e-300 are dropped so
// that arithmetic cannot manufacture spurious terms.
class Polynomial {
 public:
  explicit Polynomial(int n = 0);
  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);

  int var_count() const { return n_; }
  int degree() const;  // zero polynomial has degree 0
  bool is_zero() const { return terms_.empty(); }
  int term_count() const { return static_cast<int>(terms_.size()); }
  const std::map<Exponent, double>& terms() const { return terms_; }
  double coefficient(const Exponent& e) const;

  // Accumulates c onto the coefficient of e.
  void add_term(const Exponent& e, double c);
  void add_term(const std::vector<int>& powers, double c);

  double eval(const Eigen::VectorXd& x) const;
  Polynomial derivative(int i) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  // Weighted coefficient norm of the polynomial viewed at declared degree d:
  //   ||p||^2 = sum_nu |a_nu|^2 * nu! (d - |nu|)! / d!
  // (nu! = prod_i nu_i!).  Requires d >= degree().
  double bw_norm(int declared_degree) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  // Embeds this polynomial into a space of new_n >= n variables, mapping
  // variable i to variable i + offset.
  Polynomial embedded(int new_n, int offset = 0) const;

  std::string to_string() const;

 private:
  void recompute_degree();

  int n_ = 0;
  std::map<Exponent, double> terms_;
  int degree_ = 0;
};

// sqrt(1 + ||x||^2); the projective-style norm used by the alpha machinery.
double one_norm(const Eigen::VectorXd& x);

// Square or rectangular polynomial map F : R^m -> R^s with declared component
// degrees d_i >= deg F_i.  Partial derivatives are precomputed so Jacobian
// evaluation is a plain sweep.
class PolySystem {
 public:
  PolySystem() = default;
  explicit PolySystem(std::vector<Polynomial> components);
  PolySystem(std::vector<Polynomial> components, std::vector<int> degrees);

  int input_dim() const { return n_; }
  int size() const { return static_cast<int>(comps_.size()); }
  const Polynomial& component(int i) const { return comps_[i]; }
  const std::vector<int>& degrees() const { return degrees_; }
  int max_degree() const;

  Eigen::VectorXd eval(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const;

  // sqrt(sum_i bw_norm(F_i, d_i)^2), each component at its declared degree.
  double bw_norm() const;

 private:
  int n_ = 0;
  std::vector<Polynomial> comps_;
  std::vector<int> degrees_;
  std::vector<std::vector<Polynomial>> partials_;  // [component][variable]
};

}  // namespace polyopt
