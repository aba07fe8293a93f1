#include "polyopt/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "polyopt/errors.hpp"

namespace polyopt {

namespace {
// Coefficients below this magnitude are treated as exact zeros.
constexpr double kCoefficientDrop = 1e-300;

// Exact factorials up to 12!; declared degrees beyond 12 are rejected, which
// comfortably covers every system this library builds (degree <= 4 inputs).
constexpr int kMaxFactorial = 12;
const std::uint64_t kFactorial[kMaxFactorial + 1] = {
    1ull,      1ull,      2ull,       6ull,       24ull,       120ull,      720ull,
    5040ull,   40320ull,  362880ull,  3628800ull, 39916800ull, 479001600ull};
}  // namespace

Exponent::Exponent(std::vector<int> powers) : p_(std::move(powers)) {
  for (int v : p_) {
    if (v < 0) throw InputError("negative exponent entry");
    total_ += v;
  }
}

Exponent Exponent::zero(int n) { return Exponent(std::vector<int>(n, 0)); }

Exponent Exponent::unit(int n, int i) {
  if (i < 0 || i >= n) throw InputError("variable index out of range");
  std::vector<int> p(n, 0);
  p[i] = 1;
  return Exponent(std::move(p));
}

Exponent Exponent::plus(const Exponent& o) const {
  if (o.size() != size()) throw InputError("exponent size mismatch");
  std::vector<int> p(p_);
  for (int i = 0; i < size(); ++i) p[i] += o.p_[i];
  return Exponent(std::move(p));
}

bool Exponent::operator<(const Exponent& o) const {
  if (total_ != o.total_) return total_ < o.total_;
  // Within a degree the lexicographically larger tuple comes first.
  return std::lexicographical_compare(o.p_.begin(), o.p_.end(), p_.begin(), p_.end());
}

Polynomial::Polynomial(int n) : n_(n) {
  if (n < 0) throw InputError("negative variable count");
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Exponent::zero(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  Polynomial p(n);
  p.add_term(Exponent::unit(n, i), 1.0);
  return p;
}

int Polynomial::degree() const { return degree_; }

double Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponent& e, double c) {
  if (e.size() != n_) throw InputError("exponent arity does not match polynomial");
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    if (std::abs(c) < kCoefficientDrop) return;
    terms_.emplace(e, c);
    degree_ = std::max(degree_, e.degree());
    return;
  }
  it->second += c;
  if (std::abs(it->second) < kCoefficientDrop) {
    bool was_top = it->first.degree() == degree_;
    terms_.erase(it);
    if (was_top) recompute_degree();
  }
}

void Polynomial::add_term(const std::vector<int>& powers, double c) {
  add_term(Exponent(powers), c);
}

void Polynomial::recompute_degree() {
  degree_ = 0;
  for (const auto& [e, c] : terms_) degree_ = std::max(degree_, e.degree());
}

double Polynomial::eval(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw InputError("evaluation point has wrong dimension");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double mono = c;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < e[i]; ++k) mono *= x[i];
    }
    acc += mono;
  }
  return acc;
}

Polynomial Polynomial::derivative(int i) const {
  if (i < 0 || i >= n_) throw InputError("derivative index out of range");
  Polynomial out(n_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    std::vector<int> p = e.powers();
    double coef = c * p[i];
    p[i] -= 1;
    out.add_term(Exponent(std::move(p)), coef);
  }
  return out;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(n_);
  for (int i = 0; i < n_; ++i) g[i] = derivative(i).eval(x);
  return g;
}

double Polynomial::bw_norm(int d) const {
  if (d < degree()) throw InputError("declared degree below actual degree");
  if (d > kMaxFactorial) throw InputError("declared degree exceeds supported range");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    // weight = nu_1! ... nu_n! (d - |nu|)! / d!, assembled from exact integers.
    std::uint64_t num = kFactorial[d - e.degree()];
    for (int i = 0; i < e.size(); ++i) num *= kFactorial[e[i]];
    acc += c * c * (static_cast<double>(num) / static_cast<double>(kFactorial[d]));
  }
  return std::sqrt(acc);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.n_ != n_) throw InputError("variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.n_ != n_) throw InputError("variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    degree_ = 0;
    return *this;
  }
  std::map<Exponent, double> scaled;
  for (const auto& [e, c] : terms_) {
    double v = c * s;
    if (std::abs(v) >= kCoefficientDrop) scaled.emplace(e, v);
  }
  terms_ = std::move(scaled);
  recompute_degree();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.n_ != b.n_) throw InputError("variable count mismatch");
  Polynomial out(a.n_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      out.add_term(ea.plus(eb), ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::embedded(int new_n, int offset) const {
  if (offset < 0 || offset + n_ > new_n) throw InputError("embedding does not fit");
  Polynomial out(new_n);
  for (const auto& [e, c] : terms_) {
    std::vector<int> p(new_n, 0);
    for (int i = 0; i < n_; ++i) p[offset + i] = e[i];
    out.add_term(Exponent(std::move(p)), c);
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c >= 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    for (int i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << "*x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

double one_norm(const Eigen::VectorXd& x) { return std::sqrt(1.0 + x.squaredNorm()); }

PolySystem::PolySystem(std::vector<Polynomial> components)
    : PolySystem(std::move(components), {}) {}

PolySystem::PolySystem(std::vector<Polynomial> components, std::vector<int> degrees)
    : comps_(std::move(components)), degrees_(std::move(degrees)) {
  if (comps_.empty()) throw InputError("empty polynomial system");
  n_ = comps_[0].var_count();
  for (const auto& p : comps_) {
    if (p.var_count() != n_) throw InputError("mixed variable counts in system");
  }
  if (degrees_.empty()) {
    degrees_.reserve(comps_.size());
    for (const auto& p : comps_) degrees_.push_back(std::max(1, p.degree()));
  }
  if (degrees_.size() != comps_.size()) throw InputError("degree list size mismatch");
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (degrees_[i] < comps_[i].degree()) {
      throw InputError("declared degree below component degree");
    }
    if (degrees_[i] < 1) throw InputError("declared degrees must be >= 1");
  }
  partials_.resize(comps_.size());
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    partials_[i].reserve(n_);
    for (int j = 0; j < n_; ++j) partials_[i].push_back(comps_[i].derivative(j));
  }
}

int PolySystem::max_degree() const {
  return *std::max_element(degrees_.begin(), degrees_.end());
}

Eigen::VectorXd PolySystem::eval(const Eigen::VectorXd& z) const {
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) out[i] = comps_[i].eval(z);
  return out;
}

Eigen::MatrixXd PolySystem::jacobian(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd J(size(), n_);
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < n_; ++j) J(i, j) = partials_[i][j].eval(z);
  }
  return J;
}

double PolySystem::bw_norm() const {
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) {
    double v = comps_[i].bw_norm(degrees_[i]);
    acc += v * v;
  }
  return std::sqrt(acc);
}

}  // namespace polyopt
