#include "polyopt/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "polyopt/errors.hpp"

namespace polyopt {

namespace {

using nlohmann::json;

Polynomial poly_from_terms(const json& terms, int n, const std::string& where) {
  if (!terms.is_array()) throw ParseError(where + " must be a term array", 0);
  Polynomial p(n);
  for (const auto& t : terms) {
    if (!t.is_object() || !t.contains("exponents") || !t.contains("coef")) {
      throw ParseError(where + ": each term needs \"exponents\" and \"coef\"", 0);
    }
    const auto& ex = t["exponents"];
    if (!ex.is_array() || static_cast<int>(ex.size()) != n) {
      throw ParseError(where + ": exponent list must have length " + std::to_string(n),
                       0);
    }
    std::vector<int> powers;
    powers.reserve(n);
    for (const auto& e : ex) {
      if (!e.is_number_integer() || e.get<int>() < 0) {
        throw ParseError(where + ": exponents must be nonnegative integers", 0);
      }
      powers.push_back(e.get<int>());
    }
    if (!t["coef"].is_number()) throw ParseError(where + ": coef must be a number", 0);
    p.add_term(powers, t["coef"].get<double>());
  }
  return p;
}

json terms_to_json(const Polynomial& p) {
  json arr = json::array();
  for (const auto& [e, c] : p.terms()) {
    arr.push_back({{"exponents", e.powers()}, {"coef", c}});
  }
  return arr;
}

}  // namespace

Pop problem_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("objective")) {
    throw ParseError("problem file needs \"n\" and \"objective\"", 0);
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<int>() < 1) {
    throw ParseError("\"n\" must be a positive integer", 0);
  }
  int n = doc["n"].get<int>();
  Polynomial f = poly_from_terms(doc["objective"], n, "objective");
  std::vector<Polynomial> g;
  std::vector<ConstraintKind> kinds;
  if (doc.contains("constraints")) {
    if (!doc["constraints"].is_array()) {
      throw ParseError("\"constraints\" must be an array", 0);
    }
    int i = 0;
    for (const auto& c : doc["constraints"]) {
      std::string where = "constraint " + std::to_string(i + 1);
      if (!c.is_object() || !c.contains("poly") || !c.contains("kind")) {
        throw ParseError(where + " needs \"poly\" and \"kind\"", 0);
      }
      std::string kind = c["kind"].get<std::string>();
      if (kind != "eq" && kind != "ineq") {
        throw ParseError(where + ": kind must be \"eq\" or \"ineq\"", 0);
      }
      g.push_back(poly_from_terms(c["poly"], n, where));
      kinds.push_back(kind == "eq" ? ConstraintKind::Equality
                                   : ConstraintKind::Inequality);
      ++i;
    }
  }
  return Pop(n, std::move(f), std::move(g), std::move(kinds));
}

std::string problem_to_json(const Pop& pop) {
  json doc;
  doc["n"] = pop.n;
  doc["objective"] = terms_to_json(pop.objective);
  json cons = json::array();
  for (int i = 0; i < pop.constraint_count(); ++i) {
    cons.push_back({{"poly", terms_to_json(pop.constraints[i])},
                    {"kind", pop.is_equality(i) ? "eq" : "ineq"}});
  }
  doc["constraints"] = std::move(cons);
  return doc.dump(2) + "\n";
}

Pop load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return problem_from_json(buf.str());
}

void save_problem(const Pop& pop, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'", 0);
  out << problem_to_json(pop);
}

}  // namespace polyopt
