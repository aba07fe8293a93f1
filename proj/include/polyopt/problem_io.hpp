#pragma once

#include <string>

#include "polyopt/pop.hpp"

namespace polyopt {

// ProblemFile JSON schema:
//   { "n": int,
//     "objective": [ {"exponents": [int ...], "coef": number}, ... ],
//     "constraints": [ {"poly": [term ...], "kind": "eq"|"ineq"}, ... ] }
// Every exponent list must have length n.  Serialization keeps terms in
// graded-lex order and relies on shortest-round-trip number formatting, so a
// saved problem reloads termwise identical.
Pop problem_from_json(const std::string& text);
std::string problem_to_json(const Pop& pop);

Pop load_problem(const std::string& path);  // ParseError on unreadable/invalid
void save_problem(const Pop& pop, const std::string& path);

}  // namespace polyopt
