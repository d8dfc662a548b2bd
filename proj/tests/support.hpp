#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "smartground/ast.hpp"

namespace smartground::fixtures {

/// A safe rule with 3 to 10 body literals over 2 to 8 variables.
Rule random_rule(std::mt19937_64& rng);

/// Stratified normal program: at most 6 constants, at most 8 rules besides
/// facts, at most 20 possible ground atoms.
Program random_stratified_program(std::mt19937_64& rng);

/// A five-literal rule with arithmetic and a comparison, over s(1..5) and
/// three 5x5x5 relations.
inline constexpr const char* kRunningRule =
    "p(X,Y,Z,S) :- s(S), a(X,Y,S-1), c(D,Y,Z), f(X,P,S-1), P >= D.\n";
inline constexpr const char* kRunningFacts =
    "s(1..5). a(1..5,1..5,1..5). c(1..5,1..5,1..5). f(1..5,1..5,1..5).\n";

/// Renames fresh predicates to `F1`, `F2`, ... in order of first occurrence.
std::string canonical_fresh_names(const std::string& text);

/// Cross-product trap: the decomposed form materialises a link relation
/// far larger than the join output.
std::string cross_product_program(int n = 30);

}  // namespace smartground::fixtures
