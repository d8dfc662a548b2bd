#pragma once

#include <string>
#include <string_view>

#include "smartground/ast.hpp"
#include "smartground/errors.hpp"

namespace smartground {

/// Parses a program in the supported dialect: disjunctive heads with `|`,
/// `:-`, `not`, comparisons, integer arithmetic, function terms, `_`,
/// intervals inside facts and `%` comments. Interval facts are kept as
/// written; they are expanded when extensions are built.
///
/// Throws SyntaxError on malformed input and UnsupportedFeature on
/// aggregates, choice rules, queries, weak constraints, directives,
/// strings, classical and double negation.
Program parse_program(std::string_view text);

std::string render_term(const Term& term);
std::string render_atom(const Atom& atom);
std::string render_literal(const Literal& literal);
std::string render_rule(const Rule& rule);

/// One rule per line, in program order.
std::string render_program(const Program& program);

}  // namespace smartground
