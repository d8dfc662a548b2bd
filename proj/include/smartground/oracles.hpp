#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "smartground/ast.hpp"
#include "smartground/grounder.hpp"

namespace smartground {

/// Answer sets as sorted lists of atom texts.
using AnswerSets = std::set<std::vector<std::string>>;

struct NaiveResult {
    GroundProgram program;
    /// Substitutions enumerated in the final pass, one per rule per
    /// assignment of universe elements to the rule's variables.
    std::uint64_t substitutions = 0;
    std::size_t universe_size = 0;
};

/// Full instantiation over the Herbrand universe, without simplification.
/// The universe holds the program's constants and interval values and is
/// closed under the values rule heads produce. False comparisons drop an
/// instance, true ones are removed. Throws BudgetExceeded once more than
/// `max_substitutions` substitutions would be needed.
NaiveResult naive_ground(const Program& program, std::uint64_t max_substitutions = 1'000'000);

/// Exact answer sets. Only atoms that can be derived at all are candidates;
/// the guess ranges over the negated ones, and minimal models of each reduct
/// are enumerated by branching on disjunctive heads. Throws BudgetExceeded
/// when more than `max_guess_atoms` atoms occur under negation.
AnswerSets brute_force_answer_sets(const GroundProgram& program, std::size_t max_guess_atoms = 20);

/// Checks every interpretation over all atoms of the program against the
/// definition directly. Exponential twice over; for cross-checking only.
AnswerSets exhaustive_answer_sets(const GroundProgram& program, std::size_t max_atoms = 12);

/// Keeps atoms whose predicate name is in `predicates`.
AnswerSets project(const AnswerSets& sets, const std::set<std::string>& predicates);

}  // namespace smartground
