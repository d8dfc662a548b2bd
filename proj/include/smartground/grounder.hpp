#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "smartground/ast.hpp"
#include "smartground/cost_model.hpp"
#include "smartground/smart_decomposition.hpp"

namespace smartground {

using AtomId = std::uint32_t;

struct GroundLiteral {
    AtomId atom = 0;
    bool negative = false;
};

/// Empty head: constraint. Empty body with a single head atom: fact.
struct GroundRule {
    std::vector<AtomId> head;
    std::vector<GroundLiteral> body;
};

/// A ground program over its own atom table. Atoms are kept as text so
/// programs produced by different runs can be compared.
struct GroundProgram {
    std::vector<std::string> atoms;
    std::vector<std::string> atom_predicate;
    std::vector<GroundRule> rules;

    AtomId intern(const std::string& text, const std::string& predicate);
    std::string render_rule(const GroundRule& rule) const;
    /// One rule per line; the empty constraint prints as `:-.`.
    std::string render() const;

private:
    std::unordered_map<std::string, AtomId> index_;
};

struct Component {
    std::vector<std::size_t> rules;  // indices into the program, in program order
    std::set<PredicateKey> predicates;
    bool recursive = false;
    bool negative_cycle = false;
};

/// Strongly connected components of the predicate dependency graph in
/// evaluation order. Facts are not part of any component; constraints form
/// the last one.
struct ModulePlan {
    std::vector<std::size_t> facts;
    std::vector<Component> components;
    std::vector<std::string> warnings;
};

ModulePlan build_module_plan(const Program& program);

struct Counters {
    std::uint64_t substitution_attempts = 0;
    std::uint64_t index_probes = 0;
    std::uint64_t instances = 0;
};

struct GroundConfig {
    DecompositionMode mode = DecompositionMode::Smart;
    SDConfig sd;
    std::optional<std::uint64_t> timeout_ms;
    std::optional<std::size_t> max_ground_rules;
    bool explain_costs = false;
};

struct GroundResult {
    GroundProgram program;
    Counters counters;
    std::vector<RuleDecision> decisions;
    std::vector<RuleEstimate> explanations;
    std::size_t rules_in = 0;
    std::size_t rules_out = 0;
    double wall_time_ms = 0;
    std::uint64_t arithmetic_errors = 0;
    std::vector<std::string> warnings;
    /// Final instances per input rule index, rendered and sorted. Instances
    /// that became facts are listed as facts.
    std::map<std::size_t, std::vector<std::string>> rule_instances;
    /// The non-ground rules that were actually instantiated.
    Program effective_program;
    /// Input rule index to the rules that replaced it.
    std::map<std::size_t, std::vector<Rule>> replacements;
};

/// Intelligent grounding: modules in dependency order, semi-naive
/// evaluation of recursive ones, single-argument indexes, and fact-based
/// simplification. Throws SafetyError on unsafe rules and BudgetExceeded
/// when a budget runs out.
GroundResult ground_program(const Program& program, const GroundConfig& config = {});

/// Throws SafetyError for the first unsafe rule.
void require_safe(const Program& program);

}  // namespace smartground
