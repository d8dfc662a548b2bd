#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smartground/ast.hpp"
#include "smartground/decomposer.hpp"
#include "smartground/stats.hpp"

namespace smartground {

inline constexpr double kMinCost = 1.0;
inline constexpr double kMaxCost = 1e300;

double clamp_cost(double value);

/// dom(X) per variable of one rule.
using DomainMap = std::map<std::string, double>;

/// The virtual relation A_j built so far.
struct JoinState {
    std::map<std::string, double> selectivity;  // V(X, A_j)
    double cost = 1;

    bool binds(const std::string& variable) const { return selectivity.contains(variable); }
};

/// V(X, a): distinct values at the positions of `atom` that depend on X
/// alone. Several such positions give the smallest count; none gives T.
double variable_selectivity(const Atom& atom, const PredicateStats& stats, const std::string& variable);

/// The single index argument used when `atom` is matched with the bound
/// variables given: among arguments that are a bound variable or arithmetic
/// over exactly one bound variable, the one with most distinct values, the
/// leftmost on ties. Shared by the estimator and the grounder.
std::optional<std::size_t> choose_index_position(const std::vector<Term>& args,
                                                 const std::function<bool(const std::string&)>& is_bound,
                                                 std::span<const double> selectivity);

/// dom(X): the largest V(X, a) over positive body atoms containing X.
/// Variables introduced by assignments take the product of their sources.
DomainMap rule_domains(const Rule& rule, const StatsView& stats);

struct StepTrace {
    std::string literal;
    double size = 0;
    std::optional<std::size_t> index_position;
    double index_selectivity = 1;
    double factor = 1;
    double cost_after = 1;
    std::map<std::string, double> selectivity_after;
};

struct RuleEstimate {
    std::string rule;
    std::vector<StepTrace> steps;
    double cost = 1;
};

/// One join step: T(a) / V(idx, a) times the reduction V(X,A)/dom(X) over
/// every variable shared with the relation built so far.
double join_step(const JoinState& state, const Atom& atom, const PredicateStats& stats, const DomainMap& dom,
                 std::optional<std::size_t>* index_position = nullptr);

/// Selectivities after joining `atom`: shared X scale by V(X,a)/dom(X),
/// new X take V(X,a). Floored at 1.
JoinState propagate_selectivity(JoinState state, const Atom& atom, const PredicateStats& stats,
                                const DomainMap& dom);

/// Estimated grounding cost of a rule: the product of T(a1) and every later
/// join step, with atoms visited in evaluation order.
double estimate_rule(const Rule& rule, const StatsView& stats);
RuleEstimate estimate_rule_traced(const Rule& rule, const StatsView& stats);

/// Left-deep System-R style size of the join of `body`, projected on
/// `head_vars`.
double estimate_join_size(const std::vector<Literal>& body, const VariableSet& head_vars, const StatsView& stats);
double estimate_join_size(const Rule& rule, const StatsView& stats);

/// Statistics of a fresh predicate: size T, each selectivity ceil(T^(1/k)).
PredicateStats fresh_pred_stats(double size, std::size_t arity);

struct DecompositionEstimate {
    double cost = 0;
    std::vector<RuleEstimate> rules;  // grounding order
    std::map<std::string, PredicateStats> fresh_stats;
};

/// Walks the decomposition in grounding order, estimating every fresh
/// predicate's statistics first, then sums the rule estimates.
DecompositionEstimate estimate_decomposition(const RuleDecomposition& rd, const StatsView& stats);

/// Exact statistics over the facts of a program, intervals expanded.
StatsTable stats_from_facts(const Program& program);

}  // namespace smartground
