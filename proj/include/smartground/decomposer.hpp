#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smartground/ast.hpp"
#include "smartground/hypergraph.hpp"
#include "smartground/stats.hpp"

namespace smartground {

/// Hands out `fresh_pred_1`, `fresh_pred_2`, ... skipping names already
/// used by the program.
class FreshNamer {
public:
    explicit FreshNamer(std::set<std::string> reserved = {}, std::size_t next = 1)
        : reserved_(std::move(reserved)), next_(next) {}

    std::string next_name();
    std::size_t counter() const { return next_; }

private:
    std::set<std::string> reserved_;
    std::size_t next_;
};

/// Predicate names of a program, for FreshNamer's reserved set.
std::set<std::string> predicate_names(const Program& program);

struct FreshPredicate {
    std::string name;
    std::size_t arity = 0;
    std::size_t defining_rule = 0;  // index into RuleDecomposition::rules
    std::size_t creation_index = 0;
};

struct RuleDecomposition {
    std::vector<Rule> rules;
    std::vector<FreshPredicate> fresh;
    std::vector<std::size_t> order;  // grounding order, indices into rules
    Rule origin;

    bool is_fresh(const PredicateKey& key) const;
    std::optional<std::size_t> creation_index(const PredicateKey& key) const;
    std::vector<Rule> ordered_rules() const;
};

/// Turns a decomposition of `rule` into replacement rules.
///
/// The root is the first bag holding every head variable. Each literal goes
/// to the deepest bag covering it; comparisons go to the shallowest node
/// where their variables are available once links exist. A node is linked
/// to its parent through a fresh atom over the variables its subtree shares
/// with the rest of the rule. Nodes without literals in their subtree are
/// dropped. Unsafe node rules are repaired by restore_safety.
///
/// Throws DecompositionDegenerate when fewer than two nodes receive literals.
RuleDecomposition to_rules(const TreeDecomposition& td, const Rule& rule, FreshNamer& namer,
                           const StatsView* stats = nullptr);

struct SafetyRepair {
    Rule rule;
    std::optional<Rule> saviour;
};

/// If `partial` is unsafe, appends `fresh(UV)` over its unsafe variables and
/// returns the rule defining it from binders taken out of `origin`.
/// Standard positive atoms with the smallest known extension are preferred,
/// then atoms with arithmetic, then assignments.
SafetyRepair restore_safety(const Rule& partial, const Rule& origin, FreshNamer& namer,
                            const StatsView* stats = nullptr);

/// Topological order over fresh-predicate dependencies. Among ready rules
/// the one whose head was created first goes first; the origin head last.
std::vector<std::size_t> grounding_order(const RuleDecomposition& rd);

}  // namespace smartground
