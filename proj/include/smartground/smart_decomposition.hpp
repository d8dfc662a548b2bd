#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "smartground/ast.hpp"
#include "smartground/cost_model.hpp"
#include "smartground/decomposer.hpp"
#include "smartground/hypergraph.hpp"
#include "smartground/stats.hpp"

namespace smartground {

struct SDConfig {
    double ratio_threshold = 0.5;
    std::size_t max_generations = 5;
    std::size_t non_improving_limit = 3;
    std::size_t body_length_fitness_limit = 10;
    TDConfig td;

    /// Throws std::invalid_argument on a non-positive threshold or a zero limit.
    void validate() const;
};

/// e_r / e_RD >= threshold.
bool decomposition_is_preferable(double rule_cost, double decomposition_cost, double threshold);

template <typename Candidate>
struct FitnessOutcome {
    std::optional<Candidate> best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> costs;  // one per generated candidate
};

/// The fitness loop. Pulls candidates from `next` and keeps the cheapest.
/// Long bodies get exactly one candidate; otherwise at most max_generations,
/// stopping once non_improving_limit candidates in a row fail to be strictly
/// cheaper than the best so far. A candidate whose cost is not finite never
/// becomes the best.
template <typename Candidate>
FitnessOutcome<Candidate> rank_candidates(std::size_t body_length, const SDConfig& cfg,
                                          const std::function<std::optional<Candidate>()>& next,
                                          const std::function<double(const Candidate&)>& cost) {
    FitnessOutcome<Candidate> out;
    const std::size_t budget = body_length > cfg.body_length_fitness_limit ? 1 : cfg.max_generations;
    std::size_t stale = 0;
    while (out.costs.size() < budget && stale < cfg.non_improving_limit) {
        auto candidate = next();
        if (!candidate) break;
        const double c = cost(*candidate);
        out.costs.push_back(c);
        if (c < out.best_cost) {
            out.best_cost = c;
            out.best = std::move(candidate);
            stale = 0;
        } else {
            ++stale;
        }
    }
    return out;
}

/// One line of the decision log.
struct RuleDecision {
    std::string rule;
    double rule_cost = 0;
    std::vector<std::optional<double>> candidate_costs;  // nullopt: degenerate decomposition
    std::optional<std::size_t> chosen;
    std::optional<double> ratio;
    bool decomposed = false;
    std::string reason;
    std::vector<std::string> replacement;
    /// Extension sizes of the positive body predicates when the decision was made.
    std::vector<std::pair<std::string, double>> body_sizes;
};

struct SmartResult {
    std::optional<RuleDecomposition> decomposition;
    RuleDecision decision;
};

/// Estimates the rule, ranks candidate decompositions with the fitness loop
/// and keeps the best one when decomposition_is_preferable holds. Fresh names
/// are only taken from `namer` for the decomposition that is returned.
SmartResult smart_decompose(const Rule& rule, const StatsView& stats, const SDConfig& cfg, FreshNamer& namer);

enum class DecompositionMode { Off, Always, Smart };

std::optional<DecompositionMode> parse_mode(std::string_view name);
const char* to_string(DecompositionMode mode);

struct RewriteResult {
    Program program;
    std::vector<RuleDecision> log;
};

/// Whole-program rewriting. Off is the identity; Always replaces each
/// decomposable rule by its first decomposition; Smart decides per rule with
/// the given statistics (which must then be non-null).
RewriteResult rewrite_program(const Program& program, DecompositionMode mode, const StatsView* stats,
                              const SDConfig& cfg);

}  // namespace smartground
