#include "smartground/smart_decomposition.hpp"

#include <cmath>
#include <stdexcept>

#include "smartground/parser.hpp"

namespace smartground {

void SDConfig::validate() const {
    if (!(ratio_threshold > 0)) throw std::invalid_argument("ratio threshold must be positive");
    if (max_generations < 1) throw std::invalid_argument("max generations must be at least 1");
    if (non_improving_limit < 1) throw std::invalid_argument("non-improving limit must be at least 1");
    if (body_length_fitness_limit < 1) throw std::invalid_argument("body fitness limit must be at least 1");
}

bool decomposition_is_preferable(double rule_cost, double decomposition_cost, double threshold) {
    return rule_cost / decomposition_cost >= threshold;
}

namespace {

struct Candidate {
    std::optional<RuleDecomposition> rd;
    FreshNamer namer;
};

std::vector<std::string> render_rules(const std::vector<Rule>& rules) {
    std::vector<std::string> out;
    for (const auto& r : rules) out.push_back(render_rule(r));
    return out;
}

}  // namespace

SmartResult smart_decompose(const Rule& rule, const StatsView& stats, const SDConfig& cfg, FreshNamer& namer) {
    SmartResult out;
    RuleDecision& d = out.decision;
    d.rule = render_rule(rule);
    if (rule.body.size() <= 1) {
        d.reason = "body too short";
        return out;
    }
    try {
        d.rule_cost = estimate_rule(rule, stats);
    } catch (const MissingStats& e) {
        d.reason = e.what();
        return out;
    }

    TreeDecompositionGenerator gen(to_hypergraph(rule), cfg.td);
    const std::function<std::optional<Candidate>()> next = [&]() -> std::optional<Candidate> {
        auto td = gen.next();
        if (!td) return std::nullopt;
        Candidate c{std::nullopt, namer};
        try {
            c.rd = to_rules(*td, rule, c.namer, &stats);
        } catch (const DecompositionDegenerate&) {
        }
        return c;
    };
    const std::function<double(const Candidate&)> cost = [&](const Candidate& c) {
        if (!c.rd) return std::numeric_limits<double>::infinity();
        try {
            return estimate_decomposition(*c.rd, stats).cost;
        } catch (const MissingStats&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto outcome = rank_candidates<Candidate>(rule.body.size(), cfg, next, cost);

    for (std::size_t i = 0; i < outcome.costs.size(); ++i) {
        const double c = outcome.costs[i];
        d.candidate_costs.push_back(std::isinf(c) ? std::nullopt : std::optional<double>(c));
        if (outcome.best && c == outcome.best_cost && !d.chosen) d.chosen = i;
    }
    if (!outcome.best) {
        d.reason = outcome.costs.empty() ? "no tree decomposition" : "no usable decomposition";
        return out;
    }
    d.ratio = d.rule_cost / outcome.best_cost;
    if (!decomposition_is_preferable(d.rule_cost, outcome.best_cost, cfg.ratio_threshold)) {
        d.reason = "ratio below threshold";
        return out;
    }
    d.decomposed = true;
    d.reason = "ratio at or above threshold";
    namer = outcome.best->namer;
    d.replacement = render_rules(outcome.best->rd->ordered_rules());
    out.decomposition = std::move(outcome.best->rd);
    return out;
}

std::optional<DecompositionMode> parse_mode(std::string_view name) {
    if (name == "off") return DecompositionMode::Off;
    if (name == "always") return DecompositionMode::Always;
    if (name == "smart") return DecompositionMode::Smart;
    return std::nullopt;
}

const char* to_string(DecompositionMode mode) {
    switch (mode) {
    case DecompositionMode::Off: return "off";
    case DecompositionMode::Always: return "always";
    case DecompositionMode::Smart: return "smart";
    }
    return "?";
}

RewriteResult rewrite_program(const Program& program, DecompositionMode mode, const StatsView* stats,
                              const SDConfig& cfg) {
    RewriteResult out;
    if (mode == DecompositionMode::Off) {
        out.program = program;
        return out;
    }
    if (mode == DecompositionMode::Smart && !stats) throw InternalError("smart rewriting needs statistics");

    FreshNamer namer(predicate_names(program));
    for (const auto& rule : program.rules) {
        if (rule.body.size() <= 1) {
            out.program.rules.push_back(rule);
            continue;
        }
        if (mode == DecompositionMode::Smart) {
            auto res = smart_decompose(rule, *stats, cfg, namer);
            if (res.decomposition)
                for (auto& r : res.decomposition->ordered_rules()) out.program.rules.push_back(std::move(r));
            else
                out.program.rules.push_back(rule);
            out.log.push_back(std::move(res.decision));
            continue;
        }

        RuleDecision d;
        d.rule = render_rule(rule);
        TreeDecompositionGenerator gen(to_hypergraph(rule), cfg.td);
        std::optional<RuleDecomposition> rd;
        if (auto td = gen.next()) {
            try {
                rd = to_rules(*td, rule, namer, stats);
            } catch (const DecompositionDegenerate&) {
            }
        }
        if (rd) {
            d.decomposed = true;
            d.chosen = 0;
            d.reason = "always";
            auto rules = rd->ordered_rules();
            d.replacement = render_rules(rules);
            for (auto& r : rules) out.program.rules.push_back(std::move(r));
        } else {
            d.reason = "not decomposable";
            out.program.rules.push_back(rule);
        }
        out.log.push_back(std::move(d));
    }
    return out;
}

}  // namespace smartground
