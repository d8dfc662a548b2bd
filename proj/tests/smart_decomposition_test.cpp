#include <gtest/gtest.h>

#include "smartground/cost_model.hpp"
#include "smartground/errors.hpp"
#include "smartground/parser.hpp"
#include "smartground/smart_decomposition.hpp"
#include "support.hpp"

using namespace smartground;

TEST(SmartDecomposition, Threshold) {
    EXPECT_TRUE(decomposition_is_preferable(50, 100, 0.5));
    EXPECT_FALSE(decomposition_is_preferable(49, 100, 0.5));
    EXPECT_TRUE(decomposition_is_preferable(10, 10, 1.0));
    EXPECT_FALSE(decomposition_is_preferable(9, 10, 1.0));
}

TEST(SmartDecomposition, ConfigValidation) {
    SDConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.ratio_threshold = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.max_generations = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SmartDecomposition, FitnessLoopKeepsCheapest) {
    const std::vector<double> costs{7, 3, 5, 3, 4, 1};
    std::size_t next = 0;
    const auto out = rank_candidates<std::size_t>(
        4, SDConfig{}, [&]() -> std::optional<std::size_t> { return next < costs.size() ? std::optional(next++) : std::nullopt; },
        [&](const std::size_t& i) { return costs[i]; });
    // 7, 3 (best), 5, 3 (tie is not an improvement), 4: third in a row, stop
    EXPECT_EQ(out.costs.size(), 5u);
    EXPECT_EQ(out.best, 1u);
    EXPECT_EQ(out.best_cost, 3);
}

TEST(SmartDecomposition, InfiniteCostNeverWins) {
    std::size_t n = 0;
    const auto out = rank_candidates<int>(
        3, SDConfig{}, [&]() -> std::optional<int> { return n++ < 2 ? std::optional(1) : std::nullopt; },
        [](const int&) { return std::numeric_limits<double>::infinity(); });
    EXPECT_FALSE(out.best);
}

TEST(SmartDecomposition, DecidesOnRunningRule) {
    const Program p = parse_program(std::string(fixtures::kRunningRule) + fixtures::kRunningFacts);
    const StatsTable stats = stats_from_facts(p);
    FreshNamer namer(predicate_names(p));
    const SmartResult r = smart_decompose(p.rules[0], stats, SDConfig{}, namer);
    EXPECT_EQ(r.decision.rule_cost, estimate_rule(p.rules[0], stats));
    ASSERT_TRUE(r.decision.ratio);
    EXPECT_EQ(r.decision.decomposed, *r.decision.ratio >= 0.5);
    EXPECT_EQ(r.decomposition.has_value(), r.decision.decomposed);
    EXPECT_LE(r.decision.candidate_costs.size(), 5u);

    SDConfig strict;
    strict.ratio_threshold = 1e9;
    FreshNamer namer2(predicate_names(p));
    const SmartResult kept = smart_decompose(p.rules[0], stats, strict, namer2);
    EXPECT_FALSE(kept.decomposition);
    EXPECT_EQ(kept.decision.reason, "ratio below threshold");
    // rejected candidates do not use up fresh names
    EXPECT_EQ(namer2.next_name(), "fresh_pred_1");
}

TEST(SmartDecomposition, MissingStatisticsKeepRule) {
    const Program p = parse_program(fixtures::kRunningRule);
    StatsTable empty;
    FreshNamer namer;
    const SmartResult r = smart_decompose(p.rules[0], empty, SDConfig{}, namer);
    EXPECT_FALSE(r.decomposition);
    EXPECT_FALSE(r.decision.decomposed);
}

TEST(SmartDecomposition, Modes) {
    EXPECT_EQ(parse_mode("always"), DecompositionMode::Always);
    EXPECT_FALSE(parse_mode("sometimes"));
    EXPECT_STREQ(to_string(DecompositionMode::Smart), "smart");
}

TEST(SmartDecomposition, RewriteProgram) {
    const Program p = parse_program(std::string(fixtures::kRunningRule) + fixtures::kRunningFacts);
    EXPECT_EQ(rewrite_program(p, DecompositionMode::Off, nullptr, {}).program, p);
    const RewriteResult always = rewrite_program(p, DecompositionMode::Always, nullptr, {});
    EXPECT_EQ(always.program.rules.size(), p.rules.size() + 2);
    EXPECT_THROW(rewrite_program(p, DecompositionMode::Smart, nullptr, {}), InternalError);
}
