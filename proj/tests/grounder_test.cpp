#include <gtest/gtest.h>

#include <algorithm>

#include "smartground/errors.hpp"
#include "smartground/grounder.hpp"
#include "smartground/oracles.hpp"
#include "smartground/parser.hpp"
#include "smartground/synthetic.hpp"
#include "support.hpp"

using namespace smartground;

namespace {

GroundResult ground(const std::string& text, DecompositionMode mode = DecompositionMode::Off) {
    GroundConfig cfg;
    cfg.mode = mode;
    return ground_program(parse_program(text), cfg);
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i)
        if (text[i] == '\n') {
            out.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Grounder, FactsOnly) {
    EXPECT_EQ(lines(ground("a(1). a(2). b.").program.render()), (std::vector<std::string>{"a(1).", "a(2).", "b."}));
}

TEST(Grounder, SimpleRule) {
    const GroundResult r = ground("p(X) :- q(X).\nq(1). q(2).");
    EXPECT_EQ(lines(r.program.render()), (std::vector<std::string>{"p(1).", "p(2).", "q(1).", "q(2)."}));
    EXPECT_EQ(r.rule_instances.at(0), (std::vector<std::string>{"p(1).", "p(2)."}));
}

TEST(Grounder, Recursion) {
    const GroundResult r = ground("t(X,Y) :- e(X,Y).\nt(X,Z) :- t(X,Y), e(Y,Z).\ne(1,2). e(2,3). e(3,4).");
    const auto out = lines(r.program.render());
    for (const char* a : {"t(1,4).", "t(2,4).", "t(1,3)."})
        EXPECT_NE(std::find(out.begin(), out.end(), a), out.end()) << a;
    EXPECT_EQ(out.size(), 3u + 6u);
}

TEST(Grounder, StratifiedNegationIsEvaluated) {
    const GroundResult r = ground("q(X) :- d(X), not r(X).\nr(1). d(1..2).");
    EXPECT_EQ(r.rule_instances.at(0), (std::vector<std::string>{"q(2)."}));
}

TEST(Grounder, UnstratifiedNegationStaysInRules) {
    const GroundResult r = ground("a :- not b.\nb :- not a.");
    EXPECT_EQ(lines(r.program.render()), (std::vector<std::string>{"a :- not b.", "b :- not a."}));
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Grounder, ConstraintWithTrueBody) {
    EXPECT_EQ(ground("p. :- p.").program.render(), "p.\n:-.\n");
}

TEST(Grounder, Arithmetic) {
    const GroundResult r = ground("n(X+1) :- n(X), X<3.\nn(0).\nh(Y) :- n(X), Y=X*2.\nz(X/0) :- n(X).");
    const auto out = lines(r.program.render());
    EXPECT_NE(std::find(out.begin(), out.end(), "n(3)."), out.end());
    EXPECT_NE(std::find(out.begin(), out.end(), "h(6)."), out.end());
    EXPECT_GT(r.arithmetic_errors, 0u);
}

TEST(Grounder, ModulePlanOrder) {
    const Program p = parse_program("c(X) :- b(X), not d(X).\nb(X) :- a(X).\n:- c(1).\nb(X) :- b(X).\na(1).\n"
                                    "d(X) :- b(X), not e(X).\ne(X) :- d(X).");
    const ModulePlan plan = build_module_plan(p);
    EXPECT_EQ(plan.facts, (std::vector<std::size_t>{4}));
    ASSERT_EQ(plan.components.size(), 4u);
    EXPECT_EQ(plan.components[0].rules, (std::vector<std::size_t>{1, 3}));
    EXPECT_TRUE(plan.components[0].recursive);
    EXPECT_EQ(plan.components[1].rules, (std::vector<std::size_t>{5, 6}));
    EXPECT_TRUE(plan.components[1].negative_cycle);
    EXPECT_EQ(plan.components[2].rules, (std::vector<std::size_t>{0}));
    EXPECT_FALSE(plan.components[2].recursive);
    EXPECT_EQ(plan.components[3].rules, (std::vector<std::size_t>{2}));
    EXPECT_EQ(plan.warnings.size(), 1u);
}

TEST(Grounder, RunningRuleMatchesNaiveCount) {
    const std::string text = std::string(fixtures::kRunningRule) + fixtures::kRunningFacts;
    const Program p = parse_program(text);
    const NaiveResult naive = naive_ground(p);
    std::uint64_t fact_rules = 0;
    std::set<std::string> facts, heads;
    for (const auto& r : naive.program.rules)
        if (r.body.empty()) {
            ++fact_rules;
            facts.insert(naive.program.atoms[r.head[0]]);
        }
    EXPECT_EQ(naive.substitutions - fact_rules, 15625u);
    for (const auto& r : naive.program.rules) {
        if (r.body.empty()) continue;
        bool all = true;
        for (const auto& l : r.body) all = all && !l.negative && facts.contains(naive.program.atoms[l.atom]);
        if (all) heads.insert(naive.program.atoms[r.head[0]] + ".");
    }
    for (auto mode : {DecompositionMode::Off, DecompositionMode::Always, DecompositionMode::Smart}) {
        const GroundResult g = ground_program(p, {mode});
        // decomposed rules also list their fresh-predicate instances
        std::vector<std::string> own;
        for (const auto& line : g.rule_instances.at(0))
            if (line.rfind("p(", 0) == 0) own.push_back(line);
        EXPECT_EQ(own, std::vector<std::string>(heads.begin(), heads.end())) << to_string(mode);
    }
}

TEST(Grounder, ModesAgreeOnRunningExample) {
    const std::string text = std::string(fixtures::kRunningRule) + fixtures::kRunningFacts;
    const GroundResult off = ground(text);
    const GroundResult always = ground(text, DecompositionMode::Always);
    EXPECT_EQ(always.replacements.at(0).size(), 3u);
    auto certain = [](const GroundResult& r) {
        std::vector<std::string> out;
        for (const auto& l : lines(r.program.render()))
            if (l.rfind("fresh_pred_", 0) != 0) out.push_back(l);
        return out;
    };
    EXPECT_EQ(certain(off), certain(always));
    EXPECT_LT(always.counters.substitution_attempts, off.counters.substitution_attempts);
}

TEST(Grounder, Budgets) {
    GroundConfig cfg;
    cfg.mode = DecompositionMode::Off;
    cfg.max_ground_rules = 10;
    const Program p = parse_program(std::string(fixtures::kRunningRule) + fixtures::kRunningFacts);
    EXPECT_THROW(ground_program(p, cfg), BudgetExceeded);
    cfg.max_ground_rules.reset();
    cfg.timeout_ms = 0;
    const Program chain = parse_program(chain_join_encoding(8) + chain_join_instance({8, 200, 50, 0}));
    EXPECT_THROW(ground_program(chain, cfg), BudgetExceeded);
}

TEST(Grounder, UnsafeProgram) { EXPECT_THROW(ground("p(X) :- q(Y)."), SafetyError); }

TEST(Grounder, FreshNamesDoNotClash) {
    const GroundResult r = ground(std::string("fresh_pred_1(7).\n") + fixtures::kRunningRule + fixtures::kRunningFacts,
                                  DecompositionMode::Always);
    for (const auto& rule : r.replacements.at(1))
        for (const auto& l : rule.body) EXPECT_NE(l.atom.predicate, "fresh_pred_1");
}
