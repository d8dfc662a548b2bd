#include <gtest/gtest.h>

#include <random>

#include "smartground/errors.hpp"
#include "smartground/oracles.hpp"
#include "smartground/parser.hpp"
#include "support.hpp"

using namespace smartground;

namespace {

AnswerSets solve(const std::string& text) { return brute_force_answer_sets(naive_ground(parse_program(text)).program); }

}  // namespace

TEST(Oracles, NaiveSubstitutionCount) {
    const NaiveResult r = naive_ground(parse_program("p(X) :- q(X).\nq(1). q(2)."));
    EXPECT_EQ(r.universe_size, 2u);
    EXPECT_EQ(r.substitutions, 2u + 2u);
}

TEST(Oracles, NaiveBudget) {
    EXPECT_THROW(naive_ground(parse_program(std::string(fixtures::kRunningRule) + fixtures::kRunningFacts), 1000),
                 BudgetExceeded);
}

TEST(Oracles, EvenLoop) {
    EXPECT_EQ(solve("a :- not b.\nb :- not a."), (AnswerSets{{"a"}, {"b"}}));
}

TEST(Oracles, OddLoopHasNoAnswerSet) { EXPECT_TRUE(solve("a :- not a.").empty()); }

TEST(Oracles, DisjunctionIsMinimal) {
    EXPECT_EQ(solve("a | b.\nc :- a.\nc :- b."), (AnswerSets{{"a", "c"}, {"b", "c"}}));
}

TEST(Oracles, ConstraintsPrune) {
    EXPECT_EQ(solve("a :- not b.\nb :- not a.\n:- a."), (AnswerSets{{"b"}}));
}

TEST(Oracles, Projection) {
    const AnswerSets s{{"a(1)", "fresh_pred_1(1)"}, {"b"}};
    EXPECT_EQ(project(s, {"a", "b"}), (AnswerSets{{"a(1)"}, {"b"}}));
}

TEST(Oracles, BruteForceMatchesDefinition) {
    std::mt19937_64 rng(5);
    std::size_t compared = 0;
    for (int i = 0; i < 40; ++i) {
        const Program p = fixtures::random_stratified_program(rng);
        const GroundProgram g = naive_ground(p).program;
        if (g.atoms.size() > 12) continue;
        EXPECT_EQ(brute_force_answer_sets(g), exhaustive_answer_sets(g)) << render_program(p);
        ++compared;
    }
    for (const char* text : {"a :- not b.\nb :- not a.\nc | d :- a.\n:- c, d.", "a | b.\na :- b.\nb :- a."}) {
        const GroundProgram g = naive_ground(parse_program(text)).program;
        EXPECT_EQ(brute_force_answer_sets(g), exhaustive_answer_sets(g)) << text;
    }
    EXPECT_GT(compared, 0u);
}
