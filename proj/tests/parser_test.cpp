#include <gtest/gtest.h>

#include "smartground/ast.hpp"
#include "smartground/errors.hpp"
#include "smartground/parser.hpp"

using namespace smartground;

TEST(Parser, RoundTripsRules) {
    const std::string text =
        "p(X,Y,Z,S) :- s(S), a(X,Y,S-1), c(D,Y,Z), f(X,P,S-1), P>=D.\n"
        "a | b :- not c(1), d(f(X)), X!=2.\n"
        ":- q(X), X<3.\n"
        "s(1..5).\n";
    EXPECT_EQ(render_program(parse_program(text)), text);
}

TEST(Parser, IntervalsStayInFacts) {
    const Program p = parse_program("a(1..3,2).");
    ASSERT_EQ(p.rules.size(), 1u);
    EXPECT_TRUE(p.rules[0].is_fact());
    EXPECT_EQ(p.rules[0].head[0].args[0].kind, Term::Kind::Interval);
}

TEST(Parser, ArithmeticPrecedence) {
    const Program p = parse_program("p(X+2*Y) :- q(X,Y).");
    const Term& t = p.rules[0].head[0].args[0];
    ASSERT_EQ(t.kind, Term::Kind::Arithmetic);
    EXPECT_EQ(t.op, ArithOp::Add);
    EXPECT_EQ(t.args[1].op, ArithOp::Mul);
}

TEST(Parser, ReportsPosition) {
    try {
        parse_program("p(a).\np(X) :- q(X.");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.span().line, 2u);
    }
}

TEST(Parser, RejectsAggregates) { EXPECT_THROW(parse_program("p(X) :- #count{X}."), UnsupportedFeature); }

TEST(Ast, VariablesOfRunningRule) {
    const Rule r = parse_program("p(X,Y,Z,S) :- s(S), a(X,Y,S-1), c(D,Y,Z), f(X,P,S-1), P>=D.").rules[0];
    EXPECT_EQ(variable_sets(r).all, (VariableSet{"X", "Y", "Z", "S", "D", "P"}));
    EXPECT_EQ(binding_variables(r.body[1].atom), (VariableSet{"X", "Y"}));
    EXPECT_EQ(arithmetic_variables(r.body[1].atom), (VariableSet{"S"}));
}

TEST(Ast, Safety) {
    EXPECT_TRUE(safety_check(parse_program("p(X) :- q(X), X>1.").rules[0]).safe);
    EXPECT_TRUE(safety_check(parse_program("p(Y) :- q(X), Y=X+1.").rules[0]).safe);
    const SafetyReport bad = safety_check(parse_program("p(X) :- q(Y), not r(Z).").rules[0]);
    EXPECT_FALSE(bad.safe);
    EXPECT_EQ(bad.unsafe_variables, (VariableSet{"X", "Z"}));
    // an anonymous variable under negation has nothing to bind it
    EXPECT_FALSE(safety_check(parse_program("p(X) :- q(X), not r(X,_).").rules[0]).safe);
}

TEST(Ast, AnonymousVariablesGetDistinctNames) {
    const Rule r = name_anonymous_variables(parse_program("p :- q(_,_).").rules[0]);
    const auto& args = r.body[0].atom.args;
    EXPECT_NE(args[0].name, args[1].name);
    EXPECT_TRUE(is_internal_anonymous(args[0].name));
}

TEST(Ast, EvaluationOrderRunsFiltersEarly) {
    const Rule r = parse_program("p(X) :- q(X), r(Y), X>1, s(X,Y).").rules[0];
    EXPECT_EQ(evaluation_order(r), (std::vector<std::size_t>{0, 2, 1, 3}));
}
