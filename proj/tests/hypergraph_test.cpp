#include <gtest/gtest.h>

#include <random>

#include "smartground/hypergraph.hpp"
#include "smartground/parser.hpp"
#include "support.hpp"

using namespace smartground;

namespace {

Rule running_rule() { return parse_program(fixtures::kRunningRule).rules[0]; }

std::set<std::set<std::string>> edge_names(const Hypergraph& hg) {
    std::set<std::set<std::string>> out;
    for (const auto& e : hg.edges) {
        std::set<std::string> names;
        for (auto v : e.vertices) names.insert(hg.vertices[v]);
        out.insert(names);
    }
    return out;
}

std::set<std::set<std::string>> bag_sets(const TreeDecomposition& td) {
    std::set<std::set<std::string>> out;
    for (std::size_t i = 0; i < td.bags.size(); ++i) out.insert(td.bag_names(i));
    return out;
}

}  // namespace

TEST(Hypergraph, RunningRule) {
    const Hypergraph hg = to_hypergraph(running_rule());
    EXPECT_EQ(std::set<std::string>(hg.vertices.begin(), hg.vertices.end()),
              (std::set<std::string>{"X", "Y", "Z", "S", "D", "P"}));
    EXPECT_EQ(edge_names(hg), (std::set<std::set<std::string>>{
                                  {"S"}, {"X", "Y", "S"}, {"D", "Y", "Z"}, {"X", "P", "S"}, {"P", "D"}, {"X", "Y", "Z", "S"}}));
    EXPECT_EQ(hg.body_literal_count, 5u);
}

TEST(Hypergraph, GroundLiteralsAreSetAside) {
    const Hypergraph hg = to_hypergraph(parse_program("p(X) :- q(X), r(1), not s.").rules[0]);
    EXPECT_EQ(hg.ground_literals, (std::vector<std::size_t>{1, 2}));
}

TEST(Hypergraph, MinFillReachesTwoBagSplit) {
    const Hypergraph hg = to_hypergraph(running_rule());
    const std::set<std::set<std::string>> td1{{"P", "Y", "Z", "S", "X"}, {"D", "P", "Y", "Z"}};
    bool found = false;
    for (std::uint64_t seed = 0; seed < 64 && !found; ++seed) {
        TreeDecompositionGenerator gen(hg, {OrderingHeuristic::MinFill, seed});
        while (auto td = gen.next()) found = found || bag_sets(*td) == td1;
    }
    EXPECT_TRUE(found);
}

TEST(Hypergraph, ValidateAcceptsTwoBagSplit) {
    const Hypergraph hg = to_hypergraph(running_rule());
    const auto td1 = TreeDecomposition::from_named_bags(hg, {{"P", "Y", "Z", "S", "X"}, {"D", "P", "Y", "Z"}}, {{0, 1}});
    EXPECT_TRUE(validate_td(hg, td1));
    EXPECT_EQ(td1.width(), 4u);
}

TEST(Hypergraph, ValidateRejectsBrokenDecompositions) {
    const Hypergraph hg = to_hypergraph(running_rule());
    // {P,D} not covered
    EXPECT_FALSE(validate_td(hg, TreeDecomposition::from_named_bags(
                                     hg, {{"P", "Y", "Z", "S", "X"}, {"D", "Y", "Z"}}, {{0, 1}})));
    // Y's bags disconnected
    EXPECT_FALSE(validate_td(hg, TreeDecomposition::from_named_bags(
                                     hg, {{"X", "Y", "S", "Z"}, {"X", "P", "S", "D"}, {"D", "Y", "Z"}}, {{0, 1}, {1, 2}})));
    // not a tree
    EXPECT_FALSE(validate_td(hg, TreeDecomposition::from_named_bags(
                                     hg, {{"P", "Y", "Z", "S", "X"}, {"D", "P", "Y", "Z"}}, {})));
}

TEST(Hypergraph, OrderingsArePermutations) {
    const Hypergraph hg = to_hypergraph(running_rule());
    for (auto h : {OrderingHeuristic::MinFill, OrderingHeuristic::MinDegree, OrderingHeuristic::MaxCardinality}) {
        std::mt19937_64 rng(3);
        auto order = elimination_ordering(hg, h, rng);
        std::sort(order.begin(), order.end());
        EXPECT_EQ(order, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
    }
}

TEST(Hypergraph, ShortBodiesYieldNothing) {
    TreeDecompositionGenerator gen(to_hypergraph(parse_program("p(X) :- q(X,Y).").rules[0]), {});
    EXPECT_FALSE(gen.next());
}

TEST(Hypergraph, GeneratorDoesNotRepeat) {
    TreeDecompositionGenerator gen(to_hypergraph(running_rule()), {OrderingHeuristic::MinDegree, 5});
    std::set<std::vector<std::vector<std::size_t>>> seen;
    while (auto td = gen.next()) EXPECT_TRUE(seen.insert(td->bags).second);
    EXPECT_FALSE(seen.empty());
}

TEST(Hypergraph, HeuristicNames) {
    EXPECT_EQ(parse_heuristic("max-cardinality"), OrderingHeuristic::MaxCardinality);
    EXPECT_FALSE(parse_heuristic("treewidth"));
    EXPECT_STREQ(to_string(OrderingHeuristic::MinFill), "min-fill");
}

TEST(HypergraphProperty, RandomRulesGiveValidDeterministicDecompositions) {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 200; ++i) {
        const Rule r = fixtures::random_rule(rng);
        const Hypergraph hg = to_hypergraph(r);
        TreeDecompositionGenerator a(hg, {OrderingHeuristic::MinFill, 42}), b(hg, {OrderingHeuristic::MinFill, 42});
        for (;;) {
            auto x = a.next();
            auto y = b.next();
            ASSERT_EQ(x.has_value(), y.has_value());
            if (!x) break;
            EXPECT_EQ(x->bags, y->bags);
            EXPECT_TRUE(validate_td(hg, *x)) << render_rule(r);
        }
    }
}
