#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smartground/ast.hpp"

namespace smartground {

struct Hyperedge {
    std::vector<std::size_t> vertices;       // sorted, unique
    std::vector<std::size_t> body_literals;  // indices into Rule::body
    bool head = false;
};

/// Variables as vertices, one hyperedge per variable-carrying body literal
/// plus one edge holding all head variables.
struct Hypergraph {
    std::vector<std::string> vertices;
    std::vector<Hyperedge> edges;
    /// Body literals without variables; they join the root rule on rewrite.
    std::vector<std::size_t> ground_literals;
    std::size_t body_literal_count = 0;

    std::optional<std::size_t> vertex_index(std::string_view name) const;
};

/// Anonymous variables are named first, so each `_` becomes its own vertex.
Hypergraph to_hypergraph(const Rule& rule);

struct TreeDecomposition {
    std::vector<std::string> vertices;
    std::vector<std::vector<std::size_t>> bags;  // sorted vertex indices
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::size_t width() const;
    std::set<std::string> bag_names(std::size_t node) const;

    /// Builds a decomposition over `hg`'s vertex numbering from named bags.
    static TreeDecomposition from_named_bags(const Hypergraph& hg,
                                             const std::vector<std::vector<std::string>>& bags,
                                             std::vector<std::pair<std::size_t, std::size_t>> edges);
};

enum class OrderingHeuristic : std::uint8_t { MinFill, MinDegree, MaxCardinality };

std::optional<OrderingHeuristic> parse_heuristic(std::string_view name);
const char* to_string(OrderingHeuristic heuristic);

struct TDConfig {
    OrderingHeuristic heuristic = OrderingHeuristic::MinFill;
    std::uint64_t seed = 0;
};

/// Elimination ordering with ties broken uniformly at random by `rng`.
std::vector<std::size_t> elimination_ordering(const Hypergraph& hg, OrderingHeuristic heuristic,
                                              std::mt19937_64& rng);

/// Bucket elimination along `order`, followed by absorbing every bag that
/// is contained in a neighbouring one.
TreeDecomposition decomposition_from_ordering(const Hypergraph& hg, std::span<const std::size_t> order);

/// Coverage of every hyperedge, connectedness of every vertex, and the
/// bag graph being a tree.
bool validate_td(const Hypergraph& hg, const TreeDecomposition& td);

/// Lazily yields decompositions, each from a fresh seeded tie-breaking.
/// Repeats of an earlier decomposition are skipped; after a few repeats in
/// a row the sequence ends. Rules with at most one body literal yield
/// nothing.
class TreeDecompositionGenerator {
public:
    TreeDecompositionGenerator(Hypergraph hg, TDConfig config);

    std::optional<TreeDecomposition> next();
    const Hypergraph& hypergraph() const { return hg_; }

private:
    static constexpr std::size_t kMaxRepeats = 8;

    Hypergraph hg_;
    TDConfig config_;
    std::uint64_t attempt_ = 0;
    bool exhausted_ = false;
    std::set<std::vector<std::vector<std::size_t>>> seen_;
};

}  // namespace smartground
