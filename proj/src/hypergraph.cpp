#include "smartground/hypergraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace smartground {

std::optional<std::size_t> Hypergraph::vertex_index(std::string_view name) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i] == name) return i;
    return std::nullopt;
}

namespace {

void ordered_variables(const Term& term, std::vector<std::string>& out) {
    if (term.kind == Term::Kind::Variable) {
        if (std::find(out.begin(), out.end(), term.name) == out.end()) out.push_back(term.name);
        return;
    }
    for (const auto& a : term.args) ordered_variables(a, out);
}

void ordered_variables(const Literal& lit, std::vector<std::string>& out) {
    if (lit.is_comparison()) {
        ordered_variables(lit.lhs, out);
        ordered_variables(lit.rhs, out);
    } else {
        for (const auto& t : lit.atom.args) ordered_variables(t, out);
    }
}

using Adjacency = std::vector<std::vector<char>>;

Adjacency primal_graph(const Hypergraph& hg) {
    const std::size_t n = hg.vertices.size();
    Adjacency adj(n, std::vector<char>(n, 0));
    for (const auto& e : hg.edges)
        for (std::size_t a : e.vertices)
            for (std::size_t b : e.vertices)
                if (a != b) adj[a][b] = 1;
    return adj;
}

std::vector<std::size_t> live_neighbours(const Adjacency& adj, const std::vector<char>& alive, std::size_t v) {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < adj.size(); ++u)
        if (alive[u] && adj[v][u]) out.push_back(u);
    return out;
}

void eliminate(Adjacency& adj, std::vector<char>& alive, std::size_t v) {
    const auto nb = live_neighbours(adj, alive, v);
    for (std::size_t a : nb)
        for (std::size_t b : nb)
            if (a != b) adj[a][b] = 1;
    alive[v] = 0;
}

std::size_t pick(const std::vector<std::size_t>& ties, std::mt19937_64& rng) {
    return ties.size() == 1 ? ties.front() : ties[rng() % ties.size()];
}

std::vector<std::size_t> max_cardinality_order(const Hypergraph& hg, std::mt19937_64& rng) {
    const std::size_t n = hg.vertices.size();
    const Adjacency adj = primal_graph(hg);
    std::vector<char> numbered(n, 0);
    std::vector<std::size_t> weight(n, 0);
    std::vector<std::size_t> visit;
    visit.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = 0;
        std::vector<std::size_t> ties;
        for (std::size_t v = 0; v < n; ++v) {
            if (numbered[v]) continue;
            if (ties.empty() || weight[v] > best) {
                best = weight[v];
                ties.assign(1, v);
            } else if (weight[v] == best) {
                ties.push_back(v);
            }
        }
        const std::size_t v = pick(ties, rng);
        numbered[v] = 1;
        visit.push_back(v);
        for (std::size_t u = 0; u < n; ++u)
            if (!numbered[u] && adj[v][u]) ++weight[u];
    }
    std::reverse(visit.begin(), visit.end());
    return visit;
}

}  // namespace

Hypergraph to_hypergraph(const Rule& input) {
    const Rule rule = name_anonymous_variables(input);
    Hypergraph hg;
    hg.body_literal_count = rule.body.size();

    std::vector<std::string> order;
    for (const auto& l : rule.body) ordered_variables(l, order);
    for (const auto& h : rule.head)
        for (const auto& t : h.args) ordered_variables(t, order);
    hg.vertices = order;

    auto index_of = [&](const std::string& v) {
        return static_cast<std::size_t>(std::find(order.begin(), order.end(), v) - order.begin());
    };

    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        VariableSet vs;
        collect_variables(rule.body[i], vs);
        if (vs.empty()) {
            hg.ground_literals.push_back(i);
            continue;
        }
        Hyperedge e;
        for (const auto& v : vs) e.vertices.push_back(index_of(v));
        std::sort(e.vertices.begin(), e.vertices.end());
        e.body_literals.push_back(i);
        hg.edges.push_back(std::move(e));
    }

    VariableSet head_vars;
    for (const auto& h : rule.head) collect_variables(h, head_vars);
    if (!head_vars.empty()) {
        Hyperedge e;
        e.head = true;
        for (const auto& v : head_vars) e.vertices.push_back(index_of(v));
        std::sort(e.vertices.begin(), e.vertices.end());
        hg.edges.push_back(std::move(e));
    }
    return hg;
}

std::size_t TreeDecomposition::width() const {
    std::size_t w = 0;
    for (const auto& b : bags) w = std::max(w, b.size());
    return w == 0 ? 0 : w - 1;
}

std::set<std::string> TreeDecomposition::bag_names(std::size_t node) const {
    std::set<std::string> out;
    for (std::size_t v : bags[node]) out.insert(vertices[v]);
    return out;
}

TreeDecomposition TreeDecomposition::from_named_bags(const Hypergraph& hg,
                                                     const std::vector<std::vector<std::string>>& named,
                                                     std::vector<std::pair<std::size_t, std::size_t>> edges) {
    TreeDecomposition td;
    td.vertices = hg.vertices;
    for (const auto& names : named) {
        std::vector<std::size_t> bag;
        for (const auto& n : names) {
            auto idx = hg.vertex_index(n);
            if (!idx) {
                td.vertices.push_back(n);
                idx = td.vertices.size() - 1;
            }
            bag.push_back(*idx);
        }
        std::sort(bag.begin(), bag.end());
        bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
        td.bags.push_back(std::move(bag));
    }
    td.edges = std::move(edges);
    return td;
}

std::optional<OrderingHeuristic> parse_heuristic(std::string_view name) {
    if (name == "min-fill") return OrderingHeuristic::MinFill;
    if (name == "min-degree") return OrderingHeuristic::MinDegree;
    if (name == "max-cardinality") return OrderingHeuristic::MaxCardinality;
    return std::nullopt;
}

const char* to_string(OrderingHeuristic heuristic) {
    switch (heuristic) {
    case OrderingHeuristic::MinFill: return "min-fill";
    case OrderingHeuristic::MinDegree: return "min-degree";
    case OrderingHeuristic::MaxCardinality: return "max-cardinality";
    }
    return "?";
}

std::vector<std::size_t> elimination_ordering(const Hypergraph& hg, OrderingHeuristic heuristic,
                                              std::mt19937_64& rng) {
    if (heuristic == OrderingHeuristic::MaxCardinality) return max_cardinality_order(hg, rng);

    const std::size_t n = hg.vertices.size();
    Adjacency adj = primal_graph(hg);
    std::vector<char> alive(n, 1);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = 0;
        std::vector<std::size_t> ties;
        for (std::size_t v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            const auto nb = live_neighbours(adj, alive, v);
            std::size_t score = 0;
            if (heuristic == OrderingHeuristic::MinDegree) {
                score = nb.size();
            } else {
                for (std::size_t i = 0; i < nb.size(); ++i)
                    for (std::size_t j = i + 1; j < nb.size(); ++j)
                        if (!adj[nb[i]][nb[j]]) ++score;
            }
            if (ties.empty() || score < best) {
                best = score;
                ties.assign(1, v);
            } else if (score == best) {
                ties.push_back(v);
            }
        }
        const std::size_t v = pick(ties, rng);
        order.push_back(v);
        eliminate(adj, alive, v);
    }
    return order;
}

TreeDecomposition decomposition_from_ordering(const Hypergraph& hg, std::span<const std::size_t> order) {
    const std::size_t n = hg.vertices.size();
    TreeDecomposition td;
    td.vertices = hg.vertices;
    if (n == 0) return td;

    Adjacency adj = primal_graph(hg);
    std::vector<char> alive(n, 1);
    std::vector<std::size_t> position(n, 0);
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

    std::vector<std::vector<std::size_t>> bags(n);
    std::vector<std::optional<std::size_t>> parent(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t v = order[i];
        auto nb = live_neighbours(adj, alive, v);
        bags[i] = nb;
        bags[i].push_back(v);
        std::sort(bags[i].begin(), bags[i].end());
        if (!nb.empty()) {
            std::size_t next = position[nb.front()];
            for (std::size_t u : nb) next = std::min(next, position[u]);
            parent[i] = next;
        }
        eliminate(adj, alive, v);
    }
    // Separate components hang off the last bag; their separators are empty.
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!parent[i]) parent[i] = n - 1;

    std::vector<std::set<std::size_t>> nbrs(n);
    for (std::size_t i = 0; i < n; ++i)
        if (parent[i]) {
            nbrs[i].insert(*parent[i]);
            nbrs[*parent[i]].insert(i);
        }
    std::vector<char> present(n, 1);
    auto absorb = [&](std::size_t from, std::size_t into) {
        for (std::size_t x : nbrs[from]) {
            nbrs[x].erase(from);
            if (x != into) {
                nbrs[x].insert(into);
                nbrs[into].insert(x);
            }
        }
        nbrs[from].clear();
        present[from] = 0;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t a = 0; a < n && !changed; ++a) {
            if (!present[a]) continue;
            for (std::size_t b : nbrs[a]) {
                if (std::includes(bags[b].begin(), bags[b].end(), bags[a].begin(), bags[a].end())) {
                    absorb(a, b);
                    changed = true;
                    break;
                }
                if (std::includes(bags[a].begin(), bags[a].end(), bags[b].begin(), bags[b].end())) {
                    absorb(b, a);
                    changed = true;
                    break;
                }
            }
        }
    }

    std::vector<std::size_t> renumber(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!present[i]) continue;
        renumber[i] = td.bags.size();
        td.bags.push_back(bags[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!present[i]) continue;
        for (std::size_t j : nbrs[i])
            if (i < j) td.edges.emplace_back(renumber[i], renumber[j]);
    }
    std::sort(td.edges.begin(), td.edges.end());
    return td;
}

bool validate_td(const Hypergraph& hg, const TreeDecomposition& td) {
    const std::size_t nodes = td.bags.size();
    if (nodes == 0) return hg.edges.empty();
    if (td.edges.size() != nodes - 1) return false;

    std::vector<std::vector<std::size_t>> adj(nodes);
    for (auto [a, b] : td.edges) {
        if (a >= nodes || b >= nodes || a == b) return false;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    auto reach = [&](std::size_t start, const std::vector<char>& allowed) {
        std::vector<char> seen(nodes, 0);
        std::deque<std::size_t> queue{start};
        seen[start] = 1;
        std::size_t count = 1;
        while (!queue.empty()) {
            const std::size_t x = queue.front();
            queue.pop_front();
            for (std::size_t y : adj[x]) {
                if (seen[y] || !allowed[y]) continue;
                seen[y] = 1;
                ++count;
                queue.push_back(y);
            }
        }
        return count;
    };
    if (reach(0, std::vector<char>(nodes, 1)) != nodes) return false;

    // Bags refer to td.vertices; map them onto the hypergraph by name.
    std::vector<std::set<std::string>> named(nodes);
    for (std::size_t t = 0; t < nodes; ++t) {
        for (std::size_t v : td.bags[t]) {
            if (v >= td.vertices.size()) return false;
            named[t].insert(td.vertices[v]);
        }
    }
    for (const auto& e : hg.edges) {
        bool covered = false;
        for (std::size_t t = 0; t < nodes && !covered; ++t) {
            covered = std::all_of(e.vertices.begin(), e.vertices.end(),
                                  [&](std::size_t v) { return named[t].contains(hg.vertices[v]); });
        }
        if (!covered) return false;
    }
    std::set<std::string> all_names;
    for (const auto& b : named) all_names.insert(b.begin(), b.end());
    for (const auto& v : all_names) {
        std::vector<char> holds(nodes, 0);
        std::size_t first = nodes;
        std::size_t count = 0;
        for (std::size_t t = 0; t < nodes; ++t) {
            if (named[t].contains(v)) {
                holds[t] = 1;
                ++count;
                if (first == nodes) first = t;
            }
        }
        if (reach(first, holds) != count) return false;
    }
    return true;
}

TreeDecompositionGenerator::TreeDecompositionGenerator(Hypergraph hg, TDConfig config)
    : hg_(std::move(hg)), config_(config) {
    if (hg_.vertices.empty() || hg_.body_literal_count <= 1) exhausted_ = true;
}

std::optional<TreeDecomposition> TreeDecompositionGenerator::next() {
    if (exhausted_) return std::nullopt;
    for (std::size_t repeat = 0; repeat < kMaxRepeats; ++repeat) {
        std::mt19937_64 rng(config_.seed + 0x9E3779B97F4A7C15ULL * attempt_++);
        const auto order = elimination_ordering(hg_, config_.heuristic, rng);
        auto td = decomposition_from_ordering(hg_, order);
        auto key = td.bags;
        std::sort(key.begin(), key.end());
        if (seen_.insert(std::move(key)).second) return td;
    }
    exhausted_ = true;
    return std::nullopt;
}

}  // namespace smartground
