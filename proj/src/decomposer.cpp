#include "smartground/decomposer.hpp"

#include "smartground/parser.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>

namespace smartground {

std::string FreshNamer::next_name() {
    for (;;) {
        std::string name = "fresh_pred_" + std::to_string(next_++);
        if (!reserved_.contains(name)) return name;
    }
}

std::set<std::string> predicate_names(const Program& program) {
    std::set<std::string> out;
    for (const auto& key : program.predicates()) out.insert(key.name);
    return out;
}

bool RuleDecomposition::is_fresh(const PredicateKey& key) const {
    return creation_index(key).has_value();
}

std::optional<std::size_t> RuleDecomposition::creation_index(const PredicateKey& key) const {
    for (const auto& f : fresh)
        if (f.name == key.name && f.arity == key.arity) return f.creation_index;
    return std::nullopt;
}

std::vector<Rule> RuleDecomposition::ordered_rules() const {
    std::vector<Rule> out;
    out.reserve(order.size());
    for (std::size_t i : order) out.push_back(rules[i]);
    return out;
}

namespace {

VariableSet literal_variables(const Literal& lit) {
    VariableSet out;
    collect_variables(lit, out);
    return out;
}

bool subset(const VariableSet& a, const VariableSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Atom variable_atom(const std::string& name, const VariableSet& vars) {
    Atom a;
    a.predicate = name;
    for (const auto& v : vars) a.args.push_back(Term::variable(v));
    return a;
}

void count_occurrences(const Term& t, std::map<std::string, std::size_t>& counts) {
    if (t.kind == Term::Kind::Variable) ++counts[t.name];
    for (const auto& a : t.args) count_occurrences(a, counts);
}

/// Variables used exactly once, directly as an argument of a positive atom,
/// become `_`.
Rule anonymize_singletons(Rule rule) {
    std::map<std::string, std::size_t> counts;
    for (const auto& h : rule.head)
        for (const auto& t : h.args) count_occurrences(t, counts);
    for (const auto& l : rule.body) {
        if (l.is_comparison()) {
            count_occurrences(l.lhs, counts);
            count_occurrences(l.rhs, counts);
        } else {
            for (const auto& t : l.atom.args) count_occurrences(t, counts);
        }
    }
    for (auto& l : rule.body) {
        if (!l.is_positive_atom()) continue;
        for (auto& t : l.atom.args)
            if (t.kind == Term::Kind::Variable && counts[t.name] == 1) t = Term::anonymous();
    }
    return rule;
}

bool has_arithmetic(const Atom& atom) {
    return std::any_of(atom.args.begin(), atom.args.end(), [](const Term& t) { return t.contains_arithmetic(); });
}

}  // namespace

SafetyRepair restore_safety(const Rule& partial, const Rule& origin_in, FreshNamer& namer, const StatsView* stats) {
    const SafetyReport report = safety_check(partial);
    if (report.safe) return {partial, std::nullopt};
    if (report.unsafe_variables.contains("_"))
        throw InternalError("anonymous variable left unnamed in decomposed rule");

    const Rule origin = name_anonymous_variables(origin_in);
    const VariableSet& needed = report.unsafe_variables;
    std::set<std::size_t> chosen;

    auto pick_binder = [&](const std::string& v) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        double best_size = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < origin.body.size(); ++i) {
            const auto& l = origin.body[i];
            if (!l.is_positive_atom() || has_arithmetic(l.atom) || !binding_variables(l.atom).contains(v)) continue;
            double size = std::numeric_limits<double>::infinity();
            if (stats)
                if (auto s = stats->lookup(l.atom.key())) size = s->size;
            if (!best || size < best_size) {
                best = i;
                best_size = size;
            }
        }
        if (best) return best;
        for (std::size_t i = 0; i < origin.body.size(); ++i) {
            const auto& l = origin.body[i];
            if (l.is_positive_atom() && binding_variables(l.atom).contains(v)) return i;
        }
        for (std::size_t i = 0; i < origin.body.size(); ++i) {
            const auto& l = origin.body[i];
            if (!l.is_comparison() || l.cmp != CmpOp::Eq) continue;
            if ((l.lhs.is_variable() && l.lhs.name == v) || (l.rhs.is_variable() && l.rhs.name == v)) return i;
        }
        return std::nullopt;
    };

    auto saviour_rule = [&](const Atom& head) {
        Rule r;
        r.head.push_back(head);
        for (std::size_t i : chosen) r.body.push_back(origin.body[i]);
        return r;
    };

    const Atom probe = variable_atom("saviour", needed);
    for (;;) {
        const SafetyReport s = safety_check(saviour_rule(probe));
        if (s.safe) break;
        bool progressed = false;
        for (const auto& v : s.unsafe_variables) {
            auto binder = pick_binder(v);
            if (binder && chosen.insert(*binder).second) {
                progressed = true;
                break;
            }
        }
        if (!progressed) throw InternalError("cannot restore safety of " + render_rule(partial));
    }

    const Atom fresh = variable_atom(namer.next_name(), needed);
    SafetyRepair out;
    out.rule = partial;
    out.rule.body.push_back(Literal::positive(fresh));
    out.saviour = saviour_rule(fresh);
    return out;
}

RuleDecomposition to_rules(const TreeDecomposition& td, const Rule& input, FreshNamer& namer,
                           const StatsView* stats) {
    const Rule rule = name_anonymous_variables(input);
    const std::size_t n = td.bags.size();
    if (n <= 1) throw DecompositionDegenerate();

    std::vector<VariableSet> bags(n);
    for (std::size_t t = 0; t < n; ++t) bags[t] = td.bag_names(t);
    VariableSet head_vars;
    for (const auto& h : rule.head) collect_variables(h, head_vars);

    std::size_t root = n;
    for (std::size_t t = 0; t < n && root == n; ++t)
        if (subset(head_vars, bags[t])) root = t;
    if (root == n) throw InternalError("no bag covers the head variables");

    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [a, b] : td.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    std::vector<std::size_t> depth(n, 0), parent(n, n), bfs;
    std::vector<std::vector<std::size_t>> children(n);
    {
        std::vector<char> seen(n, 0);
        std::deque<std::size_t> queue{root};
        seen[root] = 1;
        while (!queue.empty()) {
            const std::size_t x = queue.front();
            queue.pop_front();
            bfs.push_back(x);
            for (std::size_t y : adj[x]) {
                if (seen[y]) continue;
                seen[y] = 1;
                parent[y] = x;
                depth[y] = depth[x] + 1;
                children[x].push_back(y);
                queue.push_back(y);
            }
        }
        if (bfs.size() != n) throw InternalError("tree decomposition is not connected");
    }
    // in_subtree[v][t]: t lies in the subtree rooted at v.
    std::vector<std::vector<char>> in_subtree(n, std::vector<char>(n, 0));
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t x = t; x != n; x = parent[x]) in_subtree[x][t] = 1;

    const std::size_t m = rule.body.size();
    std::vector<VariableSet> lit_vars(m);
    for (std::size_t i = 0; i < m; ++i) lit_vars[i] = literal_variables(rule.body[i]);

    constexpr std::size_t unplaced = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> place(m, unplaced);
    auto deepest_cover = [&](const VariableSet& vars) {
        std::size_t best = unplaced;
        for (std::size_t t = 0; t < n; ++t)
            if (subset(vars, bags[t]) && (best == unplaced || depth[t] > depth[best])) best = t;
        if (best == unplaced) throw InternalError("literal not covered by any bag");
        return best;
    };
    for (std::size_t i = 0; i < m; ++i) {
        if (rule.body[i].is_comparison()) continue;
        place[i] = lit_vars[i].empty() ? root : deepest_cover(lit_vars[i]);
    }

    auto compute_links = [&] {
        std::vector<VariableSet> links(n);
        for (std::size_t v = 0; v < n; ++v) {
            if (v == root) continue;
            VariableSet inside, outside = head_vars;
            for (std::size_t i = 0; i < m; ++i) {
                if (place[i] == unplaced) continue;
                auto& target = in_subtree[v][place[i]] ? inside : outside;
                target.insert(lit_vars[i].begin(), lit_vars[i].end());
            }
            for (const auto& x : inside)
                if (outside.contains(x)) links[v].insert(x);
        }
        return links;
    };

    auto links = compute_links();
    for (std::size_t i = 0; i < m; ++i) {
        if (!rule.body[i].is_comparison()) continue;
        if (lit_vars[i].empty()) {
            place[i] = root;
            continue;
        }
        for (std::size_t t : bfs) {
            VariableSet avail = links[t];
            if (t == root) avail.insert(head_vars.begin(), head_vars.end());
            for (std::size_t c : children[t]) avail.insert(links[c].begin(), links[c].end());
            for (std::size_t j = 0; j < m; ++j)
                if (j != i && place[j] == t) avail.insert(lit_vars[j].begin(), lit_vars[j].end());
            if (subset(lit_vars[i], avail)) {
                place[i] = t;
                break;
            }
        }
        if (place[i] == unplaced) place[i] = deepest_cover(lit_vars[i]);
    }
    links = compute_links();

    std::vector<char> kept(n, 0), own(n, 0);
    for (std::size_t i = 0; i < m; ++i) {
        own[place[i]] = 1;
        for (std::size_t x = place[i]; x != n; x = parent[x]) kept[x] = 1;
    }
    kept[root] = 1;
    if (std::count(own.begin(), own.end(), 1) < 2) throw DecompositionDegenerate();

    RuleDecomposition rd;
    rd.origin = input;
    std::vector<Atom> link_atom(n);
    std::size_t created = 0;
    std::vector<std::size_t> link_creation(n, 0);
    for (std::size_t t : bfs) {
        if (t == root || !kept[t]) continue;
        link_atom[t] = variable_atom(namer.next_name(), links[t]);
        link_creation[t] = created++;
    }

    for (std::size_t t : bfs) {
        if (!kept[t]) continue;
        Rule partial;
        if (t == root) partial.head = rule.head;
        else partial.head.push_back(link_atom[t]);
        for (std::size_t i = 0; i < m; ++i)
            if (place[i] == t) partial.body.push_back(rule.body[i]);
        for (std::size_t c : children[t])
            if (kept[c]) partial.body.push_back(Literal::positive(link_atom[c]));

        SafetyRepair repair = restore_safety(partial, rule, namer, stats);
        if (t != root)
            rd.fresh.push_back({link_atom[t].predicate, link_atom[t].args.size(), rd.rules.size(), link_creation[t]});
        rd.rules.push_back(std::move(repair.rule));
        if (repair.saviour) {
            const Atom& head = repair.saviour->head.front();
            rd.fresh.push_back({head.predicate, head.args.size(), rd.rules.size(), created++});
            rd.rules.push_back(std::move(*repair.saviour));
        }
    }
    for (auto& r : rd.rules) r = anonymize_singletons(std::move(r));
    rd.order = grounding_order(rd);
    return rd;
}

std::vector<std::size_t> grounding_order(const RuleDecomposition& rd) {
    const std::size_t n = rd.rules.size();
    constexpr std::size_t last = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> key(n, last);
    std::map<PredicateKey, std::size_t> definer;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = rd.rules[i];
        if (r.head.size() == 1)
            if (auto c = rd.creation_index(r.head.front().key())) {
                key[i] = *c;
                definer[r.head.front().key()] = i;
            }
    }
    std::vector<std::set<std::size_t>> deps(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& l : rd.rules[i].body)
            if (l.kind == Literal::Kind::Atom)
                if (auto it = definer.find(l.atom.key()); it != definer.end() && it->second != i)
                    deps[i].insert(it->second);

    std::vector<std::size_t> order;
    std::vector<char> done(n, 0);
    while (order.size() < n) {
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            const bool ready = std::all_of(deps[i].begin(), deps[i].end(), [&](std::size_t d) { return done[d]; });
            if (ready && (pick == n || key[i] < key[pick])) pick = i;
        }
        if (pick == n) throw InternalError("cyclic dependency inside a rule decomposition");
        done[pick] = 1;
        order.push_back(pick);
    }
    return order;
}

}  // namespace smartground
