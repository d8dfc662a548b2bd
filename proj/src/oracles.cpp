#include "smartground/oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>

#include "smartground/values.hpp"

namespace smartground {

namespace {

using Substitution = std::map<std::string, ValueId>;

void collect_constants(const Term& t, ValueStore& values, std::set<ValueId>& out) {
    switch (t.kind) {
    case Term::Kind::Integer:
    case Term::Kind::Symbol:
        out.insert(*values.intern_term(t));
        return;
    case Term::Kind::Interval:
        for (std::int64_t v = t.number; v <= t.upper; ++v) out.insert(values.integer(v));
        return;
    case Term::Kind::Function:
        if (t.is_ground()) out.insert(*values.intern_term(t));
        break;
    default:
        break;
    }
    for (const auto& a : t.args) collect_constants(a, values, out);
}

std::optional<ValueId> evaluate(const Term& t, const Substitution& sub, ValueStore& values) {
    switch (t.kind) {
    case Term::Kind::Integer:
    case Term::Kind::Symbol:
        return values.intern_term(t);
    case Term::Kind::Variable: {
        auto it = sub.find(t.name);
        if (it == sub.end()) return std::nullopt;
        return it->second;
    }
    case Term::Kind::Function: {
        std::vector<ValueId> args;
        for (const auto& a : t.args) {
            auto v = evaluate(a, sub, values);
            if (!v) return std::nullopt;
            args.push_back(*v);
        }
        return values.function(t.name, args);
    }
    case Term::Kind::Arithmetic: {
        auto l = evaluate(t.args[0], sub, values);
        auto r = l ? evaluate(t.args[1], sub, values) : std::nullopt;
        if (!r) return std::nullopt;
        if (values[*l].kind != GroundValue::Kind::Integer || values[*r].kind != GroundValue::Kind::Integer)
            return std::nullopt;
        const IntResult res = apply(t.op, values[*l].number, values[*r].number);
        if (res.status != EvalStatus::Ok) return std::nullopt;
        return values.integer(res.value);
    }
    default:
        return std::nullopt;
    }
}

std::optional<std::vector<ValueId>> evaluate_args(const Atom& atom, const Substitution& sub, ValueStore& values) {
    std::vector<ValueId> out;
    for (const auto& t : atom.args) {
        auto v = evaluate(t, sub, values);
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    return out;
}

std::string atom_text(const Atom& atom, const std::vector<ValueId>& args, const ValueStore& values) {
    std::string out = atom.predicate;
    if (args.empty()) return out;
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += values.render(args[i]);
    }
    return out + ')';
}

/// Rules over atom indices with every atom of the guess treated as given.
struct PlainRule {
    std::vector<AtomId> head;
    std::vector<AtomId> pos;
    std::vector<AtomId> neg;
};

std::vector<PlainRule> plain_rules(const GroundProgram& gp) {
    std::vector<PlainRule> out;
    for (const auto& r : gp.rules) {
        PlainRule p;
        p.head = r.head;
        for (const auto& l : r.body) (l.negative ? p.neg : p.pos).push_back(l.atom);
        out.push_back(std::move(p));
    }
    return out;
}

bool subset_of(const std::vector<AtomId>& atoms, const std::vector<char>& set) {
    return std::all_of(atoms.begin(), atoms.end(), [&](AtomId a) { return set[a] != 0; });
}

/// Minimal models of a positive, possibly disjunctive, program.
std::vector<std::vector<char>> minimal_models(const std::vector<const PlainRule*>& rules, std::size_t atom_count) {
    std::vector<std::vector<char>> models;
    std::function<void(std::vector<char>)> search = [&](std::vector<char> m) {
        const PlainRule* branch = nullptr;
        for (bool changed = true; changed;) {
            changed = false;
            branch = nullptr;
            for (const PlainRule* r : rules) {
                if (!subset_of(r->pos, m)) continue;
                if (std::any_of(r->head.begin(), r->head.end(), [&](AtomId h) { return m[h] != 0; })) continue;
                if (r->head.empty()) return;
                if (r->head.size() == 1) {
                    m[r->head.front()] = 1;
                    changed = true;
                } else if (!branch) {
                    branch = r;
                }
            }
        }
        if (!branch) {
            models.push_back(std::move(m));
            return;
        }
        for (AtomId h : branch->head) {
            auto next = m;
            next[h] = 1;
            search(std::move(next));
        }
    };
    search(std::vector<char>(atom_count, 0));

    std::vector<std::vector<char>> minimal;
    for (std::size_t i = 0; i < models.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < models.size() && !dominated; ++j) {
            if (i == j) continue;
            bool sub = true, strict = false;
            for (std::size_t a = 0; a < atom_count && sub; ++a) {
                if (models[j][a] && !models[i][a]) sub = false;
                if (!models[j][a] && models[i][a]) strict = true;
            }
            dominated = sub && (strict || j < i);
        }
        if (!dominated) minimal.push_back(models[i]);
    }
    return minimal;
}

std::vector<std::string> to_texts(const GroundProgram& gp, const std::vector<char>& m) {
    std::vector<std::string> out;
    for (std::size_t a = 0; a < m.size(); ++a)
        if (m[a]) out.push_back(gp.atoms[a]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

NaiveResult naive_ground(const Program& program, std::uint64_t max_substitutions) {
    require_safe(program);
    ValueStore values;
    std::set<ValueId> universe;
    for (const auto& r : program.rules) {
        for (const auto& h : r.head)
            for (const auto& t : h.args) collect_constants(t, values, universe);
        for (const auto& l : r.body) {
            if (l.is_comparison()) {
                collect_constants(l.lhs, values, universe);
                collect_constants(l.rhs, values, universe);
            } else {
                for (const auto& t : l.atom.args) collect_constants(t, values, universe);
            }
        }
    }

    // Interval facts are expanded up front.
    std::vector<Rule> rules;
    for (const auto& r : program.rules) {
        if (!r.is_fact() || !r.is_ground()) {
            rules.push_back(name_anonymous_variables(r));
            continue;
        }
        std::vector<Rule> expanded{r};
        for (std::size_t pos = 0; pos < r.head.front().args.size(); ++pos) {
            const Term t = r.head.front().args[pos];
            if (t.kind != Term::Kind::Interval) continue;
            std::vector<Rule> next;
            for (const auto& e : expanded)
                for (std::int64_t v = t.number; v <= t.upper; ++v) {
                    Rule copy = e;
                    copy.head.front().args[pos] = Term::integer(v);
                    next.push_back(std::move(copy));
                }
            expanded = std::move(next);
        }
        rules.insert(rules.end(), expanded.begin(), expanded.end());
    }

    std::uint64_t budget_used = 0;
    // One pass over every substitution of every rule; `sink` sees each
    // surviving instance.
    auto pass = [&](const std::function<void(const Rule&, const Substitution&)>& sink) {
        const std::vector<ValueId> u(universe.begin(), universe.end());
        std::uint64_t count = 0;
        for (const auto& rule : rules) {
            const VariableSets vs = variable_sets(rule);
            const std::vector<std::string> vars(vs.all.begin(), vs.all.end());
            Substitution sub;
            std::function<void(std::size_t)> enumerate = [&](std::size_t k) {
                if (k == vars.size()) {
                    ++count;
                    if (++budget_used > max_substitutions) throw BudgetExceeded("naive grounding budget exceeded");
                    sink(rule, sub);
                    return;
                }
                for (ValueId v : u) {
                    sub[vars[k]] = v;
                    enumerate(k + 1);
                }
                sub.erase(vars[k]);
            };
            enumerate(0);
        }
        return count;
    };

    // Close the universe under head values.
    for (;;) {
        std::set<ValueId> added;
        pass([&](const Rule& rule, const Substitution& sub) {
            for (const auto& h : rule.head)
                for (const auto& t : h.args)
                    if (auto v = evaluate(t, sub, values); v && !universe.contains(*v)) added.insert(*v);
        });
        if (added.empty()) break;
        universe.insert(added.begin(), added.end());
    }

    NaiveResult out;
    out.universe_size = universe.size();
    out.substitutions = pass([&](const Rule& rule, const Substitution& sub) {
        GroundRule g;
        for (const auto& h : rule.head) {
            auto args = evaluate_args(h, sub, values);
            if (!args) return;
            g.head.push_back(out.program.intern(atom_text(h, *args, values), h.predicate));
        }
        for (const auto& l : rule.body) {
            if (l.is_comparison()) {
                auto a = evaluate(l.lhs, sub, values);
                auto b = evaluate(l.rhs, sub, values);
                if (!a || !b || !values.satisfies(l.cmp, *a, *b)) return;
                continue;
            }
            auto args = evaluate_args(l.atom, sub, values);
            if (!args) return;
            g.body.push_back({out.program.intern(atom_text(l.atom, *args, values), l.atom.predicate), l.negative});
        }
        out.program.rules.push_back(std::move(g));
    });
    return out;
}

AnswerSets brute_force_answer_sets(const GroundProgram& gp, std::size_t max_guess_atoms) {
    const std::size_t n = gp.atoms.size();
    const auto rules = plain_rules(gp);

    // Atoms derivable when negation is ignored.
    std::vector<char> possible(n, 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& r : rules) {
            if (!subset_of(r.pos, possible)) continue;
            for (AtomId h : r.head)
                if (!possible[h]) possible[h] = changed = true;
        }
    }
    std::vector<const PlainRule*> relevant;
    std::vector<AtomId> guess;
    std::vector<char> in_guess(n, 0);
    for (const auto& r : rules) {
        if (!subset_of(r.pos, possible)) continue;
        relevant.push_back(&r);
        for (AtomId a : r.neg)
            if (possible[a] && !in_guess[a]) {
                in_guess[a] = 1;
                guess.push_back(a);
            }
    }
    if (guess.size() > max_guess_atoms) throw BudgetExceeded("too many atoms under negation for the brute-force oracle");

    AnswerSets out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << guess.size()); ++mask) {
        std::vector<char> g(n, 0);
        for (std::size_t i = 0; i < guess.size(); ++i)
            if (mask >> i & 1) g[guess[i]] = 1;
        std::vector<PlainRule> reduct;
        for (const PlainRule* r : relevant) {
            if (std::any_of(r->neg.begin(), r->neg.end(), [&](AtomId a) { return g[a] != 0; })) continue;
            reduct.push_back({r->head, r->pos, {}});
        }
        std::vector<const PlainRule*> ptrs;
        for (const auto& r : reduct) ptrs.push_back(&r);
        for (const auto& m : minimal_models(ptrs, n)) {
            bool consistent = true;
            for (AtomId a : guess)
                if ((m[a] != 0) != (g[a] != 0)) consistent = false;
            if (consistent) out.insert(to_texts(gp, m));
        }
    }
    return out;
}

AnswerSets exhaustive_answer_sets(const GroundProgram& gp, std::size_t max_atoms) {
    const std::size_t n = gp.atoms.size();
    if (n > max_atoms) throw BudgetExceeded("too many atoms for the exhaustive oracle");
    const auto rules = plain_rules(gp);
    auto is_model = [&](std::uint64_t interp, std::uint64_t reduct_by) {
        for (const auto& r : rules) {
            bool blocked = false;
            for (AtomId a : r.neg) blocked = blocked || (reduct_by >> a & 1);
            if (blocked) continue;
            bool body = true;
            for (AtomId a : r.pos) body = body && (interp >> a & 1);
            if (!body) continue;
            bool head = false;
            for (AtomId h : r.head) head = head || (interp >> h & 1);
            if (!head) return false;
        }
        return true;
    };
    AnswerSets out;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
        if (!is_model(i, i)) continue;
        bool minimal = true;
        // Proper subsets of i.
        for (std::uint64_t j = (i - 1) & i; minimal; j = (j - 1) & i) {
            if (j != i && is_model(j, i)) minimal = false;
            if (j == 0) break;
        }
        if (!minimal) continue;
        std::vector<char> m(n, 0);
        for (std::size_t a = 0; a < n; ++a) m[a] = (i >> a & 1) ? 1 : 0;
        out.insert(to_texts(gp, m));
    }
    return out;
}

AnswerSets project(const AnswerSets& sets, const std::set<std::string>& predicates) {
    AnswerSets out;
    for (const auto& s : sets) {
        std::vector<std::string> kept;
        for (const auto& atom : s) {
            const std::string name = atom.substr(0, atom.find('('));
            if (predicates.contains(name)) kept.push_back(atom);
        }
        out.insert(std::move(kept));
    }
    return out;
}

}  // namespace smartground
