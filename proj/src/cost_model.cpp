#include "smartground/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "smartground/parser.hpp"
#include "smartground/values.hpp"

namespace smartground {

double clamp_cost(double value) {
    if (std::isnan(value)) return kMaxCost;
    return std::clamp(value, kMinCost, kMaxCost);
}

namespace {

VariableSet term_variables(const Term& t) {
    VariableSet out;
    collect_variables(t, out);
    return out;
}

VariableSet atom_variables(const Atom& a) {
    VariableSet out;
    collect_variables(a, out);
    return out;
}

double at_least_one(double v) { return v < 1 ? 1 : v; }

/// `X = t` or `t = X` where X is not yet bound and t only uses bound ones.
std::optional<std::pair<std::string, VariableSet>> assignment(const Literal& lit,
                                                              const std::function<bool(const std::string&)>& bound) {
    if (!lit.is_comparison() || lit.cmp != CmpOp::Eq) return std::nullopt;
    auto try_side = [&](const Term& target, const Term& source) -> std::optional<std::pair<std::string, VariableSet>> {
        if (!target.is_variable() || bound(target.name)) return std::nullopt;
        VariableSet src = term_variables(source);
        if (!std::all_of(src.begin(), src.end(), bound)) return std::nullopt;
        return std::make_pair(target.name, std::move(src));
    };
    if (auto a = try_side(lit.lhs, lit.rhs)) return a;
    return try_side(lit.rhs, lit.lhs);
}

}  // namespace

double variable_selectivity(const Atom& atom, const PredicateStats& stats, const std::string& variable) {
    std::optional<double> best;
    for (std::size_t i = 0; i < atom.args.size() && i < stats.selectivity.size(); ++i) {
        const VariableSet vars = term_variables(atom.args[i]);
        if (vars.size() == 1 && vars.contains(variable)) best = best ? std::min(*best, stats.selectivity[i]) : stats.selectivity[i];
    }
    return best ? *best : stats.size;
}

std::optional<std::size_t> choose_index_position(const std::vector<Term>& args,
                                                 const std::function<bool(const std::string&)>& is_bound,
                                                 std::span<const double> selectivity) {
    std::optional<std::size_t> best;
    double best_v = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const Term& t = args[i];
        bool usable = false;
        if (t.is_variable()) {
            usable = is_bound(t.name);
        } else if (t.kind == Term::Kind::Arithmetic) {
            const VariableSet vars = term_variables(t);
            usable = vars.size() == 1 && is_bound(*vars.begin());
        }
        if (!usable) continue;
        const double v = i < selectivity.size() ? selectivity[i] : 0;
        if (!best || v > best_v) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

DomainMap rule_domains(const Rule& rule, const StatsView& stats) {
    DomainMap dom;
    for (const auto& lit : rule.body) {
        if (!lit.is_positive_atom()) continue;
        auto ps = stats.lookup(lit.atom.key());
        if (!ps) continue;
        for (const auto& x : atom_variables(lit.atom)) {
            const double v = variable_selectivity(lit.atom, *ps, x);
            auto [it, inserted] = dom.emplace(x, v);
            if (!inserted) it->second = std::max(it->second, v);
        }
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& lit : rule.body) {
            auto a = assignment(lit, [&](const std::string& v) { return dom.contains(v); });
            if (!a) continue;
            double d = 1;
            for (const auto& src : a->second) d *= at_least_one(dom[src]);
            dom[a->first] = std::min(d, kMaxCost);
            changed = true;
        }
    }
    return dom;
}

double join_step(const JoinState& state, const Atom& atom, const PredicateStats& stats, const DomainMap& dom,
                 std::optional<std::size_t>* index_position) {
    const auto idx = choose_index_position(
        atom.args, [&](const std::string& v) { return state.binds(v); }, stats.selectivity);
    if (index_position) *index_position = idx;
    if (stats.size <= 0) return 0;
    double step = stats.size;
    if (idx) step /= at_least_one(stats.selectivity[*idx]);
    for (const auto& x : atom_variables(atom)) {
        auto it = state.selectivity.find(x);
        if (it == state.selectivity.end()) continue;
        auto d = dom.find(x);
        step *= it->second / at_least_one(d == dom.end() ? 1 : d->second);
    }
    return step;
}

JoinState propagate_selectivity(JoinState state, const Atom& atom, const PredicateStats& stats, const DomainMap& dom) {
    std::map<std::string, double> next = state.selectivity;
    for (const auto& x : atom_variables(atom)) {
        const double v = variable_selectivity(atom, stats, x);
        auto it = state.selectivity.find(x);
        if (it == state.selectivity.end()) {
            next[x] = at_least_one(v);
        } else {
            auto d = dom.find(x);
            next[x] = at_least_one(it->second * v / at_least_one(d == dom.end() ? 1 : d->second));
        }
    }
    state.selectivity = std::move(next);
    return state;
}

RuleEstimate estimate_rule_traced(const Rule& input, const StatsView& stats) {
    const Rule rule = name_anonymous_variables(input);
    const DomainMap dom = rule_domains(rule, stats);
    RuleEstimate out;
    out.rule = render_rule(input);
    JoinState state;
    for (std::size_t i : evaluation_order(rule)) {
        const Literal& lit = rule.body[i];
        StepTrace step;
        step.literal = render_literal(lit);
        if (lit.is_positive_atom()) {
            const PredicateStats ps = stats.require(lit.atom.key());
            step.size = ps.size;
            step.factor = join_step(state, lit.atom, ps, dom, &step.index_position);
            if (step.index_position) step.index_selectivity = ps.selectivity[*step.index_position];
            state = propagate_selectivity(std::move(state), lit.atom, ps, dom);
            state.cost = std::min(state.cost * step.factor, kMaxCost);
        } else if (auto a = assignment(lit, [&](const std::string& v) { return state.binds(v); })) {
            double v = 1;
            for (const auto& src : a->second) v *= state.selectivity[src];
            state.selectivity[a->first] = std::clamp(v, 1.0, kMaxCost);
        }
        step.cost_after = state.cost;
        step.selectivity_after = state.selectivity;
        out.steps.push_back(std::move(step));
    }
    out.cost = clamp_cost(state.cost);
    return out;
}

double estimate_rule(const Rule& rule, const StatsView& stats) {
    return estimate_rule_traced(rule, stats).cost;
}

double estimate_join_size(const std::vector<Literal>& body_in, const VariableSet& head_vars, const StatsView& stats) {
    Rule tmp;
    tmp.body = body_in;
    tmp = name_anonymous_variables(tmp);
    const DomainMap dom = rule_domains(tmp, stats);

    bool started = false;
    double size = 1;
    std::map<std::string, double> sel;
    auto bound = [&](const std::string& v) { return sel.contains(v); };
    for (std::size_t i : evaluation_order(tmp)) {
        const Literal& lit = tmp.body[i];
        if (lit.is_positive_atom()) {
            const PredicateStats ps = stats.require(lit.atom.key());
            const VariableSet vars = atom_variables(lit.atom);
            if (!started) {
                size = ps.size;
                for (const auto& x : vars) sel[x] = variable_selectivity(lit.atom, ps, x);
                started = true;
            } else {
                double denom = 1;
                for (const auto& x : vars) {
                    const double vb = variable_selectivity(lit.atom, ps, x);
                    auto it = sel.find(x);
                    if (it != sel.end()) {
                        denom *= at_least_one(std::max(it->second, vb));
                        it->second = std::min(it->second, vb);
                    } else {
                        sel[x] = vb;
                    }
                }
                size = std::min(size * ps.size / denom, kMaxCost);
            }
            for (auto& [x, v] : sel) v = std::min(v, size);
        } else if (auto a = assignment(lit, bound)) {
            double v = 1;
            for (const auto& src : a->second) v *= at_least_one(sel[src]);
            sel[a->first] = std::min(v, size);
        } else if (lit.is_comparison()) {
            if (lit.cmp == CmpOp::Eq) {
                double d = 1;
                VariableSet vars;
                collect_variables(lit, vars);
                for (const auto& x : vars)
                    if (auto it = dom.find(x); it != dom.end()) d = std::max(d, it->second);
                size /= d;
            } else {
                size /= 3;
            }
        }
    }
    double cap = 1;
    for (const auto& x : head_vars) {
        auto it = dom.find(x);
        cap = std::min(cap * at_least_one(it == dom.end() ? 1 : it->second), kMaxCost);
    }
    return clamp_cost(std::min(size, cap));
}

double estimate_join_size(const Rule& rule, const StatsView& stats) {
    VariableSet head_vars;
    for (const auto& h : rule.head) collect_variables(h, head_vars);
    return estimate_join_size(rule.body, head_vars, stats);
}

PredicateStats fresh_pred_stats(double size, std::size_t arity) {
    PredicateStats ps;
    ps.size = size;
    ps.exact = false;
    if (arity == 0) return ps;
    const double root = std::pow(std::max(size, 0.0), 1.0 / static_cast<double>(arity));
    // The epsilon keeps exact roots such as 125^(1/3) from rounding up.
    const double v = size <= 0 ? 0 : std::max(1.0, std::ceil(root - 1e-9));
    ps.selectivity.assign(arity, v);
    return ps;
}

DecompositionEstimate estimate_decomposition(const RuleDecomposition& rd, const StatsView& stats) {
    DecompositionEstimate out;
    LayeredStats layer(stats);
    for (std::size_t i : rd.order) {
        const Rule& r = rd.rules[i];
        if (r.head.size() != 1 || !rd.is_fresh(r.head.front().key())) continue;
        const PredicateStats ps = fresh_pred_stats(estimate_join_size(r, layer), r.head.front().args.size());
        layer.set(r.head.front().key(), ps);
        out.fresh_stats[r.head.front().predicate] = ps;
    }
    for (std::size_t i : rd.order) {
        out.rules.push_back(estimate_rule_traced(rd.rules[i], layer));
        out.cost = std::min(out.cost + out.rules.back().cost, kMaxCost);
    }
    return out;
}

StatsTable stats_from_facts(const Program& program) {
    ValueStore values;
    std::map<PredicateKey, std::set<std::vector<ValueId>>> tuples;
    for (const auto& rule : program.rules) {
        if (!rule.is_fact()) continue;
        const Atom& head = rule.head.front();
        std::vector<std::vector<ValueId>> choices;
        bool ok = true;
        for (const auto& t : head.args) {
            std::vector<ValueId> options;
            if (t.kind == Term::Kind::Interval) {
                for (std::int64_t v = t.number; v <= t.upper; ++v) options.push_back(values.integer(v));
            } else if (auto id = values.intern_term(t)) {
                options.push_back(*id);
            } else {
                ok = false;
            }
            choices.push_back(std::move(options));
        }
        auto& set = tuples[head.key()];
        if (!ok) continue;
        std::vector<ValueId> tuple(choices.size());
        auto expand = [&](auto&& self, std::size_t pos) -> void {
            if (pos == choices.size()) {
                set.insert(tuple);
                return;
            }
            for (ValueId v : choices[pos]) {
                tuple[pos] = v;
                self(self, pos + 1);
            }
        };
        expand(expand, 0);
    }
    StatsTable table;
    for (const auto& [key, set] : tuples) {
        PredicateStats ps;
        ps.size = static_cast<double>(set.size());
        for (std::size_t i = 0; i < key.arity; ++i) {
            std::set<ValueId> distinct;
            for (const auto& t : set) distinct.insert(t[i]);
            ps.selectivity.push_back(static_cast<double>(distinct.size()));
        }
        table.set(key, std::move(ps));
    }
    return table;
}

}  // namespace smartground
