#include "smartground/grounder.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <memory>
#include <unordered_set>

#include "smartground/parser.hpp"
#include "smartground/values.hpp"

namespace smartground {

AtomId GroundProgram::intern(const std::string& text, const std::string& predicate) {
    if (auto it = index_.find(text); it != index_.end()) return it->second;
    const auto id = static_cast<AtomId>(atoms.size());
    atoms.push_back(text);
    atom_predicate.push_back(predicate);
    index_.emplace(text, id);
    return id;
}

std::string GroundProgram::render_rule(const GroundRule& rule) const {
    std::string out;
    for (std::size_t i = 0; i < rule.head.size(); ++i) {
        if (i) out += " | ";
        out += atoms[rule.head[i]];
    }
    if (!rule.body.empty() || rule.head.empty()) {
        out += rule.head.empty() ? ":-" : " :-";
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            out += i ? ", " : " ";
            if (rule.body[i].negative) out += "not ";
            out += atoms[rule.body[i].atom];
        }
    }
    return out + ".";
}

std::string GroundProgram::render() const {
    std::string out;
    for (const auto& r : rules) out += render_rule(r) + "\n";
    return out;
}

void require_safe(const Program& program) {
    for (const auto& rule : program.rules) {
        const SafetyReport report = safety_check(rule);
        if (!report.safe)
            throw SafetyError(render_rule(rule),
                              std::vector<std::string>(report.unsafe_variables.begin(), report.unsafe_variables.end()));
    }
}

// ---------------------------------------------------------------------------
// Module plan

ModulePlan build_module_plan(const Program& program) {
    ModulePlan plan;
    std::map<PredicateKey, std::size_t> node;
    std::vector<PredicateKey> keys;
    std::vector<std::size_t> first_def;
    std::vector<std::size_t> constraints;

    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const Rule& r = program.rules[i];
        if (r.is_fact()) {
            plan.facts.push_back(i);
            continue;
        }
        if (r.is_constraint()) {
            constraints.push_back(i);
            continue;
        }
        for (const auto& h : r.head) {
            if (node.emplace(h.key(), keys.size()).second) {
                keys.push_back(h.key());
                first_def.push_back(i);
            }
        }
    }
    const std::size_t n = keys.size();
    struct Edge {
        std::size_t to;
        bool negative;
    };
    // deps[a]: predicates a depends on.
    std::vector<std::vector<Edge>> deps(n);
    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const Rule& r = program.rules[i];
        if (r.is_fact() || r.is_constraint()) continue;
        for (const auto& h : r.head) {
            const std::size_t a = node.at(h.key());
            for (const auto& l : r.body) {
                if (l.is_comparison()) continue;
                if (auto it = node.find(l.atom.key()); it != node.end()) deps[a].push_back({it->second, l.negative});
            }
            for (const auto& other : r.head)
                if (other.key() != h.key()) deps[a].push_back({node.at(other.key()), false});
        }
    }

    // Tarjan.
    std::vector<std::size_t> comp(n, n), low(n), order(n);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, ncomp = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        order[v] = low[v] = ++counter;
        stack.push_back(v);
        on_stack[v] = 1;
        for (const auto& e : deps[v]) {
            if (!order[e.to]) {
                visit(e.to);
                low[v] = std::min(low[v], low[e.to]);
            } else if (on_stack[e.to]) {
                low[v] = std::min(low[v], order[e.to]);
            }
        }
        if (low[v] == order[v]) {
            for (;;) {
                const std::size_t w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                comp[w] = ncomp;
                if (w == v) break;
            }
            ++ncomp;
        }
    };
    std::fill(order.begin(), order.end(), 0);
    for (std::size_t v = 0; v < n; ++v)
        if (!order[v]) visit(v);

    std::vector<Component> comps(ncomp);
    std::vector<std::size_t> comp_first(ncomp, program.rules.size());
    std::vector<std::set<std::size_t>> comp_deps(ncomp);
    for (std::size_t v = 0; v < n; ++v) {
        Component& c = comps[comp[v]];
        c.predicates.insert(keys[v]);
        comp_first[comp[v]] = std::min(comp_first[comp[v]], first_def[v]);
        for (const auto& e : deps[v]) {
            if (comp[e.to] == comp[v]) {
                // Any internal edge, self loops included, is a cycle.
                c.recursive = true;
                if (e.negative) c.negative_cycle = true;
            } else {
                comp_deps[comp[v]].insert(comp[e.to]);
            }
        }
    }

    for (std::size_t i = 0; i < program.rules.size(); ++i) {
        const Rule& r = program.rules[i];
        if (r.is_fact() || r.is_constraint()) continue;
        comps[comp[node.at(r.head.front().key())]].rules.push_back(i);
    }

    std::vector<char> done(ncomp, 0);
    for (std::size_t step = 0; step < ncomp; ++step) {
        std::size_t pick = ncomp;
        for (std::size_t c = 0; c < ncomp; ++c) {
            if (done[c]) continue;
            const bool ready = std::all_of(comp_deps[c].begin(), comp_deps[c].end(), [&](std::size_t d) { return done[d]; });
            if (ready && (pick == ncomp || comp_first[c] < comp_first[pick])) pick = c;
        }
        done[pick] = 1;
        if (comps[pick].negative_cycle) {
            std::string names;
            for (const auto& k : comps[pick].predicates) names += (names.empty() ? "" : ", ") + to_string(k);
            plan.warnings.push_back("cycle through negation among " + names);
        }
        plan.components.push_back(std::move(comps[pick]));
    }
    if (!constraints.empty()) {
        Component c;
        c.rules = constraints;
        plan.components.push_back(std::move(c));
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

using PredId = std::uint32_t;
using Clock = std::chrono::steady_clock;

struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (auto x : v) h = (h ^ x) * 1099511628211ULL;
        return h;
    }
};

using RowList = std::vector<std::uint32_t>;

struct Relation {
    PredicateKey key;
    std::size_t rows = 0;
    std::vector<ValueId> flat;
    std::vector<AtomId> row_atom;
    std::vector<std::unordered_set<ValueId>> distinct;
    std::vector<std::unique_ptr<std::unordered_map<ValueId, RowList>>> index;
    bool completed = false;

    ValueId at(std::size_t row, std::size_t pos) const { return flat[row * key.arity + pos]; }
};

struct AtomInfo {
    PredId pred = 0;
    std::vector<ValueId> args;
    bool possible = false;
    bool certain = false;
};

struct Instance {
    std::vector<AtomId> head;
    std::vector<GroundLiteral> body;
    std::set<std::size_t> origins;
    bool alive = true;
};

struct CTerm {
    enum class Kind : std::uint8_t { Const, Var, Func, Arith };
    Kind kind = Kind::Const;
    ValueId value = 0;
    std::uint32_t slot = 0;
    std::string name;
    ArithOp op = ArithOp::Add;
    std::vector<CTerm> args;
};

struct CAtom {
    PredId pred = 0;
    std::vector<CTerm> args;
};

struct CStep {
    enum class Kind : std::uint8_t { Positive, Negative, Compare, Assign };
    Kind kind = Kind::Positive;
    std::size_t textual = 0;
    CAtom atom;
    CmpOp cmp = CmpOp::Eq;
    CTerm lhs, rhs;           // Assign: lhs is the target variable
    std::vector<Term> source;  // original arguments, for index selection
    std::set<std::string> bound_before;
    std::vector<std::vector<std::uint32_t>> arg_slots;  // variables per argument
};

struct CRule {
    std::size_t origin = 0;
    Rule rule;
    std::vector<CAtom> head;
    std::vector<CStep> steps;
    std::size_t slots = 0;
    std::size_t body_size = 0;
};

class GroundingRun : public StatsView {
public:
    GroundingRun(const Program& program, const GroundConfig& cfg)
        : program_(program), cfg_(cfg), namer_(predicate_names(program)), start_(Clock::now()) {}

    GroundResult run();

    std::optional<PredicateStats> lookup(const PredicateKey& key) const override {
        PredicateStats ps;
        auto it = pred_ids_.find(key);
        if (it == pred_ids_.end()) {
            ps.selectivity.assign(key.arity, 0);
            return ps;
        }
        const Relation& rel = relations_[it->second];
        ps.size = static_cast<double>(rel.rows);
        for (const auto& d : rel.distinct) ps.selectivity.push_back(static_cast<double>(d.size()));
        return ps;
    }

private:
    PredId pred_id(const PredicateKey& key) {
        auto [it, inserted] = pred_ids_.emplace(key, static_cast<PredId>(relations_.size()));
        if (inserted) {
            Relation rel;
            rel.key = key;
            rel.distinct.resize(key.arity);
            rel.index.resize(key.arity);
            relations_.push_back(std::move(rel));
        }
        return it->second;
    }

    AtomId atom_id(PredId pred, const std::vector<ValueId>& args) {
        scratch_key_.assign(1, pred);
        scratch_key_.insert(scratch_key_.end(), args.begin(), args.end());
        auto [it, inserted] = atom_ids_.emplace(scratch_key_, static_cast<AtomId>(atoms_.size()));
        if (inserted) atoms_.push_back({pred, args, false, false});
        return it->second;
    }

    std::optional<AtomId> find_atom(PredId pred, const std::vector<ValueId>& args) {
        scratch_key_.assign(1, pred);
        scratch_key_.insert(scratch_key_.end(), args.begin(), args.end());
        auto it = atom_ids_.find(scratch_key_);
        if (it == atom_ids_.end()) return std::nullopt;
        return it->second;
    }

    void make_possible(AtomId id) {
        AtomInfo& a = atoms_[id];
        if (a.possible) return;
        a.possible = true;
        Relation& rel = relations_[a.pred];
        const auto row = static_cast<std::uint32_t>(rel.rows++);
        rel.flat.insert(rel.flat.end(), a.args.begin(), a.args.end());
        rel.row_atom.push_back(id);
        for (std::size_t p = 0; p < a.args.size(); ++p) {
            rel.distinct[p].insert(a.args[p]);
            if (rel.index[p]) (*rel.index[p])[a.args[p]].push_back(row);
        }
    }

    void make_certain(AtomId id) {
        make_possible(id);
        if (atoms_[id].certain) return;
        atoms_[id].certain = true;
        certain_order_.push_back(id);
    }

    std::unordered_map<ValueId, RowList>& index_for(PredId pred, std::size_t pos) {
        Relation& rel = relations_[pred];
        if (!rel.index[pos]) {
            rel.index[pos] = std::make_unique<std::unordered_map<ValueId, RowList>>();
            for (std::size_t r = 0; r < rel.rows; ++r) (*rel.index[pos])[rel.at(r, pos)].push_back(static_cast<std::uint32_t>(r));
        }
        return *rel.index[pos];
    }

    void check_time() {
        if (!cfg_.timeout_ms) return;
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_).count();
        if (static_cast<std::uint64_t>(elapsed) > *cfg_.timeout_ms) throw BudgetExceeded("timeout exceeded");
    }

    void arithmetic_failure(EvalStatus status) {
        if (status == EvalStatus::Overflow || status == EvalStatus::DivisionByZero) {
            if (arithmetic_errors_++ == 0)
                warnings_.push_back(status == EvalStatus::Overflow ? "integer overflow during grounding; affected substitutions dropped"
                                                                   : "division by zero during grounding; affected substitutions dropped");
        }
    }

    // -- compilation --------------------------------------------------------
    CTerm compile_term(const Term& t, std::map<std::string, std::uint32_t>& slots) {
        CTerm c;
        switch (t.kind) {
        case Term::Kind::Integer:
        case Term::Kind::Symbol:
            c.kind = CTerm::Kind::Const;
            c.value = *values_.intern_term(t);
            break;
        case Term::Kind::Variable: {
            c.kind = CTerm::Kind::Var;
            auto [it, inserted] = slots.emplace(t.name, static_cast<std::uint32_t>(slots.size()));
            c.slot = it->second;
            break;
        }
        case Term::Kind::Function:
            c.kind = CTerm::Kind::Func;
            c.name = t.name;
            for (const auto& a : t.args) c.args.push_back(compile_term(a, slots));
            break;
        case Term::Kind::Arithmetic:
            c.kind = CTerm::Kind::Arith;
            c.op = t.op;
            for (const auto& a : t.args) c.args.push_back(compile_term(a, slots));
            break;
        default:
            throw InternalError("unexpected term in rule: " + render_term(t));
        }
        return c;
    }

    static void term_slots(const CTerm& t, std::vector<std::uint32_t>& out) {
        if (t.kind == CTerm::Kind::Var) out.push_back(t.slot);
        for (const auto& a : t.args) term_slots(a, out);
    }

    CRule compile(const Rule& input, std::size_t origin) {
        CRule cr;
        cr.origin = origin;
        cr.rule = input;
        const Rule rule = name_anonymous_variables(input);
        cr.body_size = rule.body.size();
        std::map<std::string, std::uint32_t> slots;
        std::set<std::string> bound;
        for (std::size_t i : evaluation_order(rule)) {
            const Literal& lit = rule.body[i];
            CStep s;
            s.textual = i;
            s.bound_before = bound;
            if (lit.is_comparison()) {
                s.cmp = lit.cmp;
                const bool lhs_target = lit.lhs.is_variable() && !bound.contains(lit.lhs.name);
                const bool rhs_target = lit.rhs.is_variable() && !bound.contains(lit.rhs.name);
                if (lit.cmp == CmpOp::Eq && (lhs_target || rhs_target)) {
                    s.kind = CStep::Kind::Assign;
                    const Term& target = lhs_target ? lit.lhs : lit.rhs;
                    const Term& source = lhs_target ? lit.rhs : lit.lhs;
                    s.lhs = compile_term(target, slots);
                    s.rhs = compile_term(source, slots);
                    bound.insert(target.name);
                } else {
                    s.kind = CStep::Kind::Compare;
                    s.lhs = compile_term(lit.lhs, slots);
                    s.rhs = compile_term(lit.rhs, slots);
                }
            } else {
                s.kind = lit.negative ? CStep::Kind::Negative : CStep::Kind::Positive;
                s.atom.pred = pred_id(lit.atom.key());
                s.source = lit.atom.args;
                for (const auto& a : lit.atom.args) {
                    s.atom.args.push_back(compile_term(a, slots));
                    s.arg_slots.emplace_back();
                    term_slots(s.atom.args.back(), s.arg_slots.back());
                }
                if (!lit.negative) {
                    VariableSet vs;
                    collect_variables(lit.atom, vs);
                    bound.insert(vs.begin(), vs.end());
                }
            }
            cr.steps.push_back(std::move(s));
        }
        for (const auto& h : rule.head) {
            CAtom a;
            a.pred = pred_id(h.key());
            for (const auto& t : h.args) a.args.push_back(compile_term(t, slots));
            cr.head.push_back(std::move(a));
        }
        cr.slots = slots.size();
        return cr;
    }

    // -- evaluation ---------------------------------------------------------
    std::optional<ValueId> eval(const CTerm& t) {
        switch (t.kind) {
        case CTerm::Kind::Const: return t.value;
        case CTerm::Kind::Var:
            if (!bound_[t.slot]) return std::nullopt;
            return binding_[t.slot];
        case CTerm::Kind::Func: {
            std::vector<ValueId> args;
            args.reserve(t.args.size());
            for (const auto& a : t.args) {
                auto v = eval(a);
                if (!v) return std::nullopt;
                args.push_back(*v);
            }
            return values_.function(t.name, args);
        }
        case CTerm::Kind::Arith: {
            auto l = eval(t.args[0]);
            if (!l) return std::nullopt;
            auto r = eval(t.args[1]);
            if (!r) return std::nullopt;
            if (values_[*l].kind != GroundValue::Kind::Integer || values_[*r].kind != GroundValue::Kind::Integer)
                return std::nullopt;
            const IntResult res = apply(t.op, values_[*l].number, values_[*r].number);
            if (res.status != EvalStatus::Ok) {
                arithmetic_failure(res.status);
                return std::nullopt;
            }
            return values_.integer(res.value);
        }
        }
        return std::nullopt;
    }

    bool all_bound(const CTerm& t) const {
        if (t.kind == CTerm::Kind::Var) return bound_[t.slot];
        return std::all_of(t.args.begin(), t.args.end(), [&](const CTerm& a) { return all_bound(a); });
    }

    void bind(std::uint32_t slot, ValueId v) {
        bound_[slot] = 1;
        binding_[slot] = v;
        trail_.push_back(slot);
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            bound_[trail_.back()] = 0;
            trail_.pop_back();
        }
    }

    /// Pattern-matches without arithmetic; arithmetic is handled later.
    bool unify(const CTerm& t, ValueId v, bool& deferred) {
        switch (t.kind) {
        case CTerm::Kind::Const: return t.value == v;
        case CTerm::Kind::Var:
            if (bound_[t.slot]) return binding_[t.slot] == v;
            bind(t.slot, v);
            return true;
        case CTerm::Kind::Func: {
            const GroundValue& g = values_[v];
            if (g.kind != GroundValue::Kind::Function || g.name != t.name || g.args.size() != t.args.size()) return false;
            for (std::size_t i = 0; i < t.args.size(); ++i)
                if (!unify(t.args[i], values_[v].args[i], deferred)) return false;
            return true;
        }
        case CTerm::Kind::Arith:
            deferred = true;
            return true;
        }
        return false;
    }

    bool match_row(const CAtom& atom, const Relation& rel, std::size_t row) {
        bool deferred = false;
        for (std::size_t p = 0; p < atom.args.size(); ++p)
            if (!unify(atom.args[p], rel.at(row, p), deferred)) return false;
        if (!deferred) return true;
        for (std::size_t p = 0; p < atom.args.size(); ++p) {
            if (!contains_arith(atom.args[p])) continue;
            auto v = eval(atom.args[p]);
            if (!v || *v != rel.at(row, p)) return false;
        }
        return true;
    }

    static bool contains_arith(const CTerm& t) {
        if (t.kind == CTerm::Kind::Arith) return true;
        return std::any_of(t.args.begin(), t.args.end(), contains_arith);
    }

    struct Window {
        std::size_t begin = 0;
        std::size_t end = 0;
    };

    void instantiate(const CRule& cr, const std::vector<Window>& windows) {
        current_ = &cr;
        windows_ = &windows;
        binding_.assign(cr.slots, 0);
        bound_.assign(cr.slots, 0);
        trail_.clear();
        body_.assign(cr.body_size, GroundLiteral{});
        index_choice_.assign(cr.steps.size(), std::nullopt);
        bool any_positive = false;
        for (std::size_t k = 0; k < cr.steps.size(); ++k) {
            const CStep& s = cr.steps[k];
            if (s.kind != CStep::Kind::Positive) continue;
            any_positive = true;
            const Relation& rel = relations_[s.atom.pred];
            std::vector<double> sel;
            for (const auto& d : rel.distinct) sel.push_back(static_cast<double>(d.size()));
            index_choice_[k] = choose_index_position(
                s.source, [&](const std::string& v) { return s.bound_before.contains(v); }, sel);
        }
        if (!any_positive) tick();
        search(0);
    }

    void tick() {
        if ((++counters_.substitution_attempts & 0xFFF) == 0) check_time();
    }

    void search(std::size_t k) {
        const CRule& cr = *current_;
        if (k == cr.steps.size()) {
            emit();
            return;
        }
        const CStep& s = cr.steps[k];
        switch (s.kind) {
        case CStep::Kind::Positive: {
            const Window w = (*windows_)[k];
            if (w.begin >= w.end) return;
            const PredId pred = s.atom.pred;
            auto try_row = [&](std::size_t row) {
                tick();
                const std::size_t mark = trail_.size();
                if (match_row(s.atom, relations_[pred], row)) {
                    body_[s.textual] = {relations_[pred].row_atom[row], false};
                    search(k + 1);
                }
                undo(mark);
            };
            if (index_choice_[k]) {
                const std::size_t pos = *index_choice_[k];
                auto key = eval(s.atom.args[pos]);
                if (!key) return;
                ++counters_.index_probes;
                auto& idx = index_for(pred, pos);
                auto it = idx.find(*key);
                if (it == idx.end()) return;
                const RowList* rows = &it->second;
                auto first = std::lower_bound(rows->begin(), rows->end(), static_cast<std::uint32_t>(w.begin));
                for (std::size_t i = static_cast<std::size_t>(first - rows->begin()); i < rows->size(); ++i) {
                    const std::size_t row = (*rows)[i];
                    if (row >= w.end) break;
                    try_row(row);
                }
            } else {
                for (std::size_t row = w.begin; row < w.end; ++row) try_row(row);
            }
            return;
        }
        case CStep::Kind::Negative: {
            std::vector<ValueId> args;
            args.reserve(s.atom.args.size());
            for (const auto& a : s.atom.args) {
                auto v = eval(a);
                if (!v) return;
                args.push_back(*v);
            }
            body_[s.textual] = {atom_id(s.atom.pred, args), true};
            search(k + 1);
            return;
        }
        case CStep::Kind::Compare: {
            auto l = eval(s.lhs);
            if (!l) return;
            auto r = eval(s.rhs);
            if (!r) return;
            if (!values_.satisfies(s.cmp, *l, *r)) return;
            body_[s.textual] = {kNoAtom, false};
            search(k + 1);
            return;
        }
        case CStep::Kind::Assign: {
            auto v = eval(s.rhs);
            if (!v) return;
            const std::size_t mark = trail_.size();
            bind(s.lhs.slot, *v);
            body_[s.textual] = {kNoAtom, false};
            search(k + 1);
            undo(mark);
            return;
        }
        }
    }

    static constexpr AtomId kNoAtom = std::numeric_limits<AtomId>::max();

    /// Applies the current certainty and possibility flags. Returns false
    /// when the instance can never fire.
    bool simplify(std::vector<GroundLiteral>& body, bool final) {
        std::vector<GroundLiteral> kept;
        kept.reserve(body.size());
        for (const auto& l : body) {
            if (l.atom == kNoAtom) continue;
            const AtomInfo& a = atoms_[l.atom];
            if (!l.negative) {
                if (!a.certain) kept.push_back(l);
                continue;
            }
            if (final || relations_[a.pred].completed) {
                if (a.certain) return false;
                if (!a.possible) continue;
            }
            kept.push_back(l);
        }
        body = std::move(kept);
        return true;
    }

    void emit() {
        const CRule& cr = *current_;
        ++counters_.instances;
        std::vector<GroundLiteral> body = body_;
        if (!simplify(body, false)) return;
        std::vector<AtomId> head;
        for (const auto& h : cr.head) {
            std::vector<ValueId> args;
            args.reserve(h.args.size());
            for (const auto& t : h.args) {
                auto v = eval(t);
                if (!v) return;
                args.push_back(*v);
            }
            head.push_back(atom_id(h.pred, args));
        }

        key_.clear();
        key_.push_back(static_cast<std::uint32_t>(head.size()));
        key_.insert(key_.end(), head.begin(), head.end());
        for (const auto& l : body) key_.push_back(l.atom * 2 + (l.negative ? 1 : 0));
        auto [it, inserted] = seen_.emplace(key_, instances_.size());
        if (!inserted) {
            instances_[it->second].origins.insert(cr.origin);
            return;
        }
        if (cfg_.max_ground_rules && instances_.size() >= *cfg_.max_ground_rules)
            throw BudgetExceeded("ground rule budget exceeded");
        Instance inst;
        inst.head = head;
        inst.body = std::move(body);
        inst.origins.insert(cr.origin);
        for (AtomId h : head) make_possible(h);
        if (inst.body.empty() && head.size() == 1) make_certain(head.front());
        instances_.push_back(std::move(inst));
    }

    /// Flags are final for `preds`; propagate certainty through the
    /// instances created since `first`.
    void settle(std::size_t first) {
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = first; i < instances_.size(); ++i) {
                Instance& inst = instances_[i];
                if (!inst.alive) continue;
                if (!simplify(inst.body, false)) {
                    inst.alive = false;
                    continue;
                }
                if (inst.body.empty() && inst.head.size() == 1 && !atoms_[inst.head.front()].certain) {
                    make_certain(inst.head.front());
                    changed = true;
                }
            }
        }
    }

    std::vector<Window> full_windows(const CRule& cr) {
        std::vector<Window> w(cr.steps.size());
        for (std::size_t k = 0; k < cr.steps.size(); ++k)
            if (cr.steps[k].kind == CStep::Kind::Positive) w[k] = {0, relations_[cr.steps[k].atom.pred].rows};
        return w;
    }

    void evaluate(const std::vector<CRule>& rules, const Component& comp) {
        const std::size_t first = instances_.size();
        std::set<PredId> preds;
        for (const auto& k : comp.predicates) preds.insert(pred_id(k));
        if (!comp.recursive) {
            for (const auto& cr : rules) instantiate(cr, full_windows(cr));
        } else {
            std::map<PredId, std::size_t> prev, cur;
            for (PredId p : preds) prev[p] = 0;
            for (bool first_round = true;; first_round = false) {
                for (PredId p : preds) cur[p] = relations_[p].rows;
                bool any_delta = false;
                for (PredId p : preds) any_delta = any_delta || cur[p] > prev[p];
                if (!first_round && !any_delta) break;
                for (const auto& cr : rules) {
                    std::vector<std::size_t> rec;
                    for (std::size_t k = 0; k < cr.steps.size(); ++k)
                        if (cr.steps[k].kind == CStep::Kind::Positive && preds.contains(cr.steps[k].atom.pred)) rec.push_back(k);
                    if (rec.empty()) {
                        if (first_round) instantiate(cr, full_windows(cr));
                        continue;
                    }
                    for (std::size_t j = 0; j < rec.size(); ++j) {
                        const PredId dp = cr.steps[rec[j]].atom.pred;
                        if (cur[dp] <= prev[dp]) continue;
                        std::vector<Window> w = full_windows(cr);
                        for (std::size_t q = 0; q < rec.size(); ++q) {
                            const PredId p = cr.steps[rec[q]].atom.pred;
                            if (q < j) w[rec[q]] = {0, prev[p]};
                            else if (q == j) w[rec[q]] = {prev[p], cur[p]};
                            else w[rec[q]] = {0, cur[p]};
                        }
                        instantiate(cr, w);
                    }
                }
                prev = cur;
            }
        }
        for (PredId p : preds) relations_[p].completed = true;
        settle(first);
    }

    void record_decision(RuleDecision d, const Rule& rule) {
        for (const auto& l : rule.body) {
            if (!l.is_positive_atom()) continue;
            auto ps = lookup(l.atom.key());
            d.body_sizes.emplace_back(to_string(l.atom.key()), ps ? ps->size : 0);
        }
        decisions_.push_back(std::move(d));
    }

    /// Rules of one top-level component after the configured rewriting.
    std::vector<std::pair<Rule, std::size_t>> rewrite(const Component& comp) {
        std::vector<std::pair<Rule, std::size_t>> out;
        for (std::size_t idx : comp.rules) {
            const Rule& rule = program_.rules[idx];
            if (cfg_.mode == DecompositionMode::Off || rule.body.size() <= 1) {
                out.emplace_back(rule, idx);
                continue;
            }
            std::optional<RuleDecomposition> rd;
            if (cfg_.mode == DecompositionMode::Smart) {
                if (cfg_.explain_costs) {
                    try {
                        explanations_.push_back(estimate_rule_traced(rule, *this));
                    } catch (const MissingStats&) {
                    }
                }
                auto res = smart_decompose(rule, *this, cfg_.sd, namer_);
                rd = std::move(res.decomposition);
                if (rd && cfg_.explain_costs) {
                    auto est = estimate_decomposition(*rd, *this);
                    for (auto& e : est.rules) explanations_.push_back(std::move(e));
                }
                record_decision(std::move(res.decision), rule);
            } else {
                RuleDecision d;
                d.rule = render_rule(rule);
                TreeDecompositionGenerator gen(to_hypergraph(rule), cfg_.sd.td);
                if (auto td = gen.next()) {
                    try {
                        rd = to_rules(*td, rule, namer_, this);
                    } catch (const DecompositionDegenerate&) {
                    }
                }
                d.decomposed = rd.has_value();
                d.reason = rd ? "always" : "not decomposable";
                if (rd) {
                    d.chosen = 0;
                    for (const auto& r : rd->ordered_rules()) d.replacement.push_back(render_rule(r));
                }
                record_decision(std::move(d), rule);
            }
            if (rd) {
                replacements_[idx] = rd->ordered_rules();
                for (auto& r : rd->ordered_rules()) out.emplace_back(std::move(r), idx);
            } else {
                out.emplace_back(rule, idx);
            }
        }
        return out;
    }

    void load_facts(const ModulePlan& plan) {
        for (std::size_t idx : plan.facts) {
            const Atom& head = program_.rules[idx].head.front();
            const PredId pred = pred_id(head.key());
            std::vector<std::vector<ValueId>> choices;
            bool ok = true;
            for (const auto& t : head.args) {
                std::vector<ValueId> options;
                if (t.kind == Term::Kind::Interval) {
                    for (std::int64_t v = t.number; v <= t.upper; ++v) options.push_back(values_.integer(v));
                } else {
                    EvalStatus status = EvalStatus::Ok;
                    if (auto v = values_.intern_term(t, &status)) {
                        options.push_back(*v);
                    } else {
                        arithmetic_failure(status);
                        ok = false;
                    }
                }
                choices.push_back(std::move(options));
            }
            if (!ok) continue;
            std::vector<ValueId> tuple(choices.size());
            std::function<void(std::size_t)> expand = [&](std::size_t pos) {
                if (pos == choices.size()) {
                    const AtomId id = atom_id(pred, tuple);
                    const bool fresh = !atoms_[id].certain;
                    make_certain(id);
                    if (fresh) fact_origin_[id] = idx;
                    return;
                }
                for (ValueId v : choices[pos]) {
                    tuple[pos] = v;
                    expand(pos + 1);
                }
            };
            expand(0);
        }
    }

    std::string render_atom_text(AtomId id) const {
        const AtomInfo& a = atoms_[id];
        std::string out = relations_[a.pred].key.name;
        if (a.args.empty()) return out;
        out += '(';
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) out += ',';
            out += values_.render(a.args[i]);
        }
        return out + ')';
    }

    GroundResult finish();

    const Program& program_;
    const GroundConfig& cfg_;
    FreshNamer namer_;
    Clock::time_point start_;

    ValueStore values_;
    std::map<PredicateKey, PredId> pred_ids_;
    std::vector<Relation> relations_;
    std::unordered_map<std::vector<std::uint32_t>, AtomId, VecHash> atom_ids_;
    std::vector<AtomInfo> atoms_;
    std::vector<AtomId> certain_order_;
    std::map<AtomId, std::size_t> fact_origin_;
    std::vector<Instance> instances_;
    std::unordered_map<std::vector<std::uint32_t>, std::size_t, VecHash> seen_;

    Counters counters_;
    std::uint64_t arithmetic_errors_ = 0;
    std::vector<std::string> warnings_;
    std::vector<RuleDecision> decisions_;
    std::vector<RuleEstimate> explanations_;
    Program effective_;
    std::map<std::size_t, std::vector<Rule>> replacements_;

    // search state
    const CRule* current_ = nullptr;
    const std::vector<Window>* windows_ = nullptr;
    std::vector<ValueId> binding_;
    std::vector<char> bound_;
    std::vector<std::uint32_t> trail_;
    std::vector<GroundLiteral> body_;
    std::vector<std::optional<std::size_t>> index_choice_;
    std::vector<std::uint32_t> scratch_key_;
    std::vector<std::uint32_t> key_;
};

GroundResult GroundingRun::run() {
    require_safe(program_);
    const ModulePlan plan = build_module_plan(program_);
    warnings_ = plan.warnings;
    for (const auto& k : program_.predicates()) pred_id(k);
    load_facts(plan);
    std::set<PredicateKey> defined;
    for (const auto& c : plan.components) defined.insert(c.predicates.begin(), c.predicates.end());
    for (auto& rel : relations_) rel.completed = !defined.contains(rel.key);
    for (std::size_t idx : plan.facts) effective_.rules.push_back(program_.rules[idx]);

    for (const Component& comp : plan.components) {
        check_time();
        const auto rules = rewrite(comp);
        Program sub;
        for (const auto& [r, origin] : rules) sub.rules.push_back(r);
        for (const auto& r : sub.rules) effective_.rules.push_back(r);
        const ModulePlan inner = build_module_plan(sub);
        for (const Component& part : inner.components) {
            std::vector<CRule> compiled;
            for (std::size_t i : part.rules) compiled.push_back(compile(rules[i].first, rules[i].second));
            evaluate(compiled, part);
        }
        for (const auto& k : comp.predicates) relations_[pred_id(k)].completed = true;
    }
    return finish();
}

GroundResult GroundingRun::finish() {
    GroundResult res;
    GroundProgram& gp = res.program;
    std::map<AtomId, AtomId> remap;
    auto out_atom = [&](AtomId id) {
        auto it = remap.find(id);
        if (it != remap.end()) return it->second;
        const AtomId mapped = gp.intern(render_atom_text(id), relations_[atoms_[id].pred].key.name);
        remap.emplace(id, mapped);
        return mapped;
    };
    auto translate = [&](const std::vector<AtomId>& head, const std::vector<GroundLiteral>& body) {
        GroundRule g;
        for (AtomId h : head) g.head.push_back(out_atom(h));
        for (const auto& l : body) g.body.push_back({out_atom(l.atom), l.negative});
        return g;
    };

    for (AtomId id : certain_order_) gp.rules.push_back(translate({id}, {}));
    std::unordered_set<std::string> emitted;
    for (auto& inst : instances_) {
        if (!inst.alive) continue;
        if (!simplify(inst.body, true)) {
            inst.alive = false;
            continue;
        }
        const bool fact_shaped = inst.body.empty() && inst.head.size() == 1;
        const bool satisfied =
            std::any_of(inst.head.begin(), inst.head.end(), [&](AtomId h) { return atoms_[h].certain; });
        if (!fact_shaped && satisfied) continue;
        GroundRule g = translate(inst.head, inst.body);
        const std::string text = gp.render_rule(g);
        for (std::size_t o : inst.origins) res.rule_instances[o].push_back(text);
        if (fact_shaped) continue;
        if (emitted.insert(text).second) gp.rules.push_back(std::move(g));
    }
    for (auto& [o, lines] : res.rule_instances) {
        std::sort(lines.begin(), lines.end());
        lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    }

    res.counters = counters_;
    res.decisions = std::move(decisions_);
    res.explanations = std::move(explanations_);
    res.rules_in = program_.rules.size();
    res.rules_out = effective_.rules.size();
    res.arithmetic_errors = arithmetic_errors_;
    res.warnings = warnings_;
    res.effective_program = std::move(effective_);
    res.replacements = std::move(replacements_);
    res.wall_time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    return res;
}

}  // namespace

GroundResult ground_program(const Program& program, const GroundConfig& config) {
    GroundingRun run(program, config);
    return run.run();
}

}  // namespace smartground
