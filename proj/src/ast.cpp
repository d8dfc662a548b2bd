#include "smartground/ast.hpp"

#include <algorithm>

namespace smartground {

Term Term::integer(std::int64_t value) {
    Term t;
    t.kind = Kind::Integer;
    t.number = value;
    return t;
}

Term Term::symbol(std::string name) {
    Term t;
    t.kind = Kind::Symbol;
    t.name = std::move(name);
    return t;
}

Term Term::variable(std::string name) {
    Term t;
    t.kind = Kind::Variable;
    t.name = std::move(name);
    return t;
}

Term Term::anonymous() {
    Term t;
    t.kind = Kind::Anonymous;
    return t;
}

Term Term::function(std::string name, std::vector<Term> args) {
    Term t;
    t.kind = Kind::Function;
    t.name = std::move(name);
    t.args = std::move(args);
    return t;
}

Term Term::arithmetic(ArithOp op, Term lhs, Term rhs) {
    Term t;
    t.kind = Kind::Arithmetic;
    t.op = op;
    t.args.reserve(2);
    t.args.push_back(std::move(lhs));
    t.args.push_back(std::move(rhs));
    return t;
}

Term Term::interval(std::int64_t lower, std::int64_t upper) {
    Term t;
    t.kind = Kind::Interval;
    t.number = lower;
    t.upper = upper;
    return t;
}

bool Term::is_ground() const {
    switch (kind) {
    case Kind::Variable:
    case Kind::Anonymous:
        return false;
    case Kind::Function:
    case Kind::Arithmetic:
        return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
    default:
        return true;
    }
}

bool Term::contains_arithmetic() const {
    if (kind == Kind::Arithmetic) return true;
    return std::any_of(args.begin(), args.end(), [](const Term& a) { return a.contains_arithmetic(); });
}

bool Term::contains_interval() const {
    if (kind == Kind::Interval) return true;
    return std::any_of(args.begin(), args.end(), [](const Term& a) { return a.contains_interval(); });
}

std::string to_string(const PredicateKey& key) {
    return key.name + "/" + std::to_string(key.arity);
}

Literal Literal::positive(Atom atom) {
    Literal l;
    l.kind = Kind::Atom;
    l.atom = std::move(atom);
    return l;
}

Literal Literal::negated(Atom atom) {
    Literal l = positive(std::move(atom));
    l.negative = true;
    return l;
}

Literal Literal::comparison(CmpOp op, Term lhs, Term rhs) {
    Literal l;
    l.kind = Kind::Comparison;
    l.cmp = op;
    l.lhs = std::move(lhs);
    l.rhs = std::move(rhs);
    return l;
}

bool Rule::is_ground() const {
    for (const auto& h : head)
        for (const auto& t : h.args)
            if (!t.is_ground()) return false;
    for (const auto& l : body) {
        if (l.is_comparison()) {
            if (!l.lhs.is_ground() || !l.rhs.is_ground()) return false;
        } else {
            for (const auto& t : l.atom.args)
                if (!t.is_ground()) return false;
        }
    }
    return true;
}

std::vector<const Literal*> Rule::positive_body() const {
    std::vector<const Literal*> out;
    for (const auto& l : body)
        if (l.is_positive_atom()) out.push_back(&l);
    return out;
}

std::vector<const Literal*> Rule::negative_body() const {
    std::vector<const Literal*> out;
    for (const auto& l : body)
        if (l.is_negative_atom()) out.push_back(&l);
    return out;
}

std::vector<const Rule*> Program::facts() const {
    std::vector<const Rule*> out;
    for (const auto& r : rules)
        if (r.is_fact()) out.push_back(&r);
    return out;
}

std::set<PredicateKey> Program::idb_predicates() const {
    std::set<PredicateKey> idb;
    for (const auto& r : rules) {
        if (r.is_fact()) continue;
        for (const auto& h : r.head) idb.insert(h.key());
    }
    return idb;
}

std::set<PredicateKey> Program::edb_predicates() const {
    const auto idb = idb_predicates();
    std::set<PredicateKey> edb;
    for (const auto& r : rules) {
        if (!r.is_fact()) continue;
        auto key = r.head.front().key();
        if (!idb.contains(key)) edb.insert(std::move(key));
    }
    return edb;
}

std::set<PredicateKey> Program::predicates() const {
    std::set<PredicateKey> out;
    for (const auto& r : rules) {
        for (const auto& h : r.head) out.insert(h.key());
        for (const auto& l : r.body)
            if (!l.is_comparison()) out.insert(l.atom.key());
    }
    return out;
}

void collect_variables(const Term& term, VariableSet& out) {
    if (term.kind == Term::Kind::Variable) {
        out.insert(term.name);
        return;
    }
    for (const auto& a : term.args) collect_variables(a, out);
}

void collect_variables(const Atom& atom, VariableSet& out) {
    for (const auto& t : atom.args) collect_variables(t, out);
}

void collect_variables(const Literal& literal, VariableSet& out) {
    if (literal.is_comparison()) {
        collect_variables(literal.lhs, out);
        collect_variables(literal.rhs, out);
    } else {
        collect_variables(literal.atom, out);
    }
}

namespace {

void collect_binding(const Term& term, VariableSet& out) {
    switch (term.kind) {
    case Term::Kind::Variable:
        out.insert(term.name);
        break;
    case Term::Kind::Function:
        for (const auto& a : term.args) collect_binding(a, out);
        break;
    default:
        break;
    }
}

void collect_arithmetic(const Term& term, bool inside, VariableSet& out) {
    if (term.kind == Term::Kind::Variable) {
        if (inside) out.insert(term.name);
        return;
    }
    const bool nested = inside || term.kind == Term::Kind::Arithmetic;
    for (const auto& a : term.args) collect_arithmetic(a, nested, out);
}

bool has_anonymous(const Term& term) {
    if (term.kind == Term::Kind::Anonymous) return true;
    return std::any_of(term.args.begin(), term.args.end(), has_anonymous);
}

bool has_anonymous_in_arithmetic(const Term& term, bool inside) {
    if (term.kind == Term::Kind::Anonymous) return inside;
    const bool nested = inside || term.kind == Term::Kind::Arithmetic;
    return std::any_of(term.args.begin(), term.args.end(),
                       [&](const Term& a) { return has_anonymous_in_arithmetic(a, nested); });
}

bool subset_of(const VariableSet& small, const VariableSet& large) {
    return std::includes(large.begin(), large.end(), small.begin(), small.end());
}

// Variable assigned by `X = t` / `t = X` once `t` is bound, if any.
const Term* assignment_target(const Literal& lit, const VariableSet& bound) {
    if (!lit.is_comparison() || lit.cmp != CmpOp::Eq) return nullptr;
    auto try_side = [&](const Term& var, const Term& expr) -> const Term* {
        if (var.kind != Term::Kind::Variable || bound.contains(var.name)) return nullptr;
        if (has_anonymous(expr)) return nullptr;
        VariableSet need;
        collect_variables(expr, need);
        if (need.contains(var.name) || !subset_of(need, bound)) return nullptr;
        return &var;
    };
    if (const Term* t = try_side(lit.lhs, lit.rhs)) return t;
    return try_side(lit.rhs, lit.lhs);
}

}  // namespace

VariableSet binding_variables(const Atom& atom) {
    VariableSet out;
    for (const auto& t : atom.args) collect_binding(t, out);
    return out;
}

VariableSet arithmetic_variables(const Atom& atom) {
    VariableSet out;
    for (const auto& t : atom.args) collect_arithmetic(t, false, out);
    return out;
}

VariableSets variable_sets(const Rule& rule) {
    VariableSets sets;
    for (const auto& h : rule.head) collect_variables(h, sets.head);
    for (const auto& l : rule.body) collect_variables(l, sets.body);
    sets.all = sets.head;
    sets.all.insert(sets.body.begin(), sets.body.end());
    return sets;
}

SafetyReport safety_check(const Rule& rule) {
    VariableSet bound;
    for (const auto& l : rule.body) {
        if (!l.is_positive_atom()) continue;
        auto b = binding_variables(l.atom);
        bound.insert(b.begin(), b.end());
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& l : rule.body) {
            if (const Term* target = assignment_target(l, bound)) {
                bound.insert(target->name);
                changed = true;
            }
        }
    }

    SafetyReport report;
    const auto sets = variable_sets(rule);
    for (const auto& v : sets.all)
        if (!bound.contains(v)) report.unsafe_variables.insert(v);

    bool loose_anonymous = false;
    for (const auto& h : rule.head)
        for (const auto& t : h.args) loose_anonymous |= has_anonymous(t);
    for (const auto& l : rule.body) {
        if (l.is_comparison()) {
            loose_anonymous |= has_anonymous(l.lhs) || has_anonymous(l.rhs);
        } else if (l.negative) {
            for (const auto& t : l.atom.args) loose_anonymous |= has_anonymous(t);
        } else {
            for (const auto& t : l.atom.args) loose_anonymous |= has_anonymous_in_arithmetic(t, false);
        }
    }
    if (loose_anonymous) report.unsafe_variables.insert("_");
    report.safe = report.unsafe_variables.empty();
    return report;
}

namespace {

void name_anonymous(Term& term, std::size_t& counter) {
    if (term.kind == Term::Kind::Anonymous) {
        term = Term::variable("_" + std::to_string(++counter));
        return;
    }
    for (auto& a : term.args) name_anonymous(a, counter);
}

}  // namespace

Rule name_anonymous_variables(const Rule& rule) {
    Rule out = rule;
    std::size_t counter = 0;
    for (auto& h : out.head)
        for (auto& t : h.args) name_anonymous(t, counter);
    for (auto& l : out.body) {
        if (l.is_comparison()) {
            name_anonymous(l.lhs, counter);
            name_anonymous(l.rhs, counter);
        } else {
            for (auto& t : l.atom.args) name_anonymous(t, counter);
        }
    }
    return out;
}

bool is_internal_anonymous(const std::string& variable) {
    return !variable.empty() && variable.front() == '_';
}

std::vector<std::size_t> evaluation_order(const Rule& rule) {
    const std::size_t n = rule.body.size();
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<bool> done(n, false);
    VariableSet bound;

    auto vars_of = [](const Literal& l) {
        VariableSet vs;
        collect_variables(l, vs);
        return vs;
    };

    while (order.size() < n) {
        std::size_t pick = n;
        // Filters first: anything whose variables are all bound already.
        for (std::size_t i = 0; i < n && pick == n; ++i) {
            if (done[i] || rule.body[i].is_positive_atom()) continue;
            if (subset_of(vars_of(rule.body[i]), bound)) pick = i;
        }
        // Otherwise the first literal able to produce bindings.
        for (std::size_t i = 0; i < n && pick == n; ++i) {
            if (done[i]) continue;
            const auto& l = rule.body[i];
            if (l.is_positive_atom()) {
                VariableSet reach = bound;
                auto direct = binding_variables(l.atom);
                reach.insert(direct.begin(), direct.end());
                if (subset_of(arithmetic_variables(l.atom), reach)) pick = i;
            } else if (assignment_target(l, bound) != nullptr) {
                pick = i;
            }
        }
        if (pick == n) {
            // Unsafe remainder: keep textual order.
            for (std::size_t i = 0; i < n; ++i)
                if (!done[i]) order.push_back(i);
            break;
        }
        done[pick] = true;
        order.push_back(pick);
        const auto& l = rule.body[pick];
        if (l.is_positive_atom()) {
            auto vs = vars_of(l);
            bound.insert(vs.begin(), vs.end());
        } else if (const Term* target = assignment_target(l, bound)) {
            bound.insert(target->name);
        }
    }
    return order;
}

const char* to_string(ArithOp op) {
    switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "/";
    }
    return "?";
}

const char* to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

}  // namespace smartground
