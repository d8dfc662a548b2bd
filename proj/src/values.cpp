#include "smartground/values.hpp"

#include <cstring>
#include <limits>

namespace smartground {

IntResult apply(ArithOp op, std::int64_t lhs, std::int64_t rhs) {
    IntResult r;
    switch (op) {
    case ArithOp::Add:
        if (__builtin_add_overflow(lhs, rhs, &r.value)) r.status = EvalStatus::Overflow;
        break;
    case ArithOp::Sub:
        if (__builtin_sub_overflow(lhs, rhs, &r.value)) r.status = EvalStatus::Overflow;
        break;
    case ArithOp::Mul:
        if (__builtin_mul_overflow(lhs, rhs, &r.value)) r.status = EvalStatus::Overflow;
        break;
    case ArithOp::Div:
        if (rhs == 0) r.status = EvalStatus::DivisionByZero;
        else if (lhs == std::numeric_limits<std::int64_t>::min() && rhs == -1) r.status = EvalStatus::Overflow;
        else r.value = lhs / rhs;
        break;
    }
    return r;
}

ValueId ValueStore::push(GroundValue value) {
    values_.push_back(std::move(value));
    return static_cast<ValueId>(values_.size() - 1);
}

ValueId ValueStore::integer(std::int64_t value) {
    if (auto it = integers_.find(value); it != integers_.end()) return it->second;
    GroundValue v;
    v.kind = GroundValue::Kind::Integer;
    v.number = value;
    const ValueId id = push(std::move(v));
    integers_.emplace(value, id);
    return id;
}

ValueId ValueStore::symbol(std::string_view name) {
    std::string key(name);
    if (auto it = symbols_.find(key); it != symbols_.end()) return it->second;
    GroundValue v;
    v.kind = GroundValue::Kind::Symbol;
    v.name = key;
    const ValueId id = push(std::move(v));
    symbols_.emplace(std::move(key), id);
    return id;
}

ValueId ValueStore::function(std::string_view name, std::span<const ValueId> args) {
    std::string key(name);
    key.push_back('\0');
    key.append(reinterpret_cast<const char*>(args.data()), args.size_bytes());
    if (auto it = functions_.find(key); it != functions_.end()) return it->second;
    GroundValue v;
    v.kind = GroundValue::Kind::Function;
    v.name = std::string(name);
    v.args.assign(args.begin(), args.end());
    const ValueId id = push(std::move(v));
    functions_.emplace(std::move(key), id);
    return id;
}

int ValueStore::compare(ValueId lhs, ValueId rhs) const {
    if (lhs == rhs) return 0;
    const auto& a = values_[lhs];
    const auto& b = values_[rhs];
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    switch (a.kind) {
    case GroundValue::Kind::Integer:
        return a.number < b.number ? -1 : (a.number > b.number ? 1 : 0);
    case GroundValue::Kind::Symbol:
        return a.name.compare(b.name) < 0 ? -1 : 1;
    case GroundValue::Kind::Function: {
        if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
        if (const int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (const int c = compare(a.args[i], b.args[i]); c != 0) return c;
        return 0;
    }
    }
    return 0;
}

bool ValueStore::satisfies(CmpOp op, ValueId lhs, ValueId rhs) const {
    const int c = compare(lhs, rhs);
    switch (op) {
    case CmpOp::Eq: return c == 0;
    case CmpOp::Ne: return c != 0;
    case CmpOp::Lt: return c < 0;
    case CmpOp::Le: return c <= 0;
    case CmpOp::Gt: return c > 0;
    case CmpOp::Ge: return c >= 0;
    }
    return false;
}

std::string ValueStore::render(ValueId id) const {
    const auto& v = values_[id];
    switch (v.kind) {
    case GroundValue::Kind::Integer:
        return std::to_string(v.number);
    case GroundValue::Kind::Symbol:
        return v.name;
    case GroundValue::Kind::Function: {
        std::string out = v.name + "(";
        for (std::size_t i = 0; i < v.args.size(); ++i) {
            if (i) out += ',';
            out += render(v.args[i]);
        }
        return out + ")";
    }
    }
    return {};
}

std::optional<ValueId> ValueStore::intern_term(const Term& term, EvalStatus* status) {
    auto fail = [&](EvalStatus s) -> std::optional<ValueId> {
        if (status) *status = s;
        return std::nullopt;
    };
    switch (term.kind) {
    case Term::Kind::Integer:
        return integer(term.number);
    case Term::Kind::Symbol:
        return symbol(term.name);
    case Term::Kind::Function: {
        std::vector<ValueId> args;
        args.reserve(term.args.size());
        for (const auto& a : term.args) {
            auto v = intern_term(a, status);
            if (!v) return std::nullopt;
            args.push_back(*v);
        }
        return function(term.name, args);
    }
    case Term::Kind::Arithmetic: {
        auto l = intern_term(term.args[0], status);
        if (!l) return std::nullopt;
        auto r = intern_term(term.args[1], status);
        if (!r) return std::nullopt;
        if (values_[*l].kind != GroundValue::Kind::Integer || values_[*r].kind != GroundValue::Kind::Integer)
            return fail(EvalStatus::Undefined);
        const auto res = apply(term.op, values_[*l].number, values_[*r].number);
        if (res.status != EvalStatus::Ok) return fail(res.status);
        return integer(res.value);
    }
    default:
        return fail(EvalStatus::Undefined);
    }
}

}  // namespace smartground
