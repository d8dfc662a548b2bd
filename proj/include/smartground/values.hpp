#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "smartground/ast.hpp"

namespace smartground {

using ValueId = std::uint32_t;

struct GroundValue {
    enum class Kind : std::uint8_t { Integer, Symbol, Function };
    Kind kind = Kind::Integer;
    std::int64_t number = 0;
    std::string name;
    std::vector<ValueId> args;
};

enum class EvalStatus : std::uint8_t { Ok, Undefined, Overflow, DivisionByZero };

struct IntResult {
    EvalStatus status = EvalStatus::Ok;
    std::int64_t value = 0;
};

/// Integer arithmetic with overflow and division checks. Division truncates
/// toward zero.
IntResult apply(ArithOp op, std::int64_t lhs, std::int64_t rhs);

/// Interned ground terms. Identical terms share one id for the lifetime of
/// the store.
class ValueStore {
public:
    ValueId integer(std::int64_t value);
    ValueId symbol(std::string_view name);
    ValueId function(std::string_view name, std::span<const ValueId> args);

    const GroundValue& operator[](ValueId id) const { return values_[id]; }
    std::size_t size() const { return values_.size(); }

    /// Total order: integers numerically, then symbols lexicographically,
    /// then function terms by arity, name and arguments.
    int compare(ValueId lhs, ValueId rhs) const;
    bool satisfies(CmpOp op, ValueId lhs, ValueId rhs) const;

    std::string render(ValueId id) const;

    /// Interns a ground term without intervals. Returns nothing when
    /// arithmetic on it is undefined or fails.
    std::optional<ValueId> intern_term(const Term& term, EvalStatus* status = nullptr);

private:
    ValueId push(GroundValue value);

    std::vector<GroundValue> values_;
    std::unordered_map<std::int64_t, ValueId> integers_;
    std::unordered_map<std::string, ValueId> symbols_;
    std::unordered_map<std::string, ValueId> functions_;
};

}  // namespace smartground
