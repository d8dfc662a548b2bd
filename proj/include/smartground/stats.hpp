#pragma once

#include <map>
#include <optional>
#include <vector>

#include "smartground/ast.hpp"
#include "smartground/errors.hpp"

namespace smartground {

/// Extension size T and per-position distinct-value counts V.
struct PredicateStats {
    double size = 0;
    std::vector<double> selectivity;
    bool exact = true;
};

class MissingStats : public Error {
public:
    explicit MissingStats(const PredicateKey& key)
        : Error("no statistics for predicate " + to_string(key)), key_(key) {}
    const PredicateKey& predicate() const noexcept { return key_; }

private:
    PredicateKey key_;
};

class StatsView {
public:
    virtual ~StatsView() = default;
    virtual std::optional<PredicateStats> lookup(const PredicateKey& key) const = 0;

    /// Like lookup, but throws MissingStats.
    PredicateStats require(const PredicateKey& key) const {
        auto s = lookup(key);
        if (!s) throw MissingStats(key);
        return *s;
    }
};

class StatsTable : public StatsView {
public:
    void set(const PredicateKey& key, PredicateStats stats) { table_[key] = std::move(stats); }
    std::optional<PredicateStats> lookup(const PredicateKey& key) const override {
        auto it = table_.find(key);
        if (it == table_.end()) return std::nullopt;
        return it->second;
    }
    const std::map<PredicateKey, PredicateStats>& entries() const { return table_; }

private:
    std::map<PredicateKey, PredicateStats> table_;
};

/// Local entries shadow a base view that is never modified.
class LayeredStats : public StatsView {
public:
    explicit LayeredStats(const StatsView& base) : base_(base) {}
    void set(const PredicateKey& key, PredicateStats stats) { local_.set(key, std::move(stats)); }
    std::optional<PredicateStats> lookup(const PredicateKey& key) const override {
        if (auto s = local_.lookup(key)) return s;
        return base_.lookup(key);
    }

private:
    const StatsView& base_;
    StatsTable local_;
};

}  // namespace smartground
