#include "smartground/synthetic.hpp"

#include <random>
#include <set>
#include <utility>

namespace smartground {

std::string chain_join_encoding(std::size_t k) {
    std::string out = "h(X0,X" + std::to_string(k) + ") :- ";
    for (std::size_t i = 1; i <= k; ++i) {
        if (i > 1) out += ", ";
        out += "e" + std::to_string(i) + "(X" + std::to_string(i - 1) + ",X" + std::to_string(i) + ")";
    }
    return out + ".\n";
}

std::string chain_join_instance(const ChainJoinSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    const std::size_t cap = spec.domain * spec.domain;
    const std::size_t count = spec.tuples < cap ? spec.tuples : cap;
    std::string out;
    for (std::size_t i = 1; i <= spec.k; ++i) {
        std::set<std::pair<std::uint64_t, std::uint64_t>> rows;
        while (rows.size() < count) rows.emplace(rng() % spec.domain + 1, rng() % spec.domain + 1);
        for (const auto& [a, b] : rows)
            out += "e" + std::to_string(i) + "(" + std::to_string(a) + "," + std::to_string(b) + ").\n";
    }
    return out;
}

}  // namespace smartground
