#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace smartground {

/// `h(X0,Xk) :- e1(X0,X1), ..., ek(X(k-1),Xk).` over random binary relations.
struct ChainJoinSpec {
    std::size_t k = 8;
    std::size_t tuples = 200;
    std::size_t domain = 50;
    std::uint64_t seed = 0;
};

std::string chain_join_encoding(std::size_t k);

/// `tuples` distinct facts per relation, values in 1..domain. Asking for more
/// tuples than domain^2 yields all of them.
std::string chain_join_instance(const ChainJoinSpec& spec);

}  // namespace smartground
