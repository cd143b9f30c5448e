#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "robnet/graph.hpp"

namespace robnet {

// Rank is computed over the prime field GF(2^61 - 1). For 0/1 matrices of
// the sizes handled here this agrees with the rational rank (it can only
// differ when the prime divides every maximal nonzero minor) and is immune
// to floating-point tolerance choices.
inline constexpr std::uint64_t kRankPrime = (std::uint64_t{1} << 61) - 1;

namespace gf {

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
    std::uint64_t s = static_cast<std::uint64_t>(t & kRankPrime) + static_cast<std::uint64_t>(t >> 61);
    s = (s & kRankPrime) + (s >> 61);
    if (s >= kRankPrime) s -= kRankPrime;
    return s;
}

inline std::uint64_t sub(std::uint64_t a, std::uint64_t b) {
    return a >= b ? a - b : a + kRankPrime - b;
}

std::uint64_t pow(std::uint64_t base, std::uint64_t exp);
std::uint64_t inv(std::uint64_t a);

} // namespace gf

/// In-place Gaussian elimination over GF(2^61-1); returns the rank.
/// `m` holds `rows * cols` entries, row-major, each already reduced mod p.
std::size_t gf_rank_inplace(std::size_t rows, std::size_t cols, std::vector<std::uint64_t>& m);

/// Exact rank of a 0/1 adjacency matrix.
std::size_t exact_rank(const AdjacencyMatrix& a);

} // namespace robnet
