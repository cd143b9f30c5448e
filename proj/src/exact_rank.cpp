#include "robnet/exact_rank.hpp"

namespace robnet {

namespace gf {

std::uint64_t pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t acc = 1;
    while (exp) {
        if (exp & 1) acc = mul(acc, base);
        base = mul(base, base);
        exp >>= 1;
    }
    return acc;
}

std::uint64_t inv(std::uint64_t a) { return pow(a, kRankPrime - 2); }

} // namespace gf

std::size_t gf_rank_inplace(std::size_t rows, std::size_t cols, std::vector<std::uint64_t>& m) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && m[pivot * cols + col] == 0) ++pivot;
        if (pivot == rows) continue;
        if (pivot != rank)
            for (std::size_t j = col; j < cols; ++j)
                std::swap(m[pivot * cols + j], m[rank * cols + j]);

        const std::uint64_t* prow = &m[rank * cols];
        const std::uint64_t pinv = gf::inv(prow[col]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            std::uint64_t* row = &m[i * cols];
            if (row[col] == 0) continue;
            const std::uint64_t factor = gf::mul(row[col], pinv);
            row[col] = 0;
            for (std::size_t j = col + 1; j < cols; ++j)
                row[j] = gf::sub(row[j], gf::mul(factor, prow[j]));
        }
        ++rank;
    }
    return rank;
}

std::size_t exact_rank(const AdjacencyMatrix& a) {
    std::vector<std::uint64_t> m(a.cells.begin(), a.cells.end());
    return gf_rank_inplace(a.n, a.n, m);
}

} // namespace robnet
