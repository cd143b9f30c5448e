#include "gemm.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

// Register-tiled accumulate kernels. Each C element is produced by one
// thread with a fixed ascending-k accumulation order (lane sums are folded
// in a fixed order too), so results do not depend on the worker count.

namespace robnet::detail {

std::size_t worker_count() {
    static const std::size_t n = [] {
        if (const char* env = std::getenv("ROBNET_WORKERS")) {
            long v = std::atol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return static_cast<std::size_t>(hw == 0 ? 1 : std::min(hw, 8u));
    }();
    return n;
}

void parallel_chunks(std::size_t total, std::size_t min_per_worker,
                     void (*fn)(std::size_t, std::size_t, void*), void* ctx) {
    std::size_t workers = worker_count();
    if (min_per_worker > 0) workers = std::min(workers, total / min_per_worker + 1);
    workers = std::max<std::size_t>(1, std::min(workers, total));
    if (workers == 1) {
        fn(0, total, ctx);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (total + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([=] { fn(lo, hi, ctx); });
    }
    for (auto& t : pool) t.join();
}

namespace {

constexpr std::size_t MR = 6;  // C rows per register tile
constexpr std::size_t NR = 64; // C columns per register tile

// C tile kept in `acc` across the whole k loop; one store at the end.
// `lda_k` is the stride between consecutive k entries of A for a fixed row
// (1 for normal A, M for transposed A), `a0` points at A(row, k=0).
template <std::size_t ROWS>
inline void tile_panel(std::size_t K, std::size_t N, std::size_t n0, std::size_t n1,
                       const float* const (&a)[MR], std::size_t lda_k, const float* B, float* const (&c)[MR]) {
    for (std::size_t nb = n0; nb < n1; nb += NR) {
        const std::size_t nw = std::min(NR, n1 - nb);
        float acc[ROWS][NR];
        for (std::size_t i = 0; i < ROWS; ++i)
            for (std::size_t j = 0; j < nw; ++j) acc[i][j] = 0.0f;
        const float* bp = B + nb;
        if (nw == NR) {
            for (std::size_t k = 0; k < K; ++k, bp += N) {
                for (std::size_t i = 0; i < ROWS; ++i) {
                    const float av = a[i][k * lda_k];
                    for (std::size_t j = 0; j < NR; ++j) acc[i][j] += av * bp[j];
                }
            }
        } else {
            for (std::size_t k = 0; k < K; ++k, bp += N) {
                for (std::size_t i = 0; i < ROWS; ++i) {
                    const float av = a[i][k * lda_k];
                    for (std::size_t j = 0; j < nw; ++j) acc[i][j] += av * bp[j];
                }
            }
        }
        for (std::size_t i = 0; i < ROWS; ++i) {
            float* cp = c[i] + nb;
            for (std::size_t j = 0; j < nw; ++j) cp[j] += acc[i][j];
        }
    }
}

// rows [m_lo, m_hi) of C += op(A) * B with op(A)(m, k) = A[m*a_row_stride + k*a_k_stride]
void panel_rows(std::size_t m_lo, std::size_t m_hi, std::size_t K, std::size_t N, const float* A,
                std::size_t a_row_stride, std::size_t a_k_stride, const float* B, float* C) {
    std::size_t m = m_lo;
    for (; m + MR <= m_hi; m += MR) {
        const float* a[MR];
        float* c[MR];
        for (std::size_t i = 0; i < MR; ++i) {
            a[i] = A + (m + i) * a_row_stride;
            c[i] = C + (m + i) * N;
        }
        tile_panel<MR>(K, N, 0, N, a, a_k_stride, B, c);
    }
    for (; m < m_hi; ++m) {
        const float* a[MR] = {A + m * a_row_stride, nullptr, nullptr, nullptr, nullptr, nullptr};
        float* c[MR] = {C + m * N, nullptr, nullptr, nullptr, nullptr, nullptr};
        tile_panel<1>(K, N, 0, N, a, a_k_stride, B, c);
    }
}

struct PanelCtx {
    std::size_t K, N, a_row_stride, a_k_stride;
    const float* A;
    const float* B;
    float* C;
};

void panel_entry(std::size_t lo, std::size_t hi, void* ctx) {
    auto* p = static_cast<PanelCtx*>(ctx);
    panel_rows(lo, hi, p->K, p->N, p->A, p->a_row_stride, p->a_k_stride, p->B, p->C);
}

void run_panels(std::size_t M, std::size_t K, std::size_t N, const float* A,
                std::size_t a_row_stride, std::size_t a_k_stride, const float* B, float* C) {
    PanelCtx ctx{K, N, a_row_stride, a_k_stride, A, B, C};
    constexpr std::size_t kParallelFlops = std::size_t{1} << 22;
    std::size_t min_rows = M;
    if (M * K * N >= kParallelFlops) min_rows = std::max<std::size_t>(1, kParallelFlops / (K * N + 1));
    parallel_chunks(M, min_rows, panel_entry, &ctx);
}

// dot-product form with fixed lane folding, for C += A * B^T
constexpr std::size_t DL = 32; // independent accumulation lanes

inline float dot_lanes(const float* a, const float* b, std::size_t K) {
    float acc[DL] = {};
    std::size_t k = 0;
    for (; k + DL <= K; k += DL)
        for (std::size_t j = 0; j < DL; ++j) acc[j] += a[k + j] * b[k + j];
    for (std::size_t j = 0; k + j < K; ++j) acc[j] += a[k + j] * b[k + j];
    float total = 0.0f;
    for (std::size_t j = 0; j < DL; ++j) total += acc[j];
    return total;
}

struct NtCtx {
    std::size_t K, N;
    const float* A;
    const float* B;
    float* C;
};

void nt_entry(std::size_t m_lo, std::size_t m_hi, void* ctx) {
    auto* p = static_cast<NtCtx*>(ctx);
    for (std::size_t m = m_lo; m < m_hi; ++m) {
        const float* a = p->A + m * p->K;
        float* c = p->C + m * p->N;
        for (std::size_t n = 0; n < p->N; ++n) c[n] += dot_lanes(a, p->B + n * p->K, p->K);
    }
}

} // namespace

void gemm_nn(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C) {
    run_panels(M, K, N, A, /*a_row_stride=*/K, /*a_k_stride=*/1, B, C);
}

void gemm_nn_st(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C) {
    panel_rows(0, M, K, N, A, /*a_row_stride=*/K, /*a_k_stride=*/1, B, C);
}

void gemm_tn(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C) {
    run_panels(M, K, N, A, /*a_row_stride=*/1, /*a_k_stride=*/M, B, C);
}

void gemm_nt(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C) {
    NtCtx ctx{K, N, A, B, C};
    constexpr std::size_t kParallelFlops = std::size_t{1} << 22;
    std::size_t min_rows = M;
    if (M * K * N >= kParallelFlops) min_rows = std::max<std::size_t>(1, kParallelFlops / (K * N + 1));
    parallel_chunks(M, min_rows, nt_entry, &ctx);
}

} // namespace robnet::detail
