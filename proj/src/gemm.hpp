#pragma once

#include <cstddef>

// Row-major accumulate kernels used by the conv and dense layers. All three
// keep a fixed per-element accumulation order (ascending k), so results are
// bit-identical no matter how many worker threads run.

namespace robnet::detail {

/// C[M x N] += A[M x K] * B[K x N]
void gemm_nn(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C);

/// C[M x N] += A^T * B, with A stored as [K x M]
void gemm_tn(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C);

/// C[M x N] += A * B^T, with B stored as [N x K]
void gemm_nt(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C);

/// Single-threaded variants for callers that already parallelize at a
/// coarser grain.
void gemm_nn_st(std::size_t M, std::size_t K, std::size_t N, const float* A, const float* B, float* C);

/// Worker count for the heavy kernels (ROBNET_THREADS env override).
std::size_t worker_count();

/// Run fn(lo, hi) over [0, total) split across workers when the task is
/// large enough; falls back to a single inline call otherwise.
void parallel_chunks(std::size_t total, std::size_t min_per_worker,
                     void (*fn)(std::size_t, std::size_t, void*), void* ctx);

} // namespace robnet::detail
