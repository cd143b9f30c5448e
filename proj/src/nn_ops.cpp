#include "robnet/nn_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gemm.hpp"

namespace robnet {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool tracked(Tape* tape, std::initializer_list<const Tensor*> inputs) {
    if (!tape) return false;
    for (const Tensor* t : inputs)
        if (t->requires_grad()) return true;
    return false;
}

struct ConvDims {
    std::size_t B, Cin, H, W, Cout, k, pad, Ho, Wo, K;
};

ConvDims conv_dims(const Tensor& input, const Tensor& kernel, const Tensor& bias, Padding padding) {
    require(input.shape().size() == 4, "conv2d input must be [B,C,H,W], got " + shape_str(input.shape()));
    require(kernel.shape().size() == 4, "conv2d kernel must be [Cout,Cin,k,k]");
    ConvDims d{};
    d.B = input.shape()[0];
    d.Cin = input.shape()[1];
    d.H = input.shape()[2];
    d.W = input.shape()[3];
    d.Cout = kernel.shape()[0];
    d.k = kernel.shape()[2];
    require(kernel.shape()[3] == d.k, "conv2d kernel must be square");
    require(kernel.shape()[1] == d.Cin, "conv2d channel mismatch: input has " +
                                            std::to_string(d.Cin) + ", kernel expects " +
                                            std::to_string(kernel.shape()[1]));
    require(bias.shape().size() == 1 && bias.shape()[0] == d.Cout, "conv2d bias must be [Cout]");
    d.pad = padding == Padding::Same ? (d.k - 1) / 2 : 0;
    require(d.H + 2 * d.pad >= d.k && d.W + 2 * d.pad >= d.k,
            "conv2d input " + shape_str(input.shape()) + " smaller than the kernel");
    d.Ho = d.H + 2 * d.pad - d.k + 1;
    d.Wo = d.W + 2 * d.pad - d.k + 1;
    d.K = d.Cin * d.k * d.k;
    return d;
}

// Patch-row geometry shared by the gather and scatter passes: for a fixed
// kernel cell and output row, the touched input cells form one contiguous
// run, with zero padding on either side.
struct PatchRun {
    std::size_t lead;  // padded prefix length
    std::size_t valid; // elements copied from the input row (after lead)
    const std::size_t count;
    std::size_t src_off; // offset into the input plane for the first valid cell
    bool in_bounds;
};

template <class RowFn>
void for_each_patch_row(const ConvDims& d, std::size_t lo, std::size_t hi, std::size_t r, RowFn&& fn) {
    const std::size_t ki = (r / d.k) % d.k;
    const std::size_t kj = r % d.k;
    std::size_t pos = lo;
    std::size_t out_off = 0;
    while (pos < hi) {
        const std::size_t oh = pos / d.Wo;
        const std::size_t ow0 = pos % d.Wo;
        const std::size_t row_end = std::min(hi, (oh + 1) * d.Wo);
        const std::size_t count = row_end - pos;
        const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh + ki) - static_cast<std::ptrdiff_t>(d.pad);
        PatchRun run{0, 0, count, 0, false};
        if (ih >= 0 && ih < static_cast<std::ptrdiff_t>(d.H)) {
            const std::ptrdiff_t iw0 =
                static_cast<std::ptrdiff_t>(ow0 + kj) - static_cast<std::ptrdiff_t>(d.pad);
            const std::ptrdiff_t lead = std::clamp<std::ptrdiff_t>(-iw0, 0, static_cast<std::ptrdiff_t>(count));
            const std::ptrdiff_t last = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(d.W) - iw0, 0,
                                                                   static_cast<std::ptrdiff_t>(count));
            run.lead = static_cast<std::size_t>(lead);
            run.valid = static_cast<std::size_t>(last - lead);
            run.src_off = static_cast<std::size_t>(ih) * d.W + static_cast<std::size_t>(iw0 + lead);
            run.in_bounds = true;
        }
        fn(out_off, run);
        out_off += count;
        pos = row_end;
    }
}

// Gather one column chunk [K x (hi-lo)] of the padded input patches.
void im2col_chunk(const float* x, const ConvDims& d, std::size_t lo, std::size_t hi, float* cols) {
    const std::size_t nc = hi - lo;
    for (std::size_t r = 0; r < d.K; ++r) {
        const float* plane = x + (r / (d.k * d.k)) * d.H * d.W;
        float* out = cols + r * nc;
        for_each_patch_row(d, lo, hi, r, [&](std::size_t off, const PatchRun& run) {
            float* dst = out + off;
            if (!run.in_bounds) {
                std::fill_n(dst, run.count, 0.0f);
                return;
            }
            std::fill_n(dst, run.lead, 0.0f);
            std::copy_n(plane + run.src_off, run.valid, dst + run.lead);
            std::fill_n(dst + run.lead + run.valid, run.count - run.lead - run.valid, 0.0f);
        });
    }
}

void col2im_accum(const float* cols, const ConvDims& d, std::size_t lo, std::size_t hi, float* dx) {
    const std::size_t nc = hi - lo;
    for (std::size_t r = 0; r < d.K; ++r) {
        float* plane = dx + (r / (d.k * d.k)) * d.H * d.W;
        const float* src = cols + r * nc;
        for_each_patch_row(d, lo, hi, r, [&](std::size_t off, const PatchRun& run) {
            if (!run.in_bounds) return;
            const float* s = src + off + run.lead;
            float* t = plane + run.src_off;
            for (std::size_t j = 0; j < run.valid; ++j) t[j] += s[j];
        });
    }
}

std::size_t conv_chunk_cols(const ConvDims& d) {
    const std::size_t budget = 2'000'000; // floats of im2col scratch
    const std::size_t npos = d.Ho * d.Wo;
    std::size_t chunk = budget / std::max<std::size_t>(1, d.K);
    // keep at least a few chunks per worker so the split balances
    chunk = std::min(chunk, std::max<std::size_t>(2048, npos / (4 * detail::worker_count())));
    return std::clamp<std::size_t>(chunk, 64, npos);
}

// Bin i of n over an axis of extent h: [floor(i*h/n), max(that+1, ceil((i+1)*h/n))).
// Bins are never empty and jointly cover [0, h); the upper bound cannot
// exceed h because floor(i*h/n) <= h-1 and ceil((i+1)*h/n) <= h.
std::pair<std::size_t, std::size_t> bin_bounds(std::size_t i, std::size_t h, std::size_t n) {
    const std::size_t lo = i * h / n;
    const std::size_t hi = std::max(lo + 1, ((i + 1) * h + n - 1) / n);
    return {lo, hi};
}

} // namespace

Tensor conv2d(Tape* tape, const Tensor& input, const Tensor& kernel, const Tensor& bias,
              Padding padding) {
    const ConvDims d = conv_dims(input, kernel, bias, padding);
    Tensor out = Tensor::zeros({d.B, d.Cout, d.Ho, d.Wo});

    const std::size_t npos = d.Ho * d.Wo;
    const std::size_t chunk = conv_chunk_cols(d);
    const std::size_t nchunks = (npos + chunk - 1) / chunk;

    // Chunks cover disjoint output columns, so they can run on separate
    // workers with private scratch; per-element order is unchanged.
    struct ForwardCtx {
        const ConvDims* d;
        std::size_t npos, chunk;
        const float* x;
        const float* kptr;
        const float* bptr;
        float* y;
    };
    auto run_chunks = [](std::size_t c_lo, std::size_t c_hi, void* raw) {
        auto* ctx = static_cast<ForwardCtx*>(raw);
        const ConvDims& d = *ctx->d;
        std::vector<float> cols(d.K * ctx->chunk);
        std::vector<float> tmp(d.Cout * ctx->chunk);
        for (std::size_t ci = c_lo; ci < c_hi; ++ci) {
            const std::size_t lo = ci * ctx->chunk;
            const std::size_t hi = std::min(ctx->npos, lo + ctx->chunk);
            const std::size_t nc = hi - lo;
            im2col_chunk(ctx->x, d, lo, hi, cols.data());
            std::fill(tmp.begin(), tmp.begin() + d.Cout * nc, 0.0f);
            detail::gemm_nn_st(d.Cout, d.K, nc, ctx->kptr, cols.data(), tmp.data());
            for (std::size_t c = 0; c < d.Cout; ++c) {
                const float bv = ctx->bptr[c];
                float* dst = ctx->y + c * ctx->npos + lo;
                const float* src = tmp.data() + c * nc;
                for (std::size_t i = 0; i < nc; ++i) dst[i] = src[i] + bv;
            }
        }
    };

    for (std::size_t b = 0; b < d.B; ++b) {
        ForwardCtx ctx{&d,
                       npos,
                       chunk,
                       input.values().data() + b * d.Cin * d.H * d.W,
                       kernel.values().data(),
                       bias.values().data(),
                       out.values().data() + b * d.Cout * npos};
        detail::parallel_chunks(nchunks, 1, run_chunks, &ctx);
    }

    if (tracked(tape, {&input, &kernel, &bias})) {
        out.set_requires_grad(true);
        Tensor in_c = input, k_c = kernel, b_c = bias, out_c = out;
        tape->record([in_c, k_c, b_c, out_c, d]() mutable {
            const std::size_t npos = d.Ho * d.Wo;
            const std::size_t chunk = conv_chunk_cols(d);
            std::vector<float> cols(d.K * chunk);
            std::vector<float> dy_chunk(d.Cout * chunk);
            std::vector<float> dcols;
            const bool need_dx = in_c.requires_grad();
            const bool need_dw = k_c.requires_grad();
            if (need_dx) dcols.resize(d.K * chunk);

            for (std::size_t b = 0; b < d.B; ++b) {
                const float* x = in_c.values().data() + b * d.Cin * d.H * d.W;
                const float* dy = out_c.grad().data() + b * d.Cout * npos;
                if (b_c.requires_grad()) {
                    float* db = b_c.grad().data();
                    for (std::size_t c = 0; c < d.Cout; ++c) {
                        float acc = 0.0f;
                        const float* row = dy + c * npos;
                        for (std::size_t i = 0; i < npos; ++i) acc += row[i];
                        db[c] += acc;
                    }
                }
                if (!need_dx && !need_dw) continue;
                for (std::size_t lo = 0; lo < npos; lo += chunk) {
                    const std::size_t hi = std::min(npos, lo + chunk);
                    const std::size_t nc = hi - lo;
                    im2col_chunk(x, d, lo, hi, cols.data());
                    for (std::size_t c = 0; c < d.Cout; ++c)
                        std::copy_n(dy + c * npos + lo, nc, dy_chunk.data() + c * nc);
                    if (need_dw)
                        detail::gemm_nt(d.Cout, nc, d.K, dy_chunk.data(), cols.data(),
                                        k_c.grad().data());
                    if (need_dx) {
                        std::fill(dcols.begin(), dcols.begin() + d.K * nc, 0.0f);
                        detail::gemm_tn(d.K, d.Cout, nc, k_c.values().data(), dy_chunk.data(),
                                        dcols.data());
                        col2im_accum(dcols.data(), d, lo, hi,
                                     in_c.grad().data() + b * d.Cin * d.H * d.W);
                    }
                }
            }
        });
    }
    return out;
}

Tensor maxpool2d(Tape* tape, const Tensor& input) {
    require(input.shape().size() == 4, "maxpool2d input must be [B,C,H,W]");
    const std::size_t B = input.shape()[0], C = input.shape()[1], H = input.shape()[2],
                      W = input.shape()[3];
    require(H >= 2 && W >= 2, "maxpool2d input " + shape_str(input.shape()) + " is undersized");
    const std::size_t Ho = H / 2, Wo = W / 2;
    Tensor out = Tensor::zeros({B, C, Ho, Wo});

    auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
    const float* x = input.values().data();
    float* y = out.values().data();
    std::size_t oi = 0;
    for (std::size_t bc = 0; bc < B * C; ++bc) {
        const float* plane = x + bc * H * W;
        for (std::size_t oh = 0; oh < Ho; ++oh)
            for (std::size_t ow = 0; ow < Wo; ++ow, ++oi) {
                std::size_t best_idx = (2 * oh) * W + 2 * ow;
                float best = plane[best_idx];
                for (std::size_t di = 0; di < 2; ++di)
                    for (std::size_t dj = 0; dj < 2; ++dj) {
                        std::size_t idx = (2 * oh + di) * W + (2 * ow + dj);
                        if (plane[idx] > best) { // first max in row-major order wins ties
                            best = plane[idx];
                            best_idx = idx;
                        }
                    }
                y[oi] = best;
                (*argmax)[oi] = bc * H * W + best_idx;
            }
    }

    if (tracked(tape, {&input})) {
        out.set_requires_grad(true);
        Tensor in_c = input, out_c = out;
        tape->record([in_c, out_c, argmax]() mutable {
            float* dx = in_c.grad().data();
            const float* dy = out_c.grad().data();
            for (std::size_t i = 0; i < out_c.size(); ++i) dx[(*argmax)[i]] += dy[i];
        });
    }
    return out;
}

Tensor adaptive_max_pool(Tape* tape, const Tensor& input, std::size_t bins) {
    require(input.shape().size() == 4, "adaptive_max_pool input must be [B,C,H,W]");
    require(bins >= 1, "adaptive_max_pool needs at least one bin");
    const std::size_t B = input.shape()[0], C = input.shape()[1], H = input.shape()[2],
                      W = input.shape()[3];
    require(H >= 1 && W >= 1, "adaptive_max_pool on an empty map");
    Tensor out = Tensor::zeros({B, C, bins, bins});

    auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
    const float* x = input.values().data();
    float* y = out.values().data();
    std::size_t oi = 0;
    for (std::size_t bc = 0; bc < B * C; ++bc) {
        const float* plane = x + bc * H * W;
        for (std::size_t bi = 0; bi < bins; ++bi) {
            auto [r0, r1] = bin_bounds(bi, H, bins);
            for (std::size_t bj = 0; bj < bins; ++bj, ++oi) {
                auto [c0, c1] = bin_bounds(bj, W, bins);
                std::size_t best_idx = r0 * W + c0;
                float best = plane[best_idx];
                for (std::size_t i = r0; i < r1; ++i)
                    for (std::size_t j = c0; j < c1; ++j) {
                        std::size_t idx = i * W + j;
                        if (plane[idx] > best) {
                            best = plane[idx];
                            best_idx = idx;
                        }
                    }
                y[oi] = best;
                (*argmax)[oi] = bc * H * W + best_idx;
            }
        }
    }

    if (tracked(tape, {&input})) {
        out.set_requires_grad(true);
        Tensor in_c = input, out_c = out;
        tape->record([in_c, out_c, argmax]() mutable {
            float* dx = in_c.grad().data();
            const float* dy = out_c.grad().data();
            for (std::size_t i = 0; i < out_c.size(); ++i) dx[(*argmax)[i]] += dy[i];
        });
    }
    return out;
}

Tensor spp(Tape* tape, const Tensor& input, const std::vector<std::size_t>& levels) {
    require(input.shape().size() == 4, "spp input must be [B,C,H,W]");
    require(!levels.empty(), "spp needs at least one level");
    const std::size_t B = input.shape()[0], C = input.shape()[1], H = input.shape()[2],
                      W = input.shape()[3];
    std::size_t p = 0;
    for (std::size_t l : levels) {
        require(l >= 1, "spp level must be >= 1");
        p += l * l;
    }
    Tensor out = Tensor::zeros({B, p * C});

    auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
    const float* x = input.values().data();
    float* y = out.values().data();
    std::size_t oi = 0;
    for (std::size_t b = 0; b < B; ++b) {
        // level-major, then channel, then row-major bin
        for (std::size_t l : levels) {
            for (std::size_t c = 0; c < C; ++c) {
                const float* plane = x + (b * C + c) * H * W;
                for (std::size_t bi = 0; bi < l; ++bi) {
                    auto [r0, r1] = bin_bounds(bi, H, l);
                    for (std::size_t bj = 0; bj < l; ++bj, ++oi) {
                        auto [c0, c1] = bin_bounds(bj, W, l);
                        std::size_t best_idx = r0 * W + c0;
                        float best = plane[best_idx];
                        for (std::size_t i = r0; i < r1; ++i)
                            for (std::size_t j = c0; j < c1; ++j) {
                                std::size_t idx = i * W + j;
                                if (plane[idx] > best) {
                                    best = plane[idx];
                                    best_idx = idx;
                                }
                            }
                        y[oi] = best;
                        (*argmax)[oi] = (b * C + c) * H * W + best_idx;
                    }
                }
            }
        }
    }

    if (tracked(tape, {&input})) {
        out.set_requires_grad(true);
        Tensor in_c = input, out_c = out;
        tape->record([in_c, out_c, argmax]() mutable {
            float* dx = in_c.grad().data();
            const float* dy = out_c.grad().data();
            for (std::size_t i = 0; i < out_c.size(); ++i) dx[(*argmax)[i]] += dy[i];
        });
    }
    return out;
}

Tensor dense(Tape* tape, const Tensor& input, const Tensor& weight, const Tensor& bias) {
    require(input.shape().size() == 2, "dense input must be [B,F]");
    require(weight.shape().size() == 2, "dense weight must be [F,G]");
    const std::size_t B = input.shape()[0], F = input.shape()[1], G = weight.shape()[1];
    require(weight.shape()[0] == F, "dense shape mismatch: input " + shape_str(input.shape()) +
                                        " vs weight " + shape_str(weight.shape()));
    require(bias.shape().size() == 1 && bias.shape()[0] == G, "dense bias must be [G]");

    Tensor out = Tensor::zeros({B, G});
    detail::gemm_nn(B, F, G, input.values().data(), weight.values().data(), out.values().data());
    float* y = out.values().data();
    const float* bp = bias.values().data();
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t g = 0; g < G; ++g) y[b * G + g] += bp[g];

    if (tracked(tape, {&input, &weight, &bias})) {
        out.set_requires_grad(true);
        Tensor in_c = input, w_c = weight, b_c = bias, out_c = out;
        tape->record([in_c, w_c, b_c, out_c, B, F, G]() mutable {
            const float* dy = out_c.grad().data();
            if (b_c.requires_grad()) {
                float* db = b_c.grad().data();
                for (std::size_t b = 0; b < B; ++b)
                    for (std::size_t g = 0; g < G; ++g) db[g] += dy[b * G + g];
            }
            if (w_c.requires_grad())
                detail::gemm_tn(F, B, G, in_c.values().data(), dy, w_c.grad().data());
            if (in_c.requires_grad())
                detail::gemm_nt(B, G, F, dy, w_c.values().data(), in_c.grad().data());
        });
    }
    return out;
}

Tensor relu(Tape* tape, const Tensor& x) {
    Tensor out = Tensor::zeros(x.shape());
    const float* in = x.values().data();
    float* y = out.values().data();
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = in[i] > 0.0f ? in[i] : 0.0f;

    if (tracked(tape, {&x})) {
        out.set_requires_grad(true);
        Tensor x_c = x, out_c = out;
        tape->record([x_c, out_c]() mutable {
            const float* in = x_c.values().data();
            const float* dy = out_c.grad().data();
            float* dx = x_c.grad().data();
            for (std::size_t i = 0; i < x_c.size(); ++i)
                if (in[i] > 0.0f) dx[i] += dy[i];
        });
    }
    return out;
}

Tensor hard_sigmoid(Tape* tape, const Tensor& x) {
    Tensor out = Tensor::zeros(x.shape());
    const float* in = x.values().data();
    float* y = out.values().data();
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = std::clamp(0.2f * in[i] + 0.5f, 0.0f, 1.0f);

    if (tracked(tape, {&x})) {
        out.set_requires_grad(true);
        Tensor x_c = x, out_c = out;
        tape->record([x_c, out_c]() mutable {
            const float* in = x_c.values().data();
            const float* dy = out_c.grad().data();
            float* dx = x_c.grad().data();
            for (std::size_t i = 0; i < x_c.size(); ++i)
                if (in[i] > -2.5f && in[i] < 2.5f) dx[i] += 0.2f * dy[i];
        });
    }
    return out;
}

Tensor mse_loss(Tape* tape, const Tensor& pred, const Tensor& target) {
    require(pred.shape() == target.shape(), "mse_loss shape mismatch: " + shape_str(pred.shape()) +
                                                " vs " + shape_str(target.shape()));
    const std::size_t n = pred.size();
    require(n > 0, "mse_loss on empty tensors");
    const float* p = pred.values().data();
    const float* t = target.values().data();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = static_cast<double>(p[i]) - static_cast<double>(t[i]);
        acc += diff * diff;
    }
    Tensor out = Tensor::from({1}, {static_cast<float>(acc / static_cast<double>(n))});

    if (tracked(tape, {&pred, &target})) {
        out.set_requires_grad(true);
        Tensor p_c = pred, t_c = target, out_c = out;
        tape->record([p_c, t_c, out_c, n]() mutable {
            const float dl = out_c.grad()[0];
            const float scale = 2.0f / static_cast<float>(n);
            const float* p = p_c.values().data();
            const float* t = t_c.values().data();
            if (p_c.requires_grad()) {
                float* dp = p_c.grad().data();
                for (std::size_t i = 0; i < n; ++i) dp[i] += dl * scale * (p[i] - t[i]);
            }
            if (t_c.requires_grad()) {
                float* dt = t_c.grad().data();
                for (std::size_t i = 0; i < n; ++i) dt[i] -= dl * scale * (p[i] - t[i]);
            }
        });
    }
    return out;
}

Tensor sum_all(Tape* tape, const Tensor& x) {
    double acc = 0.0;
    for (float v : x.values()) acc += v;
    Tensor out = Tensor::from({1}, {static_cast<float>(acc)});

    if (tracked(tape, {&x})) {
        out.set_requires_grad(true);
        Tensor x_c = x, out_c = out;
        tape->record([x_c, out_c]() mutable {
            const float dl = out_c.grad()[0];
            float* dx = x_c.grad().data();
            for (std::size_t i = 0; i < x_c.size(); ++i) dx[i] += dl;
        });
    }
    return out;
}

} // namespace robnet
