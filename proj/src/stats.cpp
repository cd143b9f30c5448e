#include "robnet/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace robnet {

double prediction_error(const std::vector<double>& v_true, const std::vector<double>& v_pred) {
    if (v_true.size() != v_pred.size())
        throw std::invalid_argument("prediction_error needs equal-length curves (" +
                                    std::to_string(v_true.size()) + " vs " +
                                    std::to_string(v_pred.size()) + ")");
    if (v_true.empty()) throw std::invalid_argument("prediction_error on empty curves");
    double acc = 0.0;
    for (std::size_t i = 0; i < v_true.size(); ++i) acc += std::abs(v_true[i] - v_pred[i]);
    return acc / static_cast<double>(v_true.size());
}

namespace {

// Lentz continued fraction for Q(a,x), x > a+1
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// series for P(a,x), x <= a+1
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double x, double dof) { return gamma_q(dof / 2.0, x / 2.0); }

KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis needs at least two groups");
    std::size_t n = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw std::invalid_argument("kruskal_wallis group is empty");
        n += g.size();
    }

    // pooled midranks
    std::vector<std::pair<double, std::size_t>> pooled; // (value, group)
    pooled.reserve(n);
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (double v : groups[gi]) pooled.emplace_back(v, gi);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0; // sum of t^3 - t over tie runs
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && pooled[j].first == pooled[i].first) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k) rank_sum[pooled[k].second] += midrank;
        i = j;
    }

    KruskalWallisResult result;
    for (const auto& g : groups)
        if (g.size() < 5) result.small_sample = true;

    const double nn = static_cast<double>(n);
    double h = 0.0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        h += rank_sum[gi] * rank_sum[gi] / static_cast<double>(groups[gi].size());
    h = 12.0 / (nn * (nn + 1.0)) * h - 3.0 * (nn + 1.0);

    const double correction = 1.0 - tie_term / (nn * nn * nn - nn);
    if (correction <= 0.0) {
        // every pooled value identical: no evidence of any difference
        result.h = 0.0;
        result.p = 1.0;
        return result;
    }
    result.h = h / correction;
    result.p = chi_square_sf(result.h, static_cast<double>(groups.size() - 1));
    return result;
}

std::string sign_str(SignificanceSign s) {
    switch (s) {
    case SignificanceSign::Plus: return "+";
    case SignificanceSign::Minus: return "-";
    case SignificanceSign::Similar: return "~";
    }
    throw std::logic_error("unknown sign");
}

SignificanceSign significance_sign(const std::vector<double>& errors_a,
                                   const std::vector<double>& errors_b, double alpha) {
    KruskalWallisResult kw = kruskal_wallis({errors_a, errors_b});
    if (kw.p >= alpha) return SignificanceSign::Similar;
    const double mean_a = std::accumulate(errors_a.begin(), errors_a.end(), 0.0) /
                          static_cast<double>(errors_a.size());
    const double mean_b = std::accumulate(errors_b.begin(), errors_b.end(), 0.0) /
                          static_cast<double>(errors_b.size());
    return mean_a < mean_b ? SignificanceSign::Plus : SignificanceSign::Minus;
}

BenchResult bench_runtime(const std::function<void()>& task, std::size_t warmups,
                          std::size_t repetitions) {
    if (repetitions < 1) throw std::invalid_argument("bench_runtime needs at least one repetition");
    for (std::size_t i = 0; i < warmups; ++i) task();
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::size_t i = 0; i < repetitions; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        task();
        auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    BenchResult r;
    r.repetitions = repetitions;
    r.min_s = *std::min_element(samples.begin(), samples.end());
    r.mean_s = std::accumulate(samples.begin(), samples.end(), 0.0) /
               static_cast<double>(samples.size());
    std::sort(samples.begin(), samples.end());
    const std::size_t mid = samples.size() / 2;
    r.median_s = samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
    return r;
}

} // namespace robnet
