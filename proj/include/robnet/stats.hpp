#pragma once

#include <functional>
#include <string>
#include <vector>

namespace robnet {

/// Mean absolute deviation between two equal-length curves.
double prediction_error(const std::vector<double>& v_true, const std::vector<double>& v_pred);

struct KruskalWallisResult {
    double h = 0.0;
    double p = 1.0;
    bool small_sample = false; // some group has fewer than 5 samples; the
                               // chi-square approximation is rough there
};

/// Kruskal-Wallis H with midrank tie correction; p from the chi-square
/// survival function with k-1 degrees of freedom. Identical values across
/// all groups give H = 0, p = 1.
KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Upper regularized incomplete gamma Q(a, x); chisq_sf(x, k) = Q(k/2, x/2).
double gamma_q(double a, double x);
double chi_square_sf(double x, double dof);

enum class SignificanceSign { Plus, Minus, Similar };

std::string sign_str(SignificanceSign s);

/// '+' when the first sample's mean error is significantly smaller at
/// level alpha, '-' when larger, '~' otherwise.
SignificanceSign significance_sign(const std::vector<double>& errors_a,
                                   const std::vector<double>& errors_b, double alpha = 0.05);

struct BenchResult {
    double median_s = 0.0;
    double mean_s = 0.0;
    double min_s = 0.0;
    std::size_t repetitions = 0;
};

/// Wall-clock timing of a closed task; warmup runs are not recorded.
BenchResult bench_runtime(const std::function<void()>& task, std::size_t warmups,
                          std::size_t repetitions);

} // namespace robnet
