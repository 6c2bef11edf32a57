#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace conewalk {

double sum(std::span<const double> x);
double mean(std::span<const double> x);
double sample_variance(std::span<const double> x);  // unbiased, 0 for n < 2
double sample_covariance(std::span<const double> x, std::span<const double> y);

// Autocorrelations at lags 1..max_lag, normalized by the lag-0 variance.
// NaN entries signal zero variance or too short a series.
std::vector<double> autocorrelations(std::span<const double> x, int max_lag);

double normal_cdf(double x);

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

KsResult ks_one_sample_normal(std::vector<double> sample);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LogSurvivalFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
    bool usable = false;
};

// Fits ln S(v) ~ slope * v over the distinct sample values in the upper
// `tail_fraction` of the distribution (survival > 0). Needs >= 3 points.
LogSurvivalFit fit_log_survival_tail(std::span<const double> sample, double tail_fraction);

// Standard error of R = sum(num)/sum(den) by the delta method on the ratio
// of means, using the excursion-level covariance.
double ratio_se(std::span<const double> num, std::span<const double> den);

// Moving-block bootstrap second opinion for the same ratio: resamples blocks
// of consecutive excursions, so weak serial dependence (if any) inflates the
// estimate instead of being hidden.
double block_bootstrap_ratio_se(std::span<const double> num, std::span<const double> den,
                                int replicates, std::uint64_t seed);

} // namespace conewalk
