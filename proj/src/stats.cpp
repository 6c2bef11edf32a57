#include "conewalk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conewalk/rng.hpp"

namespace conewalk {

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double mean(std::span<const double> x) {
    if (x.empty()) return std::numeric_limits<double>::quiet_NaN();
    return sum(x) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(n - 1);
}

double sample_covariance(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw std::invalid_argument("covariance: length mismatch");
    if (n < 2) return 0.0;
    const double mx = mean(x), my = mean(y);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mx) * (y[i] - my);
    return acc / static_cast<double>(n - 1);
}

std::vector<double> autocorrelations(std::span<const double> x, int max_lag) {
    std::vector<double> out(static_cast<std::size_t>(max_lag),
                            std::numeric_limits<double>::quiet_NaN());
    const std::size_t n = x.size();
    if (n < 2) return out;
    const double m = mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (c0 <= 0.0) return out;
    for (int lag = 1; lag <= max_lag; ++lag) {
        if (static_cast<std::size_t>(lag) >= n) break;
        double c = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) c += (x[i] - m) * (x[i + lag] - m);
        out[static_cast<std::size_t>(lag - 1)] = c / c0;
    }
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        q += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

KsResult ks_one_sample_normal(std::vector<double> sample) {
    KsResult r;
    r.n = sample.size();
    if (sample.empty()) return r;
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = normal_cdf(sample[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    r.distance = d;
    r.p_value = kolmogorov_survival(std::sqrt(n) * d);
    return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    KsResult r;
    if (a.empty() || b.empty()) return r;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    r.distance = d;
    r.n = a.size() + b.size();
    const double n_eff = na * nb / (na + nb);
    r.p_value = kolmogorov_survival(std::sqrt(n_eff) * d);
    return r;
}

LogSurvivalFit fit_log_survival_tail(std::span<const double> sample, double tail_fraction) {
    LogSurvivalFit out;
    const std::size_t n = sample.size();
    if (n < 10) return out;
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double threshold = sorted[static_cast<std::size_t>(
        std::floor((1.0 - tail_fraction) * static_cast<double>(n - 1)))];

    // distinct values v >= threshold with S(v) = #{x > v}/n > 0
    std::vector<double> xs, ys;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sorted[j] == sorted[i]) ++j;
        const double v = sorted[i];
        const std::size_t above = n - j; // strictly greater
        if (v >= threshold && above > 0) {
            xs.push_back(v);
            ys.push_back(std::log(static_cast<double>(above) / static_cast<double>(n)));
        }
        i = j;
    }
    out.points = xs.size();
    if (xs.size() < 3) return out;

    const double mx = mean(xs), my = mean(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - (out.intercept + out.slope * xs[k]);
        ss_res += e * e;
    }
    out.r2 = 1.0 - ss_res / syy;
    out.usable = true;
    return out;
}

double ratio_se(std::span<const double> num, std::span<const double> den) {
    const std::size_t m = num.size();
    if (m != den.size()) throw std::invalid_argument("ratio_se: length mismatch");
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double nbar = mean(num), dbar = mean(den);
    const double r = nbar / dbar;
    const double snn = sample_variance(num);
    const double sdd = sample_variance(den);
    const double snd = sample_covariance(num, den);
    const double var = (snn - 2.0 * r * snd + r * r * sdd) / (static_cast<double>(m) * dbar * dbar);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

double block_bootstrap_ratio_se(std::span<const double> num, std::span<const double> den,
                                int replicates, std::uint64_t seed) {
    const std::size_t m = num.size();
    if (m < 4 || replicates < 2) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t block =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::cbrt(m))));
    const std::size_t blocks_needed = (m + block - 1) / block;
    const std::size_t starts = m - block + 1;

    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(replicates));
    for (int rep = 0; rep < replicates; ++rep) {
        auto rng = make_engine(seed, static_cast<std::uint64_t>(rep) + 1);
        double sn = 0.0, sd = 0.0;
        std::size_t taken = 0;
        for (std::size_t b = 0; b < blocks_needed; ++b) {
            const std::size_t start =
                static_cast<std::size_t>(uniform_unit(rng) * static_cast<double>(starts));
            for (std::size_t k = 0; k < block && taken < m; ++k, ++taken) {
                sn += num[start + k];
                sd += den[start + k];
            }
        }
        if (sd > 0.0) estimates.push_back(sn / sd);
    }
    return std::sqrt(sample_variance(estimates));
}

} // namespace conewalk
