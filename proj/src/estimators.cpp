#include "conewalk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conewalk/parallel.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/stats.hpp"

namespace conewalk {

namespace {

std::vector<double> to_double(const std::vector<std::uint32_t>& v) {
    return std::vector<double>(v.begin(), v.end());
}

} // namespace

SpeedEstimate estimate_speed(const ExcursionStats& s) {
    if (s.size() == 0) throw PreconditionError("estimate_speed: no excursions");
    const auto delta = to_double(s.deltas);
    const auto tau = to_double(s.taus);
    SpeedEstimate est;
    est.excursions = s.size();
    est.v.value = sum(delta) / sum(tau);
    est.v.se = ratio_se(delta, tau);
    est.bootstrap_se = block_bootstrap_ratio_se(delta, tau, 200, 0x9e3779b9u);
    est.se_valid = s.size() >= 100;
    return est;
}

VarianceEstimate estimate_variance(const ExcursionStats& s, double v) {
    if (s.size() < 2) throw PreconditionError("estimate_variance: need >= 2 excursions");
    const auto tau = to_double(s.taus);
    const std::vector<double> xi = residuals(s, v);
    std::vector<double> xi2(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) xi2[i] = xi[i] * xi[i];

    VarianceEstimate est;
    est.Sigma = mean(xi2);
    est.sigma2.value = sum(xi2) / sum(tau);
    est.sigma2.se = ratio_se(xi2, tau);
    est.bootstrap_se = block_bootstrap_ratio_se(xi2, tau, 200, 0x51ed2701u);
    est.degenerate = est.Sigma <= 0.0;

    // split sample: v from the first half, residuals on the second
    const std::size_t half = s.size() / 2;
    if (half >= 1 && s.size() - half >= 2) {
        double d1 = 0.0, t1 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            d1 += s.deltas[i];
            t1 += s.taus[i];
        }
        const double v1 = d1 / t1;
        std::vector<double> xi2b, taub;
        for (std::size_t i = half; i < s.size(); ++i) {
            const double e = static_cast<double>(s.deltas[i]) - v1 * static_cast<double>(s.taus[i]);
            xi2b.push_back(e * e);
            taub.push_back(static_cast<double>(s.taus[i]));
        }
        est.sigma2_split.value = sum(xi2b) / sum(taub);
        est.sigma2_split.se = ratio_se(xi2b, taub);
    }
    return est;
}

ValueWithError direct_speed(std::span<const double> distance_over_n) {
    ValueWithError v;
    v.value = mean(distance_over_n);
    if (distance_over_n.size() >= 2)
        v.se = std::sqrt(sample_variance(distance_over_n) /
                         static_cast<double>(distance_over_n.size()));
    return v;
}

CltReport clt_check_sample(std::vector<double> standardized) {
    CltReport r;
    r.replicas = standardized.size();
    r.ks_threshold = 1.63 / std::sqrt(static_cast<double>(standardized.size()));
    const KsResult ks = ks_one_sample_normal(standardized);
    r.ks_distance = ks.distance;
    r.ks_p_value = ks.p_value;
    r.pass = r.ks_distance <= r.ks_threshold;
    r.standardized = std::move(standardized);
    return r;
}

CltReport clt_check(const DrivingMeasure& m, const RewriteSystem& rw, std::uint32_t n,
                    std::uint32_t replicas, std::uint64_t seed, double v, double sigma2) {
    if (replicas < 2) throw PreconditionError("clt_check: need at least 2 replicas");
    if (!(sigma2 > 0.0)) throw PreconditionError("clt_check: sigma^2 must be positive");
    const double sigma = std::sqrt(sigma2);

    std::vector<double> standardized(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        const std::uint32_t d = walk_final_distance(m, rw, n, stream_seed(seed, r));
        standardized[r] =
            (static_cast<double>(d) - static_cast<double>(n) * v) / (sigma * std::sqrt(n));
    });

    CltReport report = clt_check_sample(std::move(standardized));
    report.n = n;
    report.v_used = v;
    report.sigma2_used = sigma2;
    return report;
}

LazyEstimate lazy_corrected_estimates(const ExcursionStats& s, int ell) {
    if (ell < 1) throw std::invalid_argument("lazy estimates: ell >= 1 required");
    if (ell > 1 && s.time_spans.size() != s.size())
        throw std::invalid_argument("lazy estimates: stats carry no base-time spans");

    LazyEstimate est;
    est.ell = ell;
    est.excursions = s.size();
    const auto delta = to_double(s.deltas);
    const auto tau = to_double(s.taus);
    const std::vector<double> span = (ell == 1) ? tau : to_double(s.time_spans);

    est.v.value = sum(delta) / sum(span);
    est.v.se = ratio_se(delta, span);
    std::vector<double> xi2(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const double e = delta[i] - est.v.value * span[i];
        xi2[i] = e * e;
    }
    est.sigma2.value = sum(xi2) / sum(span);
    est.sigma2.se = ratio_se(xi2, span);

    const double factor = 2.0 / (ell + 1.0);
    const double v_lazy = sum(delta) / sum(tau);
    est.v_const_corrected.value = factor * v_lazy;
    est.v_const_corrected.se = factor * ratio_se(delta, tau);
    std::vector<double> xi2c(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        const double e = delta[i] - v_lazy * tau[i];
        xi2c[i] = e * e;
    }
    est.sigma2_const_corrected = factor * sum(xi2c) / sum(tau);
    return est;
}

namespace {

struct WeightedReplica {
    double log_weight_plus = 0.0; // reused for single-target runs
    double distance = 0.0;
};

// Per-replica log likelihood ratios from the atom occurrence counts.
std::vector<double> log_ratios(const DrivingMeasure& base, const DrivingMeasure& target) {
    if (base.atoms.size() != target.atoms.size())
        throw std::invalid_argument("reweighting: measures have different supports");
    std::vector<double> out(base.atoms.size());
    for (std::size_t i = 0; i < base.atoms.size(); ++i) {
        if (base.atoms[i].word != target.atoms[i].word)
            throw std::invalid_argument("reweighting: atom words differ");
        out[i] = std::log(target.atoms[i].prob) - std::log(base.atoms[i].prob);
    }
    return out;
}

struct SelfNormalized {
    double v = 0.0, se = 0.0, ess = 0.0;
};

SelfNormalized self_normalized_speed(std::span<const double> weights,
                                     std::span<const double> distance_over_n) {
    SelfNormalized out;
    double sw = 0.0, sw2 = 0.0, swd = 0.0;
    for (std::size_t r = 0; r < weights.size(); ++r) {
        sw += weights[r];
        sw2 += weights[r] * weights[r];
        swd += weights[r] * distance_over_n[r];
    }
    out.v = swd / sw;
    out.ess = sw * sw / sw2;
    double var = 0.0;
    for (std::size_t r = 0; r < weights.size(); ++r) {
        const double e = weights[r] * (distance_over_n[r] - out.v);
        var += e * e;
    }
    out.se = std::sqrt(var) / sw;
    return out;
}

} // namespace

ReweightedEstimate reweighted_speed(std::span<const Trajectory> batch, const DrivingMeasure& base,
                                    const DrivingMeasure& target, std::uint32_t horizon,
                                    double min_ess) {
    if (batch.empty()) throw PreconditionError("reweighted_speed: empty batch");
    const std::vector<double> lr = log_ratios(base, target);

    std::vector<double> weights(batch.size()), dist(batch.size());
    for (std::size_t r = 0; r < batch.size(); ++r) {
        const Trajectory& t = batch[r];
        if (t.is_lazy()) throw std::invalid_argument("reweighted_speed: plain walks only");
        if (horizon > t.steps) throw std::invalid_argument("reweighted_speed: horizon too long");
        double lw = 0.0;
        for (std::uint32_t i = 0; i < horizon; ++i) lw += lr[t.increments[i]];
        weights[r] = std::exp(lw);
        dist[r] = static_cast<double>(t.distances[horizon]) / static_cast<double>(horizon);
    }

    const SelfNormalized sn = self_normalized_speed(weights, dist);
    // NaN-safe: underflowed weights give ess = 0/0
    if (!(sn.ess >= min_ess))
        throw PreconditionError("reweighted_speed: effective sample size " +
                                std::to_string(sn.ess) +
                                " < " + std::to_string(min_ess) +
                                "; shrink the perturbation or the horizon");
    ReweightedEstimate est;
    est.v = sn.v;
    est.se = sn.se;
    est.ess = sn.ess;
    est.replicas = batch.size();
    return est;
}

DrivingMeasure PerturbationFamily::perturbed(double eps) const {
    if (atom_indices.size() != direction.size())
        throw std::invalid_argument("perturbation family: index/direction size mismatch");
    double total = 0.0;
    for (double d : direction) total += d;
    if (std::abs(total) > 1e-12)
        throw std::invalid_argument("perturbation family: direction must sum to zero");
    DrivingMeasure m = base;
    for (std::size_t i = 0; i < atom_indices.size(); ++i) {
        double& p = m.atoms.at(atom_indices[i]).prob;
        p += eps * direction[i];
        if (!(p > 0.0))
            throw std::invalid_argument("perturbation family: step leaves the simplex");
    }
    m.finalize();
    return m;
}

SmoothnessReport smoothness_probe(const PerturbationFamily& family, const RewriteSystem& rw,
                                  const ConeAutomaton& a, std::uint32_t n, std::uint32_t replicas,
                                  std::uint64_t seed, std::span<const double> step_sizes) {
    if (step_sizes.size() < 1) throw std::invalid_argument("smoothness probe: no step sizes");

    // one common batch of base trajectories; every derivative reuses it
    std::vector<Trajectory> batch(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        batch[r] = run_walk(family.base, rw, a, n, stream_seed(seed, r));
    });

    std::vector<double> dist(replicas);
    for (std::size_t r = 0; r < replicas; ++r)
        dist[r] = static_cast<double>(batch[r].distances[n]) / static_cast<double>(n);

    SmoothnessReport report;
    report.n = n;
    report.replicas = replicas;
    report.v_base = mean(dist);

    for (double step : step_sizes) {
        const DrivingMeasure plus = family.perturbed(step);
        const DrivingMeasure minus = family.perturbed(-step);
        const std::vector<double> lr_plus = log_ratios(family.base, plus);
        const std::vector<double> lr_minus = log_ratios(family.base, minus);

        std::vector<double> w_plus(replicas), w_minus(replicas);
        for (std::size_t r = 0; r < replicas; ++r) {
            double lp = 0.0, lm = 0.0;
            for (std::uint32_t i = 0; i < n; ++i) {
                lp += lr_plus[batch[r].increments[i]];
                lm += lr_minus[batch[r].increments[i]];
            }
            w_plus[r] = std::exp(lp);
            w_minus[r] = std::exp(lm);
        }

        const SelfNormalized sp = self_normalized_speed(w_plus, dist);
        const SelfNormalized sm = self_normalized_speed(w_minus, dist);

        DerivativeRow row;
        row.step = step;
        row.v_plus = sp.v;
        row.v_minus = sm.v;
        row.derivative = (sp.v - sm.v) / (2.0 * step);
        row.ess_plus = sp.ess;
        row.ess_minus = sm.ess;

        // bootstrap over replicas, resampling both sides together so the
        // shared noise cancels the way it does in the point estimate
        const int boots = 200;
        std::vector<double> deriv_boot;
        deriv_boot.reserve(boots);
        for (int b = 0; b < boots; ++b) {
            auto rng = make_engine(seed ^ 0xb00757u, static_cast<std::uint64_t>(b));
            double swp = 0.0, swdp = 0.0, swm = 0.0, swdm = 0.0;
            for (std::size_t k = 0; k < replicas; ++k) {
                const auto r = static_cast<std::size_t>(uniform_unit(rng) * replicas);
                swp += w_plus[r];
                swdp += w_plus[r] * dist[r];
                swm += w_minus[r];
                swdm += w_minus[r] * dist[r];
            }
            deriv_boot.push_back((swdp / swp - swdm / swm) / (2.0 * step));
        }
        row.se = std::sqrt(sample_variance(deriv_boot));
        report.rows.push_back(row);
    }
    return report;
}

} // namespace conewalk
