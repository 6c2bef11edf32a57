#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "conewalk/renewal.hpp"

namespace conewalk {

struct ValueWithError {
    double value = 0.0;
    double se = 0.0;
};

inline double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

// v = Sum(delta_i) / Sum(tau_i); the standard error comes from the delta
// method on the ratio of means, with a moving-block bootstrap second opinion.
struct SpeedEstimate {
    ValueWithError v;
    double bootstrap_se = 0.0;
    std::size_t excursions = 0;
    bool se_valid = false; // needs >= 100 excursions
};

SpeedEstimate estimate_speed(const ExcursionStats& s);

// sigma^2 = mean(xi^2) / mean(tau) with xi_i = delta_i - tau_i * v.
// Reusing the in-sample v biases sigma^2 at order 1/m, so the split-sample
// variant (v from the first half, residuals on the second) is reported next
// to it; Sigma = mean(xi^2) is the excursion-level variance itself.
struct VarianceEstimate {
    ValueWithError sigma2;
    ValueWithError sigma2_split;
    double Sigma = 0.0;
    double bootstrap_se = 0.0;
    bool degenerate = false; // zero fluctuation (deterministic fixtures)
};

VarianceEstimate estimate_variance(const ExcursionStats& s, double v);

// Mean final distance over n across replicas.
ValueWithError direct_speed(std::span<const double> distance_over_n);

// One-sample Kolmogorov-Smirnov check of (d(Z_n,e) - n*v) / (sigma*sqrt(n))
// against the standard normal. v and sigma^2 must come from an independent
// run. The 1% critical value is 1.63/sqrt(replicas).
struct CltReport {
    double ks_distance = 0.0;
    double ks_threshold = 0.0;
    double ks_p_value = 1.0;
    bool pass = false;
    std::uint32_t n = 0;
    std::size_t replicas = 0;
    double v_used = 0.0, sigma2_used = 0.0;
    std::vector<double> standardized;
};

CltReport clt_check(const DrivingMeasure& m, const RewriteSystem& rw, std::uint32_t n,
                    std::uint32_t replicas, std::uint64_t seed, double v, double sigma2);

// Same check on an externally supplied standardized sample (harness
// self-test and plotting hooks).
CltReport clt_check_sample(std::vector<double> standardized);

// Estimates for the base walk from excursions of the averaged-convolution
// walk. The primary estimators use the recorded base-time span of each
// excursion (Sum of the uniform draws), which reproduces the base-walk speed
// and variance exactly in the limit; the constant-corrected variants replace
// the span by its mean (ell+1)/2 * tau. For the speed both are consistent;
// for the variance only the span version is (the constant correction ignores
// the fluctuation of the time change), so it is reported as diagnostic only.
struct LazyEstimate {
    ValueWithError v;
    ValueWithError sigma2;
    ValueWithError v_const_corrected;
    double sigma2_const_corrected = 0.0;
    int ell = 1;
    std::size_t excursions = 0;
};

LazyEstimate lazy_corrected_estimates(const ExcursionStats& s, int ell);

// Likelihood-ratio estimate of E[d(Z_n,e)]/n under `target` from
// trajectories sampled under `base`; both measures must share the same atom
// words. Throws PreconditionError when the effective sample size drops
// below `min_ess`.
struct ReweightedEstimate {
    double v = 0.0;
    double se = 0.0;
    double ess = 0.0;
    std::size_t replicas = 0;
};

ReweightedEstimate reweighted_speed(std::span<const Trajectory> batch, const DrivingMeasure& base,
                                    const DrivingMeasure& target, std::uint32_t horizon,
                                    double min_ess = 30.0);

// A line of probability measures through `base`: weights on a subset B of
// atoms shifted along `direction` (which sums to zero, so the total mass
// stays one). Measures must keep every weight positive.
struct PerturbationFamily {
    DrivingMeasure base;
    std::vector<std::size_t> atom_indices;
    std::vector<double> direction;

    DrivingMeasure perturbed(double eps) const;
};

struct DerivativeRow {
    double step = 0.0;
    double v_plus = 0.0, v_minus = 0.0;
    double derivative = 0.0;
    double se = 0.0;
    double ess_plus = 0.0, ess_minus = 0.0;
};

struct SmoothnessReport {
    std::vector<DerivativeRow> rows; // one per step size, descending
    double v_base = 0.0;
    std::uint32_t n = 0;
    std::size_t replicas = 0;
};

// Central finite differences of the reweighted speed along the family's
// direction, all from one common batch of base trajectories so differences
// share their noise. Checks nothing by itself; consumers compare successive
// rows within their standard errors.
SmoothnessReport smoothness_probe(const PerturbationFamily& family, const RewriteSystem& rw,
                                  const ConeAutomaton& a, std::uint32_t n, std::uint32_t replicas,
                                  std::uint64_t seed, std::span<const double> step_sizes);

} // namespace conewalk
