#include <doctest.h>

#include <cmath>

#include "conewalk/estimators.hpp"
#include "conewalk/parallel.hpp"
#include "conewalk/pipeline.hpp"
#include "conewalk/stats.hpp"
#include "support/fixtures.hpp"

using namespace conewalk;
using conewalk::testing::free2;

namespace {

std::int32_t tree_state(const std::string& letter) {
    const auto& f = free2();
    return state_of(f.rewrite.normal_form(parse_word(letter, 4)), f.automaton);
}

ExcursionStats f2_stats(std::uint32_t n, std::uint64_t seed, std::int32_t target = -1) {
    const auto& f = free2();
    const DrivingMeasure srw = simple_random_walk(f.presentation);
    const Trajectory t = run_walk(srw, f.rewrite, f.automaton, n, seed);
    if (target < 0) target = tree_state("a1");
    return excursion_stats(detect_renewals(t, {target, 256, true}), t);
}

} // namespace

TEST_CASE("speed estimator: deterministic ray runs at unit speed") {
    ExcursionStats s;
    s.taus.assign(500, 1);
    s.deltas.assign(500, 1);
    s.overshoots.assign(500, 1);
    const SpeedEstimate v = estimate_speed(s);
    CHECK(v.v.value == 1.0);
    CHECK(v.v.se == 0.0);
    const VarianceEstimate var = estimate_variance(s, v.v.value);
    CHECK(var.sigma2.value == 0.0);
    CHECK(var.degenerate);
}

TEST_CASE("variance estimator vanishes when delta = tau * v exactly") {
    ExcursionStats s;
    for (std::uint32_t i = 1; i <= 200; ++i) {
        s.taus.push_back(2 * i);
        s.deltas.push_back(i); // v = 1/2 exactly
        s.overshoots.push_back(i);
    }
    const SpeedEstimate v = estimate_speed(s);
    CHECK(v.v.value == doctest::Approx(0.5).epsilon(1e-12));
    const VarianceEstimate var = estimate_variance(s, 0.5);
    CHECK(var.sigma2.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("free-group speed and variance against the birth-death closed forms") {
    const ExcursionStats s = f2_stats(400'000, 1001);
    REQUIRE(s.size() >= 10'000);
    const SpeedEstimate v = estimate_speed(s);
    CHECK(v.se_valid);
    CHECK(std::abs(v.v.value - 0.5) <= std::max(4 * v.v.se, 1e-3));
    // delta-method and block-bootstrap errors agree in scale
    CHECK(v.bootstrap_se == doctest::Approx(v.v.se).epsilon(0.5));

    const VarianceEstimate var = estimate_variance(s, v.v.value);
    CHECK(std::abs(var.sigma2.value - 0.75) <= std::max(4 * var.sigma2.se, 5e-3));
    CHECK(std::abs(var.sigma2_split.value - 0.75) <= 4 * combined_se(var.sigma2_split.se, 0.003));
    CHECK(var.Sigma > 0.0);
}

TEST_CASE("estimates agree across two different target cone types") {
    const ExcursionStats sa = f2_stats(200'000, 55, tree_state("a1"));
    const ExcursionStats sb = f2_stats(200'000, 56, tree_state("b1"));
    const SpeedEstimate va = estimate_speed(sa);
    const SpeedEstimate vb = estimate_speed(sb);
    CHECK(std::abs(va.v.value - vb.v.value) <= 3 * combined_se(va.v.se, vb.v.se));
}

TEST_CASE("direct speed helper") {
    const std::vector<double> xs{0.5, 0.52, 0.48, 0.5};
    const ValueWithError v = direct_speed(xs);
    CHECK(v.value == doctest::Approx(0.5));
    CHECK(v.se > 0.0);
}

TEST_CASE("clt harness self-test: synthetic standard normals pass") {
    CltReport r = clt_check_sample(conewalk::testing::standard_normal_sample(2000, 99));
    CHECK(r.ks_threshold == doctest::Approx(1.63 / std::sqrt(2000.0)));
    CHECK(r.pass);
    // a visibly shifted sample fails
    auto shifted = conewalk::testing::standard_normal_sample(2000, 99);
    for (double& x : shifted) x += 0.2;
    CHECK_FALSE(clt_check_sample(std::move(shifted)).pass);
}

TEST_CASE("clt on the free group with oracle constants") {
    const auto& f = free2();
    const DrivingMeasure srw = simple_random_walk(f.presentation);
    const CltReport r = clt_check(srw, f.rewrite, 10'000, 2000, 2024, 0.5, 0.75);
    CHECK(r.ks_distance <= r.ks_threshold);
    CHECK(r.standardized.size() == 2000);
}

TEST_CASE("lazy estimates reduce exactly to the base formulas at ell = 1") {
    const ExcursionStats s = f2_stats(100'000, 7);
    const SpeedEstimate v = estimate_speed(s);
    const VarianceEstimate var = estimate_variance(s, v.v.value);
    const LazyEstimate lazy = lazy_corrected_estimates(s, 1);
    CHECK(lazy.v.value == v.v.value);
    CHECK(lazy.v.se == v.v.se);
    CHECK(lazy.v_const_corrected.value == v.v.value);
    CHECK(lazy.sigma2.value == doctest::Approx(var.sigma2.value).epsilon(1e-12));
    CHECK(lazy.sigma2_const_corrected == doctest::Approx(var.sigma2.value).epsilon(1e-12));
}

TEST_CASE("lazy driver at ell = 3 recovers the base speed and variance") {
    const auto& f = free2();
    const DrivingMeasure srw = simple_random_walk(f.presentation);
    const LazyAverageDriver driver{srw, 3};
    const Trajectory t = run_lazy_walk(driver, f.rewrite, f.automaton, 300'000, 61);
    const ExcursionStats s = excursion_stats(detect_renewals(t, {tree_state("a1"), 256, true}), t);
    REQUIRE(s.time_spans.size() == s.size());
    const LazyEstimate lazy = lazy_corrected_estimates(s, 3);

    CHECK(std::abs(lazy.v.value - 0.5) <= std::max(4 * lazy.v.se, 2e-3));
    CHECK(std::abs(lazy.v_const_corrected.value - 0.5) <=
          std::max(4 * lazy.v_const_corrected.se, 2e-3));

    // sigma^2 of the base walk: the span-based estimator is consistent
    const ExcursionStats base = f2_stats(300'000, 62);
    const SpeedEstimate bv = estimate_speed(base);
    const VarianceEstimate bvar = estimate_variance(base, bv.v.value);
    CHECK(std::abs(lazy.sigma2.value - bvar.sigma2.value) <=
          3 * combined_se(lazy.sigma2.se, bvar.sigma2.se));

    // the constant-corrected variance ignores the time-change noise and
    // overshoots by 2 v^2 Var(U) / (ell + 1) = 1/12 for this walk
    CHECK(lazy.sigma2_const_corrected ==
          doctest::Approx(0.75 + 1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("reweighting at the base measure is exact") {
    const auto& f = free2();
    const DrivingMeasure srw = simple_random_walk(f.presentation);
    std::vector<Trajectory> batch;
    for (int r = 0; r < 64; ++r)
        batch.push_back(run_walk(srw, f.rewrite, f.automaton, 500, stream_seed(3000, r)));

    const ReweightedEstimate est = reweighted_speed(batch, srw, srw, 500);
    CHECK(est.ess == doctest::Approx(64.0));
    std::vector<double> plain;
    for (const Trajectory& t : batch) plain.push_back(t.distances[500] / 500.0);
    CHECK(est.v == mean(plain)); // weights are exactly one

    // effective-sample-size guard
    DrivingMeasure far = srw;
    far.atoms[0].prob = 0.97;
    far.atoms[1].prob = 0.01;
    far.atoms[2].prob = 0.01;
    far.atoms[3].prob = 0.01;
    far.finalize();
    CHECK_THROWS_AS(reweighted_speed(batch, srw, far, 500), PreconditionError);
}

TEST_CASE("reweighted speed matches direct simulation under the tilted measure") {
    const auto& f = free2();
    const DrivingMeasure srw = simple_random_walk(f.presentation);
    PerturbationFamily family;
    family.base = srw;
    family.atom_indices = {0, 1}; // a1, A1
    family.direction = {1.0, -1.0};
    const DrivingMeasure tilted = family.perturbed(0.01);

    const std::uint32_t n = 500, replicas = 4000;
    std::vector<Trajectory> batch(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        batch[r] = run_walk(srw, f.rewrite, f.automaton, n, stream_seed(4000, r));
    });
    const ReweightedEstimate rw_est = reweighted_speed(batch, srw, tilted, n);
    CHECK(rw_est.ess >= 30.0);

    std::vector<double> direct(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        direct[r] = walk_final_distance(tilted, f.rewrite, n, stream_seed(5000, r)) /
                    static_cast<double>(n);
    });
    const ValueWithError dv = direct_speed(direct);
    CHECK(std::abs(rw_est.v - dv.value) <= 3 * combined_se(rw_est.se, dv.se));
}

TEST_CASE("perturbation family guards the simplex") {
    const auto& f = free2();
    PerturbationFamily family;
    family.base = simple_random_walk(f.presentation);
    family.atom_indices = {0, 1};
    family.direction = {1.0, -1.0};
    CHECK_THROWS_AS(family.perturbed(0.4), std::invalid_argument); // 0.25 - 0.4 < 0
    family.direction = {1.0, -0.5};
    CHECK_THROWS_AS(family.perturbed(0.01), std::invalid_argument); // does not sum to zero
}

TEST_CASE("smoothness probe: zero direction gives exactly zero derivatives") {
    const auto& f = free2();
    PerturbationFamily family;
    family.base = simple_random_walk(f.presentation);
    family.atom_indices = {0, 1};
    family.direction = {0.0, 0.0};
    const std::vector<double> steps{0.02, 0.01};
    const SmoothnessReport r =
        smoothness_probe(family, f.rewrite, f.automaton, 300, 200, 11, steps);
    for (const DerivativeRow& row : r.rows) {
        CHECK(row.derivative == 0.0);
        CHECK(row.v_plus == row.v_minus);
    }
}

TEST_CASE("smoothness probe: antisymmetric direction has zero derivative") {
    // swapping a1 and A1 is a word-length-preserving automorphism, so the
    // speed is an even function along this direction
    const auto& f = free2();
    PerturbationFamily family;
    family.base = simple_random_walk(f.presentation);
    family.atom_indices = {0, 1};
    family.direction = {1.0, -1.0};
    const std::vector<double> steps{0.02, 0.01, 0.005, 0.0025, 0.00125};
    const SmoothnessReport r =
        smoothness_probe(family, f.rewrite, f.automaton, 500, 4000, 2027, steps);
    REQUIRE(r.rows.size() == 5);
    for (const DerivativeRow& row : r.rows) CHECK(std::abs(row.derivative) <= 3 * row.se);
    // successive finite differences stay consistent within noise
    for (std::size_t i = 0; i + 1 < r.rows.size(); ++i)
        CHECK(std::abs(r.rows[i].derivative - r.rows[i + 1].derivative) <=
              3 * combined_se(r.rows[i].se, r.rows[i + 1].se) + 1e-9);
}
