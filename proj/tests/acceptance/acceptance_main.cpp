// Acceptance suite: one binary, one pass/fail line per criterion, every
// tolerance pinned in code. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <vector>

#include "conewalk/parallel.hpp"
#include "conewalk/pipeline.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/stats.hpp"
#include "support/fixtures.hpp"

using namespace conewalk;

namespace {

struct Outcome {
    int id;
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<Outcome> results;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void record(int id, const std::string& name, std::function<std::pair<bool, std::string>()> body) {
    Outcome o{id, name};
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto [pass, detail] = body();
        o.pass = pass;
        o.detail = detail;
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), " [%.1fs]", seconds_since(t0));
    o.detail += buf;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " C" << o.id << " " << o.name << ": "
              << o.detail << std::endl;
    results.push_back(std::move(o));
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

} // namespace

int main() {
    std::cout << "conewalk acceptance suite (threads: " << thread_count() << ")\n";

    const Workspace g2 = build_workspace(preset_config("genus2-srw"));
    const Workspace f2 = build_workspace(preset_config("f2-srw"));

    // shared artifacts
    BfsBall g2_ball6;     // built in C1, reused by C2
    EstimationResult c7;  // built in C7, reused by C8 and C10

    // ----------------------------------------------------------------- C1
    record(1, "exact normal forms vs BFS (genus 2, all freely reduced words <= 6)", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        g2_ball6 = bfs_oracle(g2.rewrite, 6);
        std::size_t mismatches = 0, words = 0;
        Word w;
        auto dfs = [&](auto&& self) -> void {
            if (w.size() >= 6) return;
            for (int c = 0; c < 8; ++c) {
                const Letter x{static_cast<std::uint8_t>(c)};
                if (!w.empty() && w.back() == x.inverse()) continue;
                w.push_back(x);
                ++words;
                const NormalForm nf = g2.rewrite.normal_form(w);
                const std::int32_t id = g2_ball6.find(nf.letters);
                if (id < 0 || g2_ball6.distance[id] != nf.length()) ++mismatches;
                self(self);
                w.pop_back();
            }
        };
        dfs(dfs);
        const double elapsed = seconds_since(t0);
        const bool pass = mismatches == 0 && words == 156864 && elapsed <= 120.0;
        return std::make_pair(pass, std::to_string(words) + " words, " +
                                        std::to_string(mismatches) + " mismatches");
    });

    // ----------------------------------------------------------------- C2
    record(2, "path counts = sphere sizes (genus 2 n<=6, free n<=12)", [&] {
        bool ok = g2_ball6.sphere_sizes[1] == 8 && g2_ball6.sphere_sizes[2] == 56;
        for (int n = 0; n <= 6; ++n)
            ok = ok && count_paths(g2.automaton, n) ==
                           static_cast<std::uint64_t>(g2_ball6.sphere_sizes[n]);
        const BfsBall f2_ball = bfs_oracle(f2.rewrite, 12);
        for (int n = 0; n <= 12; ++n)
            ok = ok && count_paths(f2.automaton, n) ==
                           static_cast<std::uint64_t>(f2_ball.sphere_sizes[n]);
        return std::make_pair(ok, "genus-2 spheres " + fmt(g2_ball6.sphere_sizes[1]) + "/" +
                                      fmt(g2_ball6.sphere_sizes[2]) + ", free ball radius 12 = " +
                                      std::to_string(f2_ball.size()) + " elements");
    });

    // ----------------------------------------------------------------- C3
    record(3, "recurrent subgraph strongly connected; two-cycle fixture fails", [&] {
        bool ok = g2.automaton.assumption_holds && f2.automaton.assumption_holds;
        ConeAutomaton fixture;
        fixture.alphabet = 4;
        fixture.signature_length = 1;
        fixture.states.resize(3);
        fixture.states[1].signature = {Letter{0}};
        fixture.states[2].signature = {Letter{2}};
        fixture.transitions.assign(12, -1);
        fixture.transitions[0 * 4 + 0] = 1;
        fixture.transitions[0 * 4 + 2] = 2;
        fixture.transitions[1 * 4 + 0] = 1;
        fixture.transitions[2 * 4 + 2] = 2;
        ok = ok && !recurrence_classify(fixture);
        return std::make_pair(ok, std::string("genus2=") +
                                      (g2.automaton.assumption_holds ? "yes" : "no") + ", free=" +
                                      (f2.automaton.assumption_holds ? "yes" : "no") +
                                      ", fixture=no");
    });

    // ----------------------------------------------------------------- C4
    record(4, "free-group oracle: 5 cone types, v = 0.5 +- 0.01, sigma2 = 0.75 +- 0.05", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        RunConfig cfg = preset_config("f2-srw"); // n = 1e6, 64 replicas
        const EstimationResult r = run_estimation(f2, cfg, /*with_clt=*/false);
        const double v = r.speed.v.value, s2 = r.variance.sigma2.value;
        const double elapsed = seconds_since(t0);
        const bool pass = f2.automaton.state_count() == 5 && std::abs(v - 0.5) <= 0.01 &&
                          std::abs(s2 - 0.75) <= 0.05 && elapsed <= 300.0;
        return std::make_pair(pass, "v = " + fmt(v) + " +- " + fmt(r.speed.v.se) +
                                        ", sigma2 = " + fmt(s2) + " +- " +
                                        fmt(r.variance.sigma2.se) + ", excursions = " +
                                        std::to_string(r.pooled.size()));
    });

    // ----------------------------------------------------------------- C5
    record(5, "renewal detector = quadratic brute force (50 trajectories, n = 2000)", [&] {
        std::size_t compared = 0;
        bool ok = true;
        for (const Workspace* ws : {&f2, &g2}) {
            RunConfig pilot;
            pilot.n = 2000;
            pilot.seed = 505;
            const std::int32_t target = choose_target_state(*ws, pilot);
            for (int t = 0; t < 25; ++t) {
                const Trajectory traj = run_walk(ws->measure, ws->rewrite, ws->automaton, 2000,
                                                 stream_seed(505, t));
                const RenewalConfig rcfg{target, 200, true};
                const RenewalRecord fast = detect_renewals(traj, rcfg);
                const auto positions = materialize_positions(traj, ws->measure, ws->rewrite);
                const RenewalRecord slow = brute_force_renewals(positions, ws->automaton, rcfg);
                ok = ok && fast.times == slow.times && fast.depths == slow.depths;
                compared += fast.count();
                // criterion 6 companion: letter-level nesting on these runs
                for (std::size_t i = 0; i + 1 < fast.count(); ++i)
                    ok = ok && in_cone(positions[fast.times[i]], positions[fast.times[i + 1]]);
            }
        }
        return std::make_pair(ok, std::to_string(compared) + " renewals matched exactly");
    });

    // ----------------------------------------------------------------- C6
    record(6, "renewal identities: prefix chain and exact distance additivity", [&] {
        bool ok = true;
        std::size_t runs = 0;
        for (const Workspace* ws : {&f2, &g2}) {
            RunConfig pilot;
            pilot.n = 20'000;
            pilot.seed = 606;
            const std::int32_t target = choose_target_state(*ws, pilot);
            for (int t = 0; t < 20; ++t) {
                const Trajectory traj = run_walk(ws->measure, ws->rewrite, ws->automaton, 20'000,
                                                 stream_seed(606, t));
                const RenewalRecord rec = detect_renewals(traj, {target, 256, true});
                if (rec.count() < 3) continue;
                ++runs;
                const auto positions = materialize_positions(traj, ws->measure, ws->rewrite);
                std::uint64_t delta_sum = 0;
                for (std::size_t i = 0; i + 1 < rec.count(); ++i) {
                    ok = ok && in_cone(positions[rec.times[i]], positions[rec.times[i + 1]]);
                    ok = ok && rec.times[i] < rec.times[i + 1];
                    delta_sum += rec.depths[i + 1] - rec.depths[i];
                }
                // d(e, Z_{R_m}) = d(e, Z_{R_1}) + sum of deltas, as integers
                ok = ok && rec.depths.back() == rec.depths.front() + delta_sum;
                ok = ok && positions[rec.times.back()].length() ==
                               static_cast<int>(rec.depths.back());
            }
        }
        return std::make_pair(ok && runs >= 30, std::to_string(runs) + " runs checked exactly");
    });

    // ----------------------------------------------------------------- C7
    record(7, "genus-2 CLT: renewal vs direct speed, KS against N(0,1) at 1%", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        RunConfig cfg = preset_config("genus2-srw"); // n = 1e6, 64 replicas, 2000 CLT replicas
        c7 = run_estimation(g2, cfg, /*with_clt=*/true);
        const double gap = std::abs(c7.speed.v.value - c7.v_direct.value);
        const double band = 3.0 * combined_se(c7.speed.v.se, c7.v_direct.se);
        const double elapsed = seconds_since(t0);
        const bool pass =
            gap <= band && c7.clt.replicas >= 2000 && c7.clt.pass && elapsed <= 1800.0;
        return std::make_pair(pass, "v_renewal = " + fmt(c7.speed.v.value) + " vs v_direct = " +
                                        fmt(c7.v_direct.value) + " (|gap| = " + fmt(gap) +
                                        " <= " + fmt(band) + "), ks = " + fmt(c7.clt.ks_distance) +
                                        " <= " + fmt(c7.clt.ks_threshold) + ", sigma2 = " +
                                        fmt(c7.variance.sigma2.value));
    });

    // ----------------------------------------------------------------- C8
    record(8, "exponential tails: log-survival linear (r2 >= 0.95); Pareto control fails", [&] {
        const TailDiagnostics d = tail_diagnostics(c7.pooled);
        bool ok = d.tau.usable && d.tau.r2 >= 0.95 && d.delta.usable && d.delta.r2 >= 0.95;
        ExcursionStats pareto;
        pareto.taus = conewalk::testing::pareto_sample(1.2, 50'000, 808);
        pareto.deltas = pareto.taus;
        pareto.overshoots = pareto.taus;
        const TailDiagnostics hp = tail_diagnostics(pareto);
        const bool pareto_fails = !hp.tau.usable || hp.tau.r2 < 0.95;
        ok = ok && pareto_fails;
        return std::make_pair(ok, "r2(tau) = " + fmt(d.tau.r2) + ", r2(delta) = " +
                                      fmt(d.delta.r2) + ", pareto r2 = " + fmt(hp.tau.r2));
    });

    // ----------------------------------------------------------------- C9
    record(9, "renewal frequency: k(n) * mean(tau) / n within [0.97, 1.03] at n = 1e6", [&] {
        bool ok = true;
        std::string detail;
        for (const Workspace* ws : {&f2, &g2}) {
            RunConfig pilot;
            pilot.n = 100'000;
            pilot.seed = 909;
            const std::int32_t target = choose_target_state(*ws, pilot);
            const Trajectory traj =
                run_walk(ws->measure, ws->rewrite, ws->automaton, 1'000'000, 909);
            const RenewalRecord rec = detect_renewals(traj, {target, 256, true});
            const ExcursionStats s = excursion_stats(rec, traj);
            const double mean_tau =
                std::accumulate(s.taus.begin(), s.taus.end(), 0.0) / s.size();
            const double ratio = rec.count() * mean_tau / 1e6;
            ok = ok && ratio >= 0.97 && ratio <= 1.03;
            detail += (detail.empty() ? "" : ", ") + fmt(ratio);
        }
        return std::make_pair(ok, "ratios " + detail);
    });

    // ---------------------------------------------------------------- C10
    record(10, "margin robustness: v at margins M and 2M within 3 combined SE", [&] {
        const double gap = std::abs(c7.speed.v.value - c7.speed_double_margin.v.value);
        const double band = 3.0 * combined_se(c7.speed.v.se, c7.speed_double_margin.v.se);
        return std::make_pair(gap <= band,
                              "|v(M) - v(2M)| = " + fmt(gap) + " <= " + fmt(band));
    });

    // ---------------------------------------------------------------- C11
    record(11, "averaged-convolution bypass: ell = 3 recovers v = 0.5; ell = 1 is exact", [&] {
        const LazyAverageDriver driver{f2.measure, 3};
        const std::uint32_t n = 400'000;
        std::vector<ExcursionStats> stats(8);
        RunConfig pilot;
        pilot.n = 20'000;
        pilot.seed = 1111;
        const std::int32_t target = choose_target_state(f2, pilot);
        parallel_for(8, [&](std::size_t r) {
            const Trajectory t = run_lazy_walk(driver, f2.rewrite, f2.automaton, n,
                                               stream_seed(1111, r));
            stats[r] = excursion_stats(detect_renewals(t, {target, 256, true}), t);
        });
        ExcursionStats pooled;
        for (const auto& s : stats) pooled.append(s);
        const LazyEstimate lazy = lazy_corrected_estimates(pooled, 3);
        bool ok = std::abs(lazy.v_const_corrected.value - 0.5) <= 0.01 &&
                  std::abs(lazy.v.value - 0.5) <= 0.01;

        // ell = 1: trajectory and estimators reduce exactly
        const Trajectory base = run_walk(f2.measure, f2.rewrite, f2.automaton, 50'000, 1112);
        const Trajectory one =
            run_lazy_walk({f2.measure, 1}, f2.rewrite, f2.automaton, 50'000, 1112);
        ok = ok && one.increments == base.increments && one.distances == base.distances;
        const ExcursionStats sb =
            excursion_stats(detect_renewals(base, {target, 256, true}), base);
        const LazyEstimate l1 = lazy_corrected_estimates(sb, 1);
        const SpeedEstimate v1 = estimate_speed(sb);
        const VarianceEstimate var1 = estimate_variance(sb, v1.v.value);
        ok = ok && l1.v.value == v1.v.value &&
             std::abs(l1.sigma2.value - var1.sigma2.value) <= 1e-12;
        return std::make_pair(ok, "lazy v = " + fmt(lazy.v.value) + ", const-corrected = " +
                                      fmt(lazy.v_const_corrected.value) + ", sigma2 = " +
                                      fmt(lazy.sigma2.value));
    });

    // ---------------------------------------------------------------- C12
    record(12, "likelihood-ratio probe: identity exact, tilt matches direct, symmetry", [&] {
        const std::uint32_t n = 500, replicas = 4000;
        std::vector<Trajectory> batch(replicas);
        parallel_for(replicas, [&](std::size_t r) {
            batch[r] = run_walk(f2.measure, f2.rewrite, f2.automaton, n, stream_seed(1212, r));
        });

        // identity reweighting is exact to the double
        const ReweightedEstimate same = reweighted_speed(batch, f2.measure, f2.measure, n);
        std::vector<double> plain(replicas);
        for (std::size_t r = 0; r < replicas; ++r)
            plain[r] = batch[r].distances[n] / static_cast<double>(n);
        bool ok = same.v == mean(plain) && same.ess == static_cast<double>(replicas);

        // tilted measure vs direct simulation under it
        PerturbationFamily family;
        family.base = f2.measure;
        family.atom_indices = {0, 1};
        family.direction = {1.0, -1.0};
        const DrivingMeasure tilted = family.perturbed(0.01);
        const ReweightedEstimate rw = reweighted_speed(batch, f2.measure, tilted, n);
        std::vector<double> direct(replicas);
        parallel_for(replicas, [&](std::size_t r) {
            direct[r] = walk_final_distance(tilted, f2.rewrite, n, stream_seed(1213, r)) /
                        static_cast<double>(n);
        });
        const ValueWithError dv = direct_speed(direct);
        const double gap = std::abs(rw.v - dv.value);
        const double band = 3.0 * combined_se(rw.se, dv.se);
        ok = ok && gap <= band;

        // derivative along the a1 <-> A1 swap direction vanishes
        const std::vector<double> steps{0.01, 0.005, 0.0025};
        const SmoothnessReport probe =
            smoothness_probe(family, f2.rewrite, f2.automaton, n, replicas, 1214, steps);
        for (const DerivativeRow& row : probe.rows)
            ok = ok && std::abs(row.derivative) <= 3.0 * row.se;
        return std::make_pair(ok, "identity exact, |tilt gap| = " + fmt(gap) + " <= " +
                                      fmt(band) + ", derivative(0.0025) = " +
                                      fmt(probe.rows.back().derivative) + " +- " +
                                      fmt(probe.rows.back().se));
    });

    int failed = 0;
    for (const Outcome& o : results)
        if (!o.pass) ++failed;
    std::cout << (failed == 0 ? "ALL CRITERIA PASSED" : std::to_string(failed) + " CRITERIA FAILED")
              << " (" << results.size() << " total)\n";
    return failed == 0 ? 0 : 1;
}
