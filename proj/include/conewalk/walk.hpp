#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "conewalk/automaton.hpp"
#include "conewalk/measure.hpp"

namespace conewalk {

// One sampled walk. Positions are not stored per step: the per-step data
// needed downstream are the distance, the automaton state and prefix_keep,
// the exact common-prefix length between consecutive normal forms. Full
// positions are reconstructed on demand from the checkpoints plus the
// increments (storing every normal form would cost O(v * n^2 / interval)
// letters and reaches gigabytes for n = 1e7).
struct Trajectory {
    std::uint64_t seed = 0;
    std::uint32_t steps = 0;
    std::vector<std::uint32_t> increments;   // atom index per base step
    std::vector<std::uint32_t> distances;    // d(e, Z_i), i = 0..steps
    std::vector<std::uint32_t> states;       // automaton state per position
    std::vector<std::uint32_t> prefix_keep;  // |lcp(nf(Z_i), nf(Z_{i+1}))|, i = 0..steps-1
    std::vector<std::uint16_t> lazy_u;       // per-step U draws; empty for plain walks
    std::uint32_t checkpoint_interval = 0;
    std::vector<Word> checkpoints;           // nf at steps interval, 2*interval, ...
    Word final_position;

    bool is_lazy() const { return !lazy_u.empty(); }
    std::uint32_t final_distance() const { return distances.back(); }
};

struct WalkOptions {
    std::uint32_t checkpoint_interval = 0; // 0 = keep only the final position
};

Trajectory run_walk(const DrivingMeasure& m, const RewriteSystem& rw, const ConeAutomaton& a,
                    std::uint32_t steps, std::uint64_t seed, const WalkOptions& opts = {});

// Averaged-convolution walk: each step composes U ~ Unif{1..ell} base
// increments; lazy_u records the draws, so T_n is their prefix sum. With
// ell = 1 the result is bit-identical to run_walk under the same seed.
Trajectory run_lazy_walk(const LazyAverageDriver& driver, const RewriteSystem& rw,
                         const ConeAutomaton& a, std::uint32_t steps, std::uint64_t seed,
                         const WalkOptions& opts = {});

// Final distance only; no arrays are kept.
std::uint32_t walk_final_distance(const DrivingMeasure& m, const RewriteSystem& rw,
                                  std::uint32_t steps, std::uint64_t seed);

// Normal form of the position at step t, replayed from the nearest checkpoint.
Word position_at(const Trajectory& t, std::uint32_t step, const DrivingMeasure& m,
                 const RewriteSystem& rw);

struct StayProbeOptions {
    std::uint32_t horizon = 4096;
    std::uint32_t margin = 256;
    std::uint32_t replicas = 4000;
    std::uint64_t seed = 1;
    // Synthetic truncation for negative tests: the "cone" additionally caps
    // the depth below the root, which makes it impossible to stay forever.
    std::optional<std::uint32_t> depth_cap;
};

struct StayEstimate {
    double p_stay = 0.0;       // still inside at the horizon
    double se = 0.0;           // binomial standard error
    double p_at_margin = 0.0;  // no exit before horizon - margin
    double p_at_half_margin = 0.0;
    std::uint32_t replicas = 0;
};

// Monte Carlo estimate of the probability that a walk started at the root of
// a cone of the given type never leaves the cone. Exits by the horizon count
// as leaving; the margin variants report how much mass exits late, which
// bounds the truncation bias.
StayEstimate estimate_stay_probability(std::int32_t state, const DrivingMeasure& m,
                                       const RewriteSystem& rw, const ConeAutomaton& a,
                                       const StayProbeOptions& opts);

} // namespace conewalk
