#include "conewalk/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conewalk/rng.hpp"

namespace conewalk {

namespace {

// Applies one trajectory step (a sequence of base increments) to the current
// word and returns the exact common-prefix length with the previous position.
struct StepContext {
    Word pending;
    Word saved;

    void begin(std::size_t pre_len) {
        low_ = pre_len;
        saved.clear();
    }
    void more(const RewriteSystem& rw, Word& cur, const Word& atom_word) {
        for (Letter x : atom_word) rw.push_letter_tracked(cur, x, pending, low_, saved);
    }
    // saved holds the popped pristine letters in reverse original order, so
    // the exact lcp is low_ plus the run of letters the step re-created.
    std::uint32_t end(const Word& cur) {
        const std::size_t limit = std::min(saved.size(), cur.size() - low_);
        std::size_t j = 0;
        while (j < limit && cur[low_ + j] == saved[saved.size() - 1 - j]) ++j;
        return static_cast<std::uint32_t>(low_ + j);
    }
    std::uint32_t apply(const RewriteSystem& rw, Word& cur, const Word& atom_word) {
        begin(cur.size());
        more(rw, cur, atom_word);
        return end(cur);
    }

private:
    std::size_t low_ = 0;
};

} // namespace

Trajectory run_walk(const DrivingMeasure& m, const RewriteSystem& rw, const ConeAutomaton& a,
                    std::uint32_t steps, std::uint64_t seed, const WalkOptions& opts) {
    Trajectory t;
    t.seed = seed;
    t.steps = steps;
    t.checkpoint_interval = opts.checkpoint_interval;
    t.increments.reserve(steps);
    t.distances.reserve(steps + 1);
    t.states.reserve(steps + 1);
    t.prefix_keep.reserve(steps);

    auto rng = make_engine(seed, 0);
    Word cur;
    StepContext ctx;

    t.distances.push_back(0);
    t.states.push_back(static_cast<std::uint32_t>(a.start));
    for (std::uint32_t i = 0; i < steps; ++i) {
        const int atom = sample_cdf(m.cdf, uniform_unit(rng));
        t.increments.push_back(static_cast<std::uint32_t>(atom));
        const std::uint32_t keep = ctx.apply(rw, cur, m.atoms[atom].word);
        t.prefix_keep.push_back(keep);
        t.distances.push_back(static_cast<std::uint32_t>(cur.size()));
        t.states.push_back(static_cast<std::uint32_t>(state_by_signature(a, cur)));
        if (opts.checkpoint_interval && (i + 1) % opts.checkpoint_interval == 0)
            t.checkpoints.push_back(cur);
    }
    t.final_position = std::move(cur);
    return t;
}

Trajectory run_lazy_walk(const LazyAverageDriver& driver, const RewriteSystem& rw,
                         const ConeAutomaton& a, std::uint32_t steps, std::uint64_t seed,
                         const WalkOptions& opts) {
    if (driver.ell < 1) throw std::invalid_argument("lazy driver needs ell >= 1");
    if (!lazy_covers_generators(driver, rw))
        throw PreconditionError("lazy driver with ell = " + std::to_string(driver.ell) +
                                " does not restore generator support; increase ell");
    const DrivingMeasure& m = driver.base;

    Trajectory t;
    t.seed = seed;
    t.steps = steps;
    t.checkpoint_interval = opts.checkpoint_interval;
    t.lazy_u.reserve(steps);

    auto rng = make_engine(seed, 0);
    Word cur;
    StepContext ctx;

    t.distances.push_back(0);
    t.states.push_back(static_cast<std::uint32_t>(a.start));
    for (std::uint32_t i = 0; i < steps; ++i) {
        const int u = uniform_1_to_n(rng, driver.ell);
        t.lazy_u.push_back(static_cast<std::uint16_t>(u));
        ctx.begin(cur.size());
        for (int j = 0; j < u; ++j) {
            const int atom = sample_cdf(m.cdf, uniform_unit(rng));
            t.increments.push_back(static_cast<std::uint32_t>(atom));
            ctx.more(rw, cur, m.atoms[atom].word);
        }
        t.prefix_keep.push_back(ctx.end(cur));
        t.distances.push_back(static_cast<std::uint32_t>(cur.size()));
        t.states.push_back(static_cast<std::uint32_t>(state_by_signature(a, cur)));
        if (opts.checkpoint_interval && (i + 1) % opts.checkpoint_interval == 0)
            t.checkpoints.push_back(cur);
    }
    t.final_position = std::move(cur);
    return t;
}

std::uint32_t walk_final_distance(const DrivingMeasure& m, const RewriteSystem& rw,
                                  std::uint32_t steps, std::uint64_t seed) {
    auto rng = make_engine(seed, 0);
    Word cur, pending;
    for (std::uint32_t i = 0; i < steps; ++i) {
        const int atom = sample_cdf(m.cdf, uniform_unit(rng));
        for (Letter x : m.atoms[atom].word) rw.push_letter(cur, x, pending);
    }
    return static_cast<std::uint32_t>(cur.size());
}

Word position_at(const Trajectory& t, std::uint32_t step, const DrivingMeasure& m,
                 const RewriteSystem& rw) {
    if (step > t.steps) throw std::out_of_range("position_at: step beyond trajectory");
    if (step == t.steps) return t.final_position;

    std::uint32_t from = 0;
    Word cur;
    if (t.checkpoint_interval) {
        const std::uint32_t k = step / t.checkpoint_interval;
        if (k > 0) {
            cur = t.checkpoints[k - 1];
            from = k * t.checkpoint_interval;
        }
    }
    // base-increment offset of lazy step `from`
    std::size_t inc = 0;
    if (t.is_lazy())
        for (std::uint32_t j = 0; j < from; ++j) inc += t.lazy_u[j];
    else
        inc = from;

    Word pending;
    for (std::uint32_t i = from; i < step; ++i) {
        const std::uint32_t sub = t.is_lazy() ? t.lazy_u[i] : 1;
        for (std::uint32_t j = 0; j < sub; ++j) {
            const auto& atom_word = m.atoms[t.increments[inc++]].word;
            for (Letter x : atom_word) rw.push_letter(cur, x, pending);
        }
    }
    return cur;
}

StayEstimate estimate_stay_probability(std::int32_t state, const DrivingMeasure& m,
                                       const RewriteSystem& rw, const ConeAutomaton& a,
                                       const StayProbeOptions& opts) {
    const Word root = a.states[state].signature; // the signature is itself a normal form of its type
    if (opts.margin >= opts.horizon) throw std::invalid_argument("stay probe: margin >= horizon");

    std::uint32_t stay = 0, stay_margin = 0, stay_half = 0;
    Word cur, pending;
    for (std::uint32_t r = 0; r < opts.replicas; ++r) {
        auto rng = make_engine(opts.seed, r);
        cur = root;
        std::uint32_t exit_time = 0; // 0 = never exited
        for (std::uint32_t i = 1; i <= opts.horizon; ++i) {
            const int atom = sample_cdf(m.cdf, uniform_unit(rng));
            for (Letter x : m.atoms[atom].word) rw.push_letter(cur, x, pending);
            const bool inside = is_prefix(root, cur) &&
                                (!opts.depth_cap || cur.size() <= root.size() + *opts.depth_cap);
            if (!inside) {
                exit_time = i;
                break;
            }
        }
        if (exit_time == 0) ++stay;
        if (exit_time == 0 || exit_time > opts.horizon - opts.margin) ++stay_margin;
        if (exit_time == 0 || exit_time > opts.horizon - opts.margin / 2) ++stay_half;
    }

    StayEstimate est;
    est.replicas = opts.replicas;
    est.p_stay = static_cast<double>(stay) / opts.replicas;
    est.p_at_margin = static_cast<double>(stay_margin) / opts.replicas;
    est.p_at_half_margin = static_cast<double>(stay_half) / opts.replicas;
    est.se = std::sqrt(std::max(est.p_stay * (1.0 - est.p_stay), 1e-12) / opts.replicas);
    return est;
}

} // namespace conewalk
