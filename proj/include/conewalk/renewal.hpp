#pragma once

#include <cstdint>
#include <vector>

#include "conewalk/walk.hpp"

namespace conewalk {

// The renewal condition quantifies over the infinite future, which a finite
// trajectory cannot decide. Candidates within `margin` of the horizon are
// refused; the misclassification probability of the accepted ones decays
// exponentially in the margin (the exit time from a cone has exponential
// tails), and the diagnose pipeline reports the sensitivity to doubling it.
struct RenewalConfig {
    std::int32_t target_state = -1;
    std::uint32_t margin = 256;
    bool discard_tail = true;
};

struct RenewalRecord {
    std::vector<std::uint32_t> times;   // strictly increasing
    std::vector<std::uint32_t> depths;  // d(e, Z_{R_i})
    std::uint32_t horizon = 0;
    std::uint32_t margin = 0;
    std::int32_t target_state = -1;
    std::uint32_t refused_in_tail = 0;  // candidates dropped by the margin

    std::size_t count() const { return times.size(); }
};

// All times k <= horizon - margin whose position has the target type and
// whose normal form stays a prefix of every later position up to the
// horizon. Equivalent to the quadratic definition checked letter by letter;
// implemented as one backward sweep over the per-step common-prefix lengths
// (prefix lengths satisfy lcp(a,c) >= min(lcp(a,b), lcp(b,c)), so the
// running suffix-minimum certifies the whole window).
RenewalRecord detect_renewals(const Trajectory& t, const RenewalConfig& cfg);

// Per-excursion statistics between consecutive renewal times. The segment
// before the first renewal has a different law and is excluded; the arrays
// cover excursions i = 1..count-1.
struct ExcursionStats {
    std::vector<std::uint32_t> taus;       // R_{i+1} - R_i
    std::vector<std::uint32_t> deltas;     // d(Z_{R_{i+1}}, Z_{R_i})
    std::vector<std::uint32_t> overshoots; // max displacement from the renewal point
    std::vector<std::uint32_t> time_spans; // base-time spans (lazy walks only)
    std::uint32_t first_time = 0;          // R_1
    std::uint32_t first_depth = 0;         // d(e, Z_{R_1})
    std::uint32_t renewal_count = 0;
    std::uint64_t horizon = 0;             // pooled trajectory steps

    std::size_t size() const { return taus.size(); }
    void append(const ExcursionStats& other);
};

// Throws PreconditionError with advice to lengthen the walk when fewer than
// 3 renewals were detected.
ExcursionStats excursion_stats(const RenewalRecord& rec, const Trajectory& t);

// In-sample speed Sum(delta)/Sum(tau) and residuals xi_i = delta_i - tau_i*v.
std::vector<double> residuals(const ExcursionStats& s, double v);

struct IidDiagnostics {
    struct Series {
        std::vector<double> autocorr;  // lags 1..5
        double ks_halves_distance = 0.0;
        double ks_halves_p = 1.0;
        bool zero_variance = false;
    };
    Series tau, delta, xi;
    std::size_t excursions = 0;
};

IidDiagnostics iid_diagnostics(const ExcursionStats& s);

struct TailDiagnostics {
    struct Fit {
        double slope = 0.0;
        double r2 = 0.0;
        std::size_t points = 0;
        bool usable = false;
    };
    Fit tau, delta, overshoot;
};

// Least-squares slope of the empirical log-survival over the upper decile.
// Exponential tails give a straight line; heavy tails degrade r2.
TailDiagnostics tail_diagnostics(const ExcursionStats& s);

} // namespace conewalk
