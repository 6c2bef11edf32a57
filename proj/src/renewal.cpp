#include "conewalk/renewal.hpp"

#include <algorithm>
#include <stdexcept>

#include "conewalk/stats.hpp"

namespace conewalk {

RenewalRecord detect_renewals(const Trajectory& t, const RenewalConfig& cfg) {
    if (cfg.target_state < 0) throw std::invalid_argument("detect_renewals: no target state");
    const std::uint32_t n = t.steps;
    RenewalRecord rec;
    rec.horizon = n;
    rec.margin = cfg.margin;
    rec.target_state = cfg.target_state;
    if (cfg.discard_tail && cfg.margin >= n) return rec; // nothing decidable

    // suffix minimum of the per-step prefix lengths: smin[k] = min over
    // steps k..n-1, so nf(Z_k) stays a prefix through the horizon iff
    // smin[k] >= d(e, Z_k)
    std::vector<std::uint32_t> smin(n + 1);
    smin[n] = UINT32_MAX;
    for (std::uint32_t k = n; k-- > 0;) smin[k] = std::min(t.prefix_keep[k], smin[k + 1]);

    const std::uint32_t accept_limit = cfg.discard_tail ? n - cfg.margin : n;
    const auto target = static_cast<std::uint32_t>(cfg.target_state);
    for (std::uint32_t k = 0; k <= n; ++k) {
        if (t.states[k] != target) continue;
        if (smin[k] < t.distances[k]) continue;
        if (k > accept_limit) {
            ++rec.refused_in_tail;
            continue;
        }
        rec.times.push_back(k);
        rec.depths.push_back(t.distances[k]);
    }
    return rec;
}

void ExcursionStats::append(const ExcursionStats& other) {
    taus.insert(taus.end(), other.taus.begin(), other.taus.end());
    deltas.insert(deltas.end(), other.deltas.begin(), other.deltas.end());
    overshoots.insert(overshoots.end(), other.overshoots.begin(), other.overshoots.end());
    time_spans.insert(time_spans.end(), other.time_spans.begin(), other.time_spans.end());
    renewal_count += other.renewal_count;
    horizon += other.horizon;
}

ExcursionStats excursion_stats(const RenewalRecord& rec, const Trajectory& t) {
    if (rec.count() < 3)
        throw PreconditionError("only " + std::to_string(rec.count()) +
                                " renewals detected; run longer walks or more steps");
    ExcursionStats s;
    s.renewal_count = static_cast<std::uint32_t>(rec.count());
    s.first_time = rec.times.front();
    s.first_depth = rec.depths.front();
    s.horizon = t.steps;

    std::vector<std::uint64_t> u_prefix;
    if (t.is_lazy()) {
        u_prefix.resize(t.steps + 1, 0);
        for (std::uint32_t i = 0; i < t.steps; ++i) u_prefix[i + 1] = u_prefix[i] + t.lazy_u[i];
    }

    for (std::size_t i = 0; i + 1 < rec.count(); ++i) {
        const std::uint32_t a = rec.times[i], b = rec.times[i + 1];
        s.taus.push_back(b - a);
        s.deltas.push_back(rec.depths[i + 1] - rec.depths[i]);
        // inside the cone every position extends nf(Z_{R_i}), so the
        // displacement from the renewal point is the depth difference
        std::uint32_t peak = rec.depths[i];
        for (std::uint32_t k = a; k <= b; ++k) peak = std::max(peak, t.distances[k]);
        s.overshoots.push_back(peak - rec.depths[i]);
        if (t.is_lazy())
            s.time_spans.push_back(static_cast<std::uint32_t>(u_prefix[b] - u_prefix[a]));
    }
    return s;
}

std::vector<double> residuals(const ExcursionStats& s, double v) {
    std::vector<double> xi;
    xi.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        xi.push_back(static_cast<double>(s.deltas[i]) - v * static_cast<double>(s.taus[i]));
    return xi;
}

namespace {

IidDiagnostics::Series diagnose_series(const std::vector<double>& x) {
    IidDiagnostics::Series out;
    out.autocorr = autocorrelations(x, 5);
    out.zero_variance = sample_variance(x) <= 0.0;
    if (!out.zero_variance && x.size() >= 8) {
        const std::size_t half = x.size() / 2;
        std::vector<double> first(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(half));
        std::vector<double> second(x.begin() + static_cast<std::ptrdiff_t>(half), x.end());
        const KsResult ks = ks_two_sample(first, second);
        out.ks_halves_distance = ks.distance;
        out.ks_halves_p = ks.p_value;
    }
    return out;
}

std::vector<double> to_double(const std::vector<std::uint32_t>& v) {
    return std::vector<double>(v.begin(), v.end());
}

} // namespace

IidDiagnostics iid_diagnostics(const ExcursionStats& s) {
    IidDiagnostics d;
    d.excursions = s.size();
    const auto tau = to_double(s.taus);
    const auto delta = to_double(s.deltas);
    const double v = sum(delta) / sum(tau);
    d.tau = diagnose_series(tau);
    d.delta = diagnose_series(delta);
    d.xi = diagnose_series(residuals(s, v));
    return d;
}

namespace {

TailDiagnostics::Fit fit_tail(const std::vector<std::uint32_t>& data) {
    TailDiagnostics::Fit out;
    const LogSurvivalFit fit = fit_log_survival_tail(to_double(data), 0.10);
    out.slope = fit.slope;
    out.r2 = fit.r2;
    out.points = fit.points;
    out.usable = fit.usable;
    return out;
}

} // namespace

TailDiagnostics tail_diagnostics(const ExcursionStats& s) {
    TailDiagnostics d;
    d.tau = fit_tail(s.taus);
    d.delta = fit_tail(s.deltas);
    d.overshoot = fit_tail(s.overshoots);
    return d;
}

} // namespace conewalk
