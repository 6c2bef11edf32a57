#include "conewalk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include "conewalk/parallel.hpp"
#include "conewalk/rng.hpp"
#include "conewalk/stats.hpp"

namespace conewalk {

using nlohmann::json;

// ---------------------------------------------------------------- config --

namespace {

Presentation presentation_from_spec(const GroupSpec& g) {
    if (g.kind == "surface") return Presentation::surface(g.genus);
    if (g.kind == "free") return Presentation::free_group(g.rank);
    throw std::invalid_argument("group.kind must be \"surface\" or \"free\"");
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

} // namespace

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    try {
        if (j.contains("group")) {
            const json& g = j.at("group");
            read_if(g, "kind", cfg.group.kind);
            read_if(g, "genus", cfg.group.genus);
            read_if(g, "rank", cfg.group.rank);
        }
        if (j.contains("measure")) {
            const json& m = j.at("measure");
            if (m.contains("atoms")) {
                for (const json& atom : m.at("atoms"))
                    cfg.measure.atoms.emplace_back(atom.at("word").get<std::string>(),
                                                   atom.at("p").get<double>());
            }
            if (m.contains("lazy_ell") && !m.at("lazy_ell").is_null())
                cfg.measure.lazy_ell = m.at("lazy_ell").get<int>();
        }
        if (j.contains("walk")) {
            const json& w = j.at("walk");
            read_if(w, "n", cfg.n);
            read_if(w, "replicas", cfg.replicas);
            read_if(w, "seed", cfg.seed);
            read_if(w, "checkpoint_interval", cfg.checkpoint_interval);
        }
        if (j.contains("renewal")) {
            const json& r = j.at("renewal");
            read_if(r, "margin", cfg.margin);
            if (r.contains("target_state") && !r.at("target_state").is_null())
                cfg.target_state = r.at("target_state").get<std::int32_t>();
        }
        if (j.contains("clt")) {
            const json& c = j.at("clt");
            read_if(c, "n", cfg.clt_n);
            read_if(c, "replicas", cfg.clt_replicas);
        }
        if (j.contains("stay")) {
            const json& s = j.at("stay");
            read_if(s, "horizon", cfg.stay_horizon);
            read_if(s, "replicas", cfg.stay_replicas);
        }
        if (j.contains("probe")) {
            const json& p = j.at("probe");
            if (p.contains("atoms")) cfg.probe.atoms = p.at("atoms").get<std::vector<std::string>>();
            if (p.contains("direction"))
                cfg.probe.direction = p.at("direction").get<std::vector<double>>();
            if (p.contains("steps"))
                cfg.probe.step_sizes = p.at("steps").get<std::vector<double>>();
            read_if(p, "n", cfg.probe.n);
            read_if(p, "replicas", cfg.probe.replicas);
        }
        if (j.contains("oracle")) {
            const json& o = j.at("oracle");
            read_if(o, "radius", cfg.oracle_radius);
            read_if(o, "renewal_trajectories", cfg.oracle_renewal_trajectories);
            read_if(o, "renewal_n", cfg.oracle_renewal_n);
        }
        if (j.contains("ubiquity")) {
            const json& u = j.at("ubiquity");
            read_if(u, "probe_radius", cfg.ubiquity_probe_radius);
            read_if(u, "ball_radius", cfg.ubiquity_ball_radius);
        }
        if (j.contains("output")) read_if(j.at("output"), "dir", cfg.out_dir);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config is not valid JSON: " + std::string(e.what()));
    }
    return config_from_json(j);
}

json config_to_json(const RunConfig& cfg) {
    json atoms = json::array();
    for (const auto& [word, p] : cfg.measure.atoms) atoms.push_back({{"word", word}, {"p", p}});
    json j{
        {"group",
         cfg.group.kind == "surface"
             ? json{{"kind", "surface"}, {"genus", cfg.group.genus}}
             : json{{"kind", "free"}, {"rank", cfg.group.rank}}},
        {"measure",
         {{"atoms", atoms},
          {"lazy_ell", cfg.measure.lazy_ell ? json(*cfg.measure.lazy_ell) : json(nullptr)}}},
        {"walk",
         {{"n", cfg.n},
          {"replicas", cfg.replicas},
          {"seed", cfg.seed},
          {"checkpoint_interval", cfg.checkpoint_interval}}},
        {"renewal",
         {{"margin", cfg.margin},
          {"target_state", cfg.target_state ? json(*cfg.target_state) : json(nullptr)}}},
        {"clt", {{"n", cfg.clt_n}, {"replicas", cfg.clt_replicas}}},
        {"stay", {{"horizon", cfg.stay_horizon}, {"replicas", cfg.stay_replicas}}},
        {"oracle",
         {{"radius", cfg.oracle_radius},
          {"renewal_trajectories", cfg.oracle_renewal_trajectories},
          {"renewal_n", cfg.oracle_renewal_n}}},
        {"ubiquity",
         {{"probe_radius", cfg.ubiquity_probe_radius}, {"ball_radius", cfg.ubiquity_ball_radius}}},
        {"output", {{"dir", cfg.out_dir}}},
    };
    if (!cfg.probe.atoms.empty()) {
        j["probe"] = {{"atoms", cfg.probe.atoms},
                      {"direction", cfg.probe.direction},
                      {"steps", cfg.probe.step_sizes},
                      {"n", cfg.probe.n},
                      {"replicas", cfg.probe.replicas}};
    }
    return j;
}

std::vector<std::string> preset_names() { return {"f2-srw", "genus2-srw", "genus2-lazy"}; }

RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    if (name == "f2-srw") {
        cfg.group = GroupSpec{"free", 2, 2};
        cfg.n = 1'000'000;
        cfg.replicas = 64;
        cfg.seed = 20240501;
        cfg.oracle_radius = 9;
        cfg.probe.atoms = {"a1", "A1"};
        cfg.probe.direction = {1.0, -1.0};
    } else if (name == "genus2-srw") {
        cfg.group = GroupSpec{"surface", 2, 2};
        cfg.n = 1'000'000;
        cfg.replicas = 64;
        cfg.seed = 20240502;
        cfg.probe.atoms = {"a1", "A1"};
        cfg.probe.direction = {1.0, -1.0};
    } else if (name == "genus2-lazy") {
        cfg.group = GroupSpec{"surface", 2, 2};
        // a1 is supported only through its square; the averaged driver with
        // ell = 3 restores full generator support
        cfg.measure.atoms = {{"a1a1", 0.125}, {"A1", 0.125}, {"b1", 0.125}, {"B1", 0.125},
                             {"a2", 0.125},   {"A2", 0.125}, {"b2", 0.125}, {"B2", 0.125}};
        cfg.measure.lazy_ell = 3;
        cfg.n = 400'000;
        cfg.replicas = 32;
        cfg.seed = 20240503;
    } else {
        throw std::invalid_argument("unknown preset \"" + name + "\"; known: f2-srw, genus2-srw, genus2-lazy");
    }
    return cfg;
}

// ------------------------------------------------------------- workspace --

Workspace build_workspace(const RunConfig& cfg) {
    Presentation pres = presentation_from_spec(cfg.group);
    RewriteSystem rw(pres);
    ConeAutomaton automaton = build_automaton(rw);
    const bool assumption = recurrence_classify(automaton);
    if (!assumption)
        throw AssumptionError("recurrent subgraph of the cone automaton is not strongly "
                              "connected for " + pres.describe());
    mark_large(automaton);

    DrivingMeasure measure;
    if (cfg.measure.atoms.empty()) {
        measure = simple_random_walk(pres);
    } else {
        for (const auto& [word, p] : cfg.measure.atoms)
            measure.atoms.push_back(MeasureAtom{parse_word(word, pres.alphabet_size()), p});
        measure.finalize();
    }

    const bool lazy_requested = cfg.measure.lazy_ell && *cfg.measure.lazy_ell > 1;
    MeasureReport report = validate_measure(measure, rw, lazy_requested);

    std::optional<LazyAverageDriver> lazy;
    if (lazy_requested) {
        lazy = LazyAverageDriver{measure, *cfg.measure.lazy_ell};
        if (!lazy_covers_generators(*lazy, rw))
            throw PreconditionError("lazy_ell = " + std::to_string(lazy->ell) +
                                    " does not restore generator support; increase it");
    }
    return Workspace{std::move(pres), std::move(rw),      std::move(automaton),
                     std::move(measure), std::move(lazy), std::move(report)};
}

std::int32_t choose_target_state(const Workspace& ws, const RunConfig& cfg) {
    if (cfg.target_state) {
        const std::int32_t t = *cfg.target_state;
        if (t < 0 || t >= static_cast<std::int32_t>(ws.automaton.state_count()))
            throw std::invalid_argument("target_state out of range");
        if (!ws.automaton.states[t].recurrent || !ws.automaton.states[t].large)
            throw std::invalid_argument("target_state must be recurrent and large");
        return t;
    }
    const std::uint32_t pilot_n =
        std::clamp<std::uint32_t>(cfg.n / 10, 2000, 50'000);
    const std::uint64_t pilot_seed = stream_seed(cfg.seed, 0x9170'7000ULL);
    Trajectory pilot =
        ws.lazy ? run_lazy_walk(*ws.lazy, ws.rewrite, ws.automaton, pilot_n, pilot_seed)
                : run_walk(ws.measure, ws.rewrite, ws.automaton, pilot_n, pilot_seed);

    std::vector<std::uint64_t> visits(ws.automaton.state_count(), 0);
    for (std::uint32_t s : pilot.states) visits[s] += 1;
    std::int32_t best = -1;
    std::uint64_t best_count = 0;
    for (std::size_t s = 0; s < visits.size(); ++s) {
        if (!ws.automaton.states[s].recurrent || !ws.automaton.states[s].large) continue;
        if (visits[s] > best_count) {
            best_count = visits[s];
            best = static_cast<std::int32_t>(s);
        }
    }
    if (best < 0) {
        for (std::size_t s = 0; s < ws.automaton.state_count(); ++s)
            if (ws.automaton.states[s].recurrent && ws.automaton.states[s].large)
                return static_cast<std::int32_t>(s);
        throw AssumptionError("automaton has no recurrent large state");
    }
    return best;
}

// --------------------------------------------------------- oracle checks --

std::vector<NormalForm> materialize_positions(const Trajectory& t, const DrivingMeasure& m,
                                              const RewriteSystem& rw) {
    std::vector<NormalForm> out;
    out.reserve(t.steps + 1);
    out.push_back(NormalForm{});
    NormalForm cur;
    std::size_t inc = 0;
    for (std::uint32_t i = 0; i < t.steps; ++i) {
        const std::uint32_t sub = t.is_lazy() ? t.lazy_u[i] : 1;
        for (std::uint32_t j = 0; j < sub; ++j) cur = rw.mul(cur, m.atoms[t.increments[inc++]].word);
        out.push_back(cur);
    }
    return out;
}

RenewalRecord brute_force_renewals(const std::vector<NormalForm>& positions,
                                   const ConeAutomaton& a, const RenewalConfig& cfg) {
    RenewalRecord rec;
    const std::size_t n = positions.size() - 1;
    rec.horizon = static_cast<std::uint32_t>(n);
    rec.margin = cfg.margin;
    rec.target_state = cfg.target_state;
    const std::size_t limit = cfg.discard_tail ? (cfg.margin > n ? 0 : n - cfg.margin) : n;
    for (std::size_t k = 0; k <= n; ++k) {
        if (state_of(positions[k], a) != cfg.target_state) continue;
        bool nested = true;
        for (std::size_t i = k; i <= n && nested; ++i)
            nested = in_cone(positions[k], positions[i]);
        if (!nested) continue;
        if (k > limit) {
            ++rec.refused_in_tail;
            continue;
        }
        rec.times.push_back(static_cast<std::uint32_t>(k));
        rec.depths.push_back(static_cast<std::uint32_t>(positions[k].length()));
    }
    return rec;
}

OracleCheckReport run_oracle_checks(const Workspace& ws, const OracleCheckOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const RewriteSystem& rw = ws.rewrite;
    const ConeAutomaton& automaton = ws.automaton;
    const int alphabet = rw.alphabet_size();
    if (opts.radius < rw.signature_length() + 1)
        throw std::invalid_argument("oracle radius must be at least the longest rule lhs");

    OracleCheckReport report;
    const BfsBall ball = bfs_oracle(rw, opts.radius, opts.max_elements);
    report.sphere_sizes = ball.sphere_sizes;

    // the independent oracle: built from the presentation, not from the
    // (possibly corrupt) system under test
    const RewriteSystem dehn = dehn_reducer(ws.presentation);

    // normal-form length == exact Dehn distance on every freely reduced
    // word, and the BFS layering agrees
    {
        bool ok = true;
        std::size_t words = 0;
        Word w;
        auto dfs = [&](auto&& self) -> void {
            if (static_cast<int>(w.size()) >= opts.radius) return;
            for (int c = 0; c < alphabet; ++c) {
                const Letter x{static_cast<std::uint8_t>(c)};
                if (!w.empty() && w.back() == x.inverse()) continue;
                w.push_back(x);
                ++words;
                const NormalForm nf = rw.normal_form(w);
                if (nf.length() != dehn.normal_form(w).length()) ok = false;
                const std::int32_t id = ball.find(nf.letters);
                if (id < 0 || ball.distance[id] != nf.length()) ok = false;
                if (ok) self(self);
                w.pop_back();
            }
        };
        dfs(dfs);
        report.words_checked = words;
        report.normal_form_lengths_ok = ok;
    }

    // sphere counts == accepted path counts (and the closed form for trees)
    {
        bool ok = true;
        for (int n = 0; n <= opts.radius; ++n) {
            const auto paths = count_paths(automaton, n);
            if (paths != static_cast<std::uint64_t>(ball.sphere_sizes[n])) ok = false;
            if (ws.presentation.kind() == GroupKind::Free && n >= 1) {
                const std::uint64_t k2 = static_cast<std::uint64_t>(alphabet);
                std::uint64_t expect = k2;
                for (int i = 1; i < n; ++i) expect *= (k2 - 1);
                if (paths != expect) ok = false;
            }
        }
        report.sphere_counts_ok = ok;
    }

    // every rule of the system under test is a group identity: lhs * rhs^-1
    // Dehn-reduces to the empty word
    {
        bool ok = true;
        for (const RewriteRule& r : rw.rules()) {
            Word product = r.lhs;
            const Word rhs_inv = inverse_word(r.rhs);
            product.insert(product.end(), rhs_inv.begin(), rhs_inv.end());
            if (!dehn.normal_form(product).empty()) ok = false;
        }
        report.rules_ok = ok;
    }

    // distinct irreducible words are distinct group elements: within each
    // sphere, bucket by abelianization (a group invariant) and Dehn-test
    // every remaining pair; free reduction itself is exact for free groups
    {
        bool ok = true;
        std::size_t pairs = 0;
        if (ws.presentation.kind() == GroupKind::Free) {
            for (const RewriteRule& r : rw.rules())
                if (r.kind != RuleKind::FreeCancellation) ok = false;
        } else {
            const int generators = ws.presentation.generator_count();
            std::map<std::vector<std::int32_t>, std::vector<std::int32_t>> buckets;
            for (std::size_t id = 0; id < ball.size(); ++id) {
                std::vector<std::int32_t> key(static_cast<std::size_t>(generators) + 1, 0);
                key[0] = ball.distance[id];
                for (Letter l : ball.elements[id])
                    key[static_cast<std::size_t>(l.generator_index()) + 1] += l.sign();
                buckets[key].push_back(static_cast<std::int32_t>(id));
            }
            for (const auto& [key, members] : buckets) {
                for (std::size_t i = 0; i < members.size(); ++i) {
                    for (std::size_t j = i + 1; j < members.size(); ++j) {
                        Word product = ball.elements[members[i]];
                        const Word inv = inverse_word(ball.elements[members[j]]);
                        product.insert(product.end(), inv.begin(), inv.end());
                        ++pairs;
                        if (dehn.normal_form(product).empty()) ok = false;
                    }
                }
            }
        }
        report.uniqueness_ok = ok;
        report.pairs_tested = pairs;
    }

    // prefix-additivity of cones: d(e,y) = d(e,x) + d(x,y) for prefixes x
    {
        bool ok = true;
        for (std::size_t id = 0; id < ball.size(); ++id) {
            const Word& y = ball.elements[id];
            if (y.size() < 2) continue;
            for (std::size_t cut : {y.size() / 2, y.size() - 1}) {
                const NormalForm x{Word(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(cut))};
                const NormalForm rest = rw.mul(rw.normal_form(inverse_word(x.letters)), y);
                if (static_cast<std::size_t>(rest.length()) != y.size() - cut) ok = false;
            }
        }
        report.cone_additivity_ok = ok;
    }

    // equal states => equal geodesic-extension sets (and transitions only
    // ever extend geodesically)
    {
        bool ok = true;
        std::map<std::int32_t, std::uint64_t> mask_by_state;
        for (std::size_t id = 0; id < ball.size(); ++id) {
            if (ball.distance[id] >= opts.radius) continue; // adjacency incomplete out there
            std::uint64_t mask = 0;
            for (int c = 0; c < alphabet; ++c) {
                const std::int32_t nb =
                    ball.adjacency[id * static_cast<std::size_t>(alphabet) + c];
                if (nb >= 0 && ball.distance[nb] == ball.distance[id] + 1)
                    mask |= (1ULL << c);
            }
            const std::int32_t st = state_by_signature(automaton, ball.elements[id]);
            auto [it, inserted] = mask_by_state.emplace(st, mask);
            if (!inserted && it->second != mask) ok = false;
            for (int c = 0; c < alphabet; ++c)
                if (automaton.transition(st, Letter{static_cast<std::uint8_t>(c)}) >= 0 &&
                    !(mask & (1ULL << c)))
                    ok = false;
        }
        report.state_consistency_ok = ok;
    }

    // optimized renewal detector == quadratic definition
    {
        bool ok = true;
        std::size_t compared = 0;
        RunConfig pilot_cfg;
        pilot_cfg.n = opts.renewal_n;
        pilot_cfg.seed = opts.seed;
        const std::int32_t target = choose_target_state(ws, pilot_cfg);
        for (int t = 0; t < opts.renewal_trajectories; ++t) {
            const Trajectory traj =
                run_walk(ws.measure, rw, automaton, opts.renewal_n, stream_seed(opts.seed, t));
            const RenewalConfig rcfg{target, opts.renewal_margin, true};
            const RenewalRecord fast = detect_renewals(traj, rcfg);
            const auto positions = materialize_positions(traj, ws.measure, rw);
            const RenewalRecord slow = brute_force_renewals(positions, automaton, rcfg);
            if (fast.times != slow.times || fast.depths != slow.depths) ok = false;
            compared += fast.times.size();
        }
        report.renewal_oracle_ok = ok;
        report.renewals_compared = compared;
    }

    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ------------------------------------------------------------ estimation --

EstimationResult run_estimation(const Workspace& ws, const RunConfig& cfg, bool with_clt) {
    if (cfg.replicas == 0) throw std::invalid_argument("walk.replicas must be >= 1");
    if (cfg.n == 0) throw std::invalid_argument("walk.n must be >= 1");

    EstimationResult result;
    result.lazy_mode = ws.lazy.has_value();
    result.target_state = choose_target_state(ws, cfg);
    result.margin = cfg.margin;
    result.replicas = cfg.replicas;

    const RenewalConfig rcfg{result.target_state, cfg.margin, true};
    const RenewalConfig rcfg2{result.target_state, 2 * cfg.margin, true};

    struct ReplicaOut {
        ExcursionStats stats, stats2;
        double distance_over_time = 0.0;
        std::uint32_t renewals = 0;
        bool usable = false;
    };
    std::vector<ReplicaOut> outs(cfg.replicas);
    std::vector<Trajectory> first_trajectory(1);

    parallel_for(cfg.replicas, [&](std::size_t r) {
        WalkOptions wopts;
        wopts.checkpoint_interval = cfg.checkpoint_interval;
        Trajectory traj =
            ws.lazy ? run_lazy_walk(*ws.lazy, ws.rewrite, ws.automaton, cfg.n,
                                    stream_seed(cfg.seed, r), wopts)
                    : run_walk(ws.measure, ws.rewrite, ws.automaton, cfg.n,
                               stream_seed(cfg.seed, r), wopts);
        ReplicaOut& out = outs[r];
        const RenewalRecord rec = detect_renewals(traj, rcfg);
        const RenewalRecord rec2 = detect_renewals(traj, rcfg2);
        if (rec.count() >= 3 && rec2.count() >= 3) {
            out.stats = excursion_stats(rec, traj);
            out.stats2 = excursion_stats(rec2, traj);
            out.usable = true;
        }
        out.renewals = static_cast<std::uint32_t>(rec.count());
        double time = static_cast<double>(cfg.n);
        if (traj.is_lazy()) {
            std::uint64_t total_u = 0;
            for (std::uint16_t u : traj.lazy_u) total_u += u;
            time = static_cast<double>(total_u);
        }
        out.distance_over_time = static_cast<double>(traj.final_distance()) / time;
        if (r == 0) first_trajectory[0] = std::move(traj);
    });

    ExcursionStats pooled, pooled2;
    std::vector<double> direct;
    std::uint64_t renewal_total = 0;
    std::size_t usable = 0;
    for (const ReplicaOut& out : outs) {
        if (out.usable) {
            pooled.append(out.stats);
            pooled2.append(out.stats2);
            ++usable;
        }
        renewal_total += out.renewals;
        direct.push_back(out.distance_over_time);
    }
    if (usable == 0)
        throw PreconditionError("no replica produced 3 renewals; increase walk.n");
    result.total_steps = static_cast<std::uint64_t>(cfg.n) * cfg.replicas;

    result.speed = estimate_speed(pooled);
    result.variance = estimate_variance(pooled, result.speed.v.value);
    result.speed_double_margin = estimate_speed(pooled2);
    result.v_direct = direct_speed(direct);
    result.iid = iid_diagnostics(outs[0].usable ? outs[0].stats : pooled);
    result.tails = tail_diagnostics(pooled);

    const auto tau = std::vector<double>(pooled.taus.begin(), pooled.taus.end());
    result.k_rate_times_mean_tau =
        static_cast<double>(renewal_total) / static_cast<double>(result.total_steps) * mean(tau);

    double clt_v = result.speed.v.value;
    double clt_sigma2 = result.variance.sigma2.value;
    if (result.lazy_mode) {
        result.lazy = lazy_corrected_estimates(pooled, ws.lazy->ell);
        clt_v = result.lazy.v.value;
        clt_sigma2 = result.lazy.sigma2.value;
    }

    if (with_clt) {
        result.clt = clt_check(ws.measure, ws.rewrite, cfg.clt_n, cfg.clt_replicas,
                               stream_seed(cfg.seed, 0xC17'0000ULL), clt_v, clt_sigma2);
    }
    result.pooled = std::move(pooled);
    return result;
}

// --------------------------------------------------------------- reports --

namespace {

json value_json(const ValueWithError& v) { return json{{"value", v.value}, {"se", v.se}}; }

json iid_series_json(const IidDiagnostics::Series& s) {
    return json{{"autocorr", s.autocorr},
                {"ks_halves_distance", s.ks_halves_distance},
                {"ks_halves_p", s.ks_halves_p},
                {"zero_variance", s.zero_variance}};
}

json tail_fit_json(const TailDiagnostics::Fit& f) {
    return json{{"slope", f.slope}, {"r2", f.r2}, {"points", f.points}, {"usable", f.usable}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::filesystem::path ensure_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

json manifest_json(const RunConfig& cfg, const std::string& command,
                   const std::vector<std::string>& outputs) {
    return json{
        {"command", command},
        {"config", config_to_json(cfg)},
        {"outputs", outputs},
        {"seed_derivation",
         {{"base_seed", cfg.seed},
          {"engine", "mt19937_64"},
          {"stream_seed", "splitmix64(base ^ splitmix64(stream + 0x51ed2701ab0587e5))"},
          {"streams",
           {{"estimation_replica_r", "stream r"},
            {"pilot", "stream 0x91707000"},
            {"clt_base", "stream 0xC170000, then replica streams under that base"}}}}},
        {"version", "conewalk 0.1.0"},
    };
}

} // namespace

json automaton_report_json(const Workspace& ws) {
    const ConeAutomaton& a = ws.automaton;
    json states = json::array();
    for (std::size_t i = 0; i < a.state_count(); ++i) {
        const AutomatonState& s = a.states[i];
        json transitions = json::object();
        for (int c = 0; c < a.alphabet; ++c) {
            const std::int32_t to = a.transition(static_cast<std::int32_t>(i),
                                                 Letter{static_cast<std::uint8_t>(c)});
            if (to >= 0) transitions[letter_name(Letter{static_cast<std::uint8_t>(c)})] = to;
        }
        states.push_back(json{{"id", i},
                              {"signature", format_word(s.signature)},
                              {"recurrent", s.recurrent},
                              {"large", s.large},
                              {"transitions", transitions}});
    }
    json j{{"group", ws.presentation.describe()},
           {"state_count", a.state_count()},
           {"recurrent_count", a.recurrent_count()},
           {"assumption_recurrent_scc", a.assumption_holds},
           {"start", a.start},
           {"states", states}};
    if (a.ubiquity_state >= 0) {
        j["ubiquity"] = {{"state", a.ubiquity_state},
                         {"radius", a.ubiquity_radius ? json(*a.ubiquity_radius) : json(nullptr)}};
    }
    return j;
}

json estimate_report_json(const EstimationResult& r, const RunConfig& cfg) {
    json j{
        {"v_renewal", value_json(r.speed.v)},
        {"v_renewal_bootstrap_se", r.speed.bootstrap_se},
        {"v_direct", value_json(r.v_direct)},
        {"sigma2", value_json(r.variance.sigma2)},
        {"sigma2_split", value_json(r.variance.sigma2_split)},
        {"sigma2_bootstrap_se", r.variance.bootstrap_se},
        {"Sigma", r.variance.Sigma},
        {"n", cfg.n},
        {"replicas", r.replicas},
        {"excursions", r.pooled.size()},
        {"margin", r.margin},
        {"target_state", r.target_state},
        {"se_valid", r.speed.se_valid},
        {"speed_margin_sensitivity",
         {{"margin", value_json(r.speed.v)},
          {"double_margin", value_json(r.speed_double_margin.v)},
          {"gap_in_combined_se",
           std::abs(r.speed.v.value - r.speed_double_margin.v.value) /
               std::max(combined_se(r.speed.v.se, r.speed_double_margin.v.se), 1e-300)}}},
        {"k_rate_times_mean_tau", r.k_rate_times_mean_tau},
        {"iid",
         {{"tau", iid_series_json(r.iid.tau)},
          {"delta", iid_series_json(r.iid.delta)},
          {"xi", iid_series_json(r.iid.xi)},
          {"excursions", r.iid.excursions}}},
        {"tails",
         {{"tau", tail_fit_json(r.tails.tau)},
          {"delta", tail_fit_json(r.tails.delta)},
          {"overshoot", tail_fit_json(r.tails.overshoot)}}},
    };
    if (r.lazy_mode) {
        j["lazy"] = {{"ell", r.lazy.ell},
                     {"v", value_json(r.lazy.v)},
                     {"sigma2", value_json(r.lazy.sigma2)},
                     {"v_const_corrected", value_json(r.lazy.v_const_corrected)},
                     {"sigma2_const_corrected", r.lazy.sigma2_const_corrected}};
    }
    if (r.clt.replicas > 0) {
        j["clt"] = {{"ks_distance", r.clt.ks_distance},
                    {"ks_threshold_1pct", r.clt.ks_threshold},
                    {"ks_p_value", r.clt.ks_p_value},
                    {"pass", r.clt.pass},
                    {"n", r.clt.n},
                    {"replicas", r.clt.replicas},
                    {"v_used", r.clt.v_used},
                    {"sigma2_used", r.clt.sigma2_used}};
    }
    return j;
}

// -------------------------------------------------------------- commands --

int cmd_build_automaton(const RunConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    const std::int32_t target = choose_target_state(ws, cfg);
    const BfsBall ball = bfs_oracle(ws.rewrite, cfg.ubiquity_ball_radius);
    mark_large_and_ubiquitous(ws.automaton, ball, target, cfg.ubiquity_probe_radius);

    const auto dir = ensure_out_dir(cfg);
    write_json(dir / "automaton.json", automaton_report_json(ws));
    write_json(dir / "manifest.json", manifest_json(cfg, "build-automaton", {"automaton.json"}));

    std::cout << ws.presentation.describe() << ": " << ws.automaton.state_count() << " states, "
              << ws.automaton.recurrent_count() << " recurrent; recurrent subgraph strongly connected: "
              << (ws.automaton.assumption_holds ? "yes" : "no") << "\n";
    std::cout << "target state " << target << " (signature \""
              << format_word(ws.automaton.states[target].signature) << "\"), ubiquity radius ";
    if (ws.automaton.ubiquity_radius)
        std::cout << *ws.automaton.ubiquity_radius;
    else
        std::cout << "> " << cfg.ubiquity_probe_radius;
    std::cout << "\n";
    return exit_code::ok;
}

int cmd_walk(const RunConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    WalkOptions wopts;
    wopts.checkpoint_interval = cfg.checkpoint_interval;
    const Trajectory traj =
        ws.lazy ? run_lazy_walk(*ws.lazy, ws.rewrite, ws.automaton, cfg.n,
                                stream_seed(cfg.seed, 0), wopts)
                : run_walk(ws.measure, ws.rewrite, ws.automaton, cfg.n, stream_seed(cfg.seed, 0),
                           wopts);

    const auto dir = ensure_out_dir(cfg);
    std::string csv = "step,distance,state_id\n";
    for (std::uint32_t i = 0; i <= traj.steps; ++i)
        csv += std::to_string(i) + "," + std::to_string(traj.distances[i]) + "," +
               std::to_string(traj.states[i]) + "\n";
    write_text(dir / "trajectory.csv", csv);
    write_json(dir / "manifest.json", manifest_json(cfg, "walk", {"trajectory.csv"}));
    std::cout << "walk of " << traj.steps << " steps, final distance " << traj.final_distance()
              << " -> " << (dir / "trajectory.csv").string() << "\n";
    return exit_code::ok;
}

int cmd_estimate(const RunConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    const EstimationResult r = run_estimation(ws, cfg, /*with_clt=*/true);

    const auto dir = ensure_out_dir(cfg);
    write_json(dir / "estimate.json", estimate_report_json(r, cfg));

    // excursions of replica 0 with residuals under the pooled speed
    {
        const std::uint64_t seed0 = stream_seed(cfg.seed, 0);
        WalkOptions wopts;
        Trajectory traj = ws.lazy ? run_lazy_walk(*ws.lazy, ws.rewrite, ws.automaton, cfg.n,
                                                  seed0, wopts)
                                  : run_walk(ws.measure, ws.rewrite, ws.automaton, cfg.n, seed0,
                                             wopts);
        const RenewalRecord rec =
            detect_renewals(traj, RenewalConfig{r.target_state, cfg.margin, true});
        std::string csv = "i,R_i,tau,delta,xi,overshoot\n";
        if (rec.count() >= 3) {
            const ExcursionStats s = excursion_stats(rec, traj);
            const std::vector<double> xi = residuals(s, r.speed.v.value);
            for (std::size_t i = 0; i < s.size(); ++i)
                csv += std::to_string(i + 1) + "," + std::to_string(rec.times[i]) + "," +
                       std::to_string(s.taus[i]) + "," + std::to_string(s.deltas[i]) + "," +
                       std::to_string(xi[i]) + "," + std::to_string(s.overshoots[i]) + "\n";
        }
        write_text(dir / "excursions.csv", csv);
        write_json(dir / "renewal_summary.json",
                   json{{"replica", 0},
                        {"renewals", rec.count()},
                        {"margin", rec.margin},
                        {"refused_in_tail", rec.refused_in_tail},
                        {"target_state", rec.target_state},
                        {"first_time", rec.count() ? json(rec.times.front()) : json(nullptr)}});
    }

    std::string csv = "standardized\n";
    for (double x : r.clt.standardized) csv += std::to_string(x) + "\n";
    write_text(dir / "clt_samples.csv", csv);
    write_json(dir / "manifest.json",
               manifest_json(cfg, "estimate",
                             {"estimate.json", "excursions.csv", "renewal_summary.json",
                              "clt_samples.csv"}));

    std::cout << "v_renewal = " << r.speed.v.value << " +- " << r.speed.v.se
              << ", v_direct = " << r.v_direct.value << " +- " << r.v_direct.se << "\n"
              << "sigma2 = " << r.variance.sigma2.value << " +- " << r.variance.sigma2.se
              << " (Sigma = " << r.variance.Sigma << ")\n";
    if (r.lazy_mode)
        std::cout << "lazy-corrected v = " << r.lazy.v.value << " +- " << r.lazy.v.se
                  << ", sigma2 = " << r.lazy.sigma2.value << "\n";
    std::cout << "CLT: ks = " << r.clt.ks_distance << " (threshold " << r.clt.ks_threshold
              << ") -> " << (r.clt.pass ? "pass" : "FAIL") << "\n";
    return exit_code::ok;
}

int cmd_diagnose(const RunConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    const EstimationResult r = run_estimation(ws, cfg, /*with_clt=*/true);

    StayProbeOptions sopts;
    sopts.horizon = cfg.stay_horizon;
    sopts.replicas = cfg.stay_replicas;
    sopts.margin = std::min(cfg.margin, cfg.stay_horizon / 2);
    sopts.seed = stream_seed(cfg.seed, 0x57a'0000ULL);
    const StayEstimate stay =
        estimate_stay_probability(r.target_state, ws.measure, ws.rewrite, ws.automaton, sopts);

    json j = estimate_report_json(r, cfg);
    j["stay_probability"] = {{"p", stay.p_stay},
                             {"se", stay.se},
                             {"p_at_margin", stay.p_at_margin},
                             {"p_at_half_margin", stay.p_at_half_margin},
                             {"replicas", stay.replicas},
                             {"horizon", cfg.stay_horizon}};

    const auto dir = ensure_out_dir(cfg);
    write_json(dir / "diagnose.json", j);
    std::string csv = "standardized\n";
    for (double x : r.clt.standardized) csv += std::to_string(x) + "\n";
    write_text(dir / "clt_samples.csv", csv);
    write_json(dir / "manifest.json",
               manifest_json(cfg, "diagnose", {"diagnose.json", "clt_samples.csv"}));

    std::cout << "iid: lag-1 autocorr tau/delta/xi = " << r.iid.tau.autocorr[0] << "/"
              << r.iid.delta.autocorr[0] << "/" << r.iid.xi.autocorr[0] << "\n"
              << "tails: slope(tau) = " << r.tails.tau.slope << " r2 = " << r.tails.tau.r2
              << ", slope(delta) = " << r.tails.delta.slope << " r2 = " << r.tails.delta.r2 << "\n"
              << "margin sensitivity: |v(M) - v(2M)| = "
              << std::abs(r.speed.v.value - r.speed_double_margin.v.value) << "\n"
              << "stay probability at target = " << stay.p_stay << " +- " << stay.se << "\n"
              << "CLT: ks = " << r.clt.ks_distance << " -> " << (r.clt.pass ? "pass" : "FAIL")
              << "\n";
    return exit_code::ok;
}

int cmd_probe(const RunConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    if (ws.lazy) throw std::invalid_argument("probe runs on plain walks only");
    if (cfg.probe.atoms.empty())
        throw std::invalid_argument("probe.atoms and probe.direction are required");

    PerturbationFamily family;
    family.base = ws.measure;
    for (const std::string& w : cfg.probe.atoms) {
        const Word word = parse_word(w, ws.presentation.alphabet_size());
        bool found = false;
        for (std::size_t i = 0; i < family.base.atoms.size(); ++i)
            if (family.base.atoms[i].word == word) {
                family.atom_indices.push_back(i);
                found = true;
                break;
            }
        if (!found) throw std::invalid_argument("probe atom \"" + w + "\" not in the measure");
    }
    family.direction = cfg.probe.direction;

    const SmoothnessReport report =
        smoothness_probe(family, ws.rewrite, ws.automaton, cfg.probe.n, cfg.probe.replicas,
                         stream_seed(cfg.seed, 0x9b0be), cfg.probe.step_sizes);

    const auto dir = ensure_out_dir(cfg);
    std::string csv = "step,v_plus,v_minus,derivative,se,ess_plus,ess_minus\n";
    json rows = json::array();
    for (const DerivativeRow& row : report.rows) {
        csv += std::to_string(row.step) + "," + std::to_string(row.v_plus) + "," +
               std::to_string(row.v_minus) + "," + std::to_string(row.derivative) + "," +
               std::to_string(row.se) + "," + std::to_string(row.ess_plus) + "," +
               std::to_string(row.ess_minus) + "\n";
        rows.push_back(json{{"step", row.step},
                            {"v_plus", row.v_plus},
                            {"v_minus", row.v_minus},
                            {"derivative", row.derivative},
                            {"se", row.se},
                            {"ess_plus", row.ess_plus},
                            {"ess_minus", row.ess_minus}});
    }
    write_text(dir / "derivative_table.csv", csv);
    write_json(dir / "probe.json",
               json{{"v_base", report.v_base},
                    {"n", report.n},
                    {"replicas", report.replicas},
                    {"rows", rows},
                    {"note", "finite-difference stability probe; statistical evidence only"}});
    write_json(dir / "manifest.json",
               manifest_json(cfg, "probe", {"derivative_table.csv", "probe.json"}));
    std::cout << "probe: " << report.rows.size() << " step sizes, base v = " << report.v_base
              << ", smallest-step derivative = " << report.rows.back().derivative << " +- "
              << report.rows.back().se << "\n";
    return exit_code::ok;
}

int cmd_oracle_check(const RunConfig& cfg) {
    Workspace ws = build_workspace(cfg);
    OracleCheckOptions opts;
    opts.radius = cfg.oracle_radius;
    opts.renewal_trajectories = cfg.oracle_renewal_trajectories;
    opts.renewal_n = cfg.oracle_renewal_n;
    opts.renewal_margin = std::min<std::uint32_t>(cfg.margin, cfg.oracle_renewal_n / 4);
    opts.seed = stream_seed(cfg.seed, 0x0bac1eULL);
    const OracleCheckReport report = run_oracle_checks(ws, opts);

    auto line = [](bool ok, const std::string& what) {
        std::cout << (ok ? "[pass] " : "[FAIL] ") << what << "\n";
    };
    line(report.normal_form_lengths_ok,
         "normal-form lengths match exact Dehn distances (" +
             std::to_string(report.words_checked) + " words)");
    line(report.sphere_counts_ok, "sphere sizes match accepted path counts");
    line(report.rules_ok, "rewrite rules connect equal group elements");
    line(report.uniqueness_ok, "irreducible words are pairwise distinct elements (" +
                                   std::to_string(report.pairs_tested) + " pairs)");
    line(report.cone_additivity_ok, "cones are prefix-additive");
    line(report.state_consistency_ok, "states determine geodesic extension sets");
    line(report.renewal_oracle_ok,
         "renewal detector matches the quadratic definition (" +
             std::to_string(report.renewals_compared) + " renewals)");

    const auto dir = ensure_out_dir(cfg);
    write_json(dir / "oracle.json",
               json{{"normal_form_lengths_ok", report.normal_form_lengths_ok},
                    {"words_checked", report.words_checked},
                    {"sphere_counts_ok", report.sphere_counts_ok},
                    {"sphere_sizes", report.sphere_sizes},
                    {"rules_ok", report.rules_ok},
                    {"uniqueness_ok", report.uniqueness_ok},
                    {"pairs_tested", report.pairs_tested},
                    {"cone_additivity_ok", report.cone_additivity_ok},
                    {"state_consistency_ok", report.state_consistency_ok},
                    {"renewal_oracle_ok", report.renewal_oracle_ok},
                    {"renewals_compared", report.renewals_compared},
                    {"seconds", report.seconds}});
    write_json(dir / "manifest.json", manifest_json(cfg, "oracle-check", {"oracle.json"}));
    return report.all_ok() ? exit_code::ok : exit_code::failure;
}

} // namespace conewalk
