#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conewalk/estimators.hpp"

#include <json.hpp>

namespace conewalk {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;       // oracle mismatch or internal error
inline constexpr int config = 2;        // malformed configuration / usage
inline constexpr int assumption = 3;    // automaton assumption failed
inline constexpr int precondition = 4;  // statistical precondition failed
} // namespace exit_code

struct GroupSpec {
    std::string kind = "surface"; // "surface" | "free"
    int genus = 2;
    int rank = 2;
};

struct MeasureSpec {
    // empty atoms = uniform on the signed generators
    std::vector<std::pair<std::string, double>> atoms;
    std::optional<int> lazy_ell;
};

struct ProbeSpec {
    std::vector<std::string> atoms;  // perturbed atom words (the set B)
    std::vector<double> direction;   // signed weights, sum 0
    std::vector<double> step_sizes = {0.02, 0.01, 0.005, 0.0025, 0.00125};
    std::uint32_t n = 500;
    std::uint32_t replicas = 4000;
};

struct RunConfig {
    GroupSpec group;
    MeasureSpec measure;

    std::uint32_t n = 200'000;
    std::uint32_t replicas = 64;
    std::uint64_t seed = 1;
    std::uint32_t checkpoint_interval = 0;

    std::uint32_t margin = 256;
    std::optional<std::int32_t> target_state;

    std::uint32_t clt_n = 10'000;
    std::uint32_t clt_replicas = 2000;

    std::uint32_t stay_horizon = 4096;
    std::uint32_t stay_replicas = 4000;

    ProbeSpec probe;

    int oracle_radius = 5;
    int oracle_renewal_trajectories = 10;
    std::uint32_t oracle_renewal_n = 2000;

    int ubiquity_probe_radius = 4;
    int ubiquity_ball_radius = 5;

    std::string out_dir = "out";
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

// Shipped presets: "f2-srw", "genus2-srw", "genus2-lazy".
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Everything a run builds before sampling: the presentation, rules, the
// classified automaton and the validated measure (plus lazy driver).
struct Workspace {
    Presentation presentation;
    RewriteSystem rewrite;
    ConeAutomaton automaton;
    DrivingMeasure measure;
    std::optional<LazyAverageDriver> lazy;
    MeasureReport measure_report;
};

// Builds the workspace; throws AssumptionError when the recurrent subgraph
// is not strongly connected, PreconditionError for measure violations.
Workspace build_workspace(const RunConfig& cfg);

// The renewal target: explicit config value, or the recurrent large state
// most visited by a pilot walk (the choice only needs to be large and
// ubiquitous; a frequent one keeps excursions short).
std::int32_t choose_target_state(const Workspace& ws, const RunConfig& cfg);

struct OracleCheckOptions {
    int radius = 5;
    std::size_t max_elements = 8'000'000;
    int renewal_trajectories = 10;
    std::uint32_t renewal_n = 2000;
    std::uint32_t renewal_margin = 200;
    std::uint64_t seed = 7;
};

struct OracleCheckReport {
    bool normal_form_lengths_ok = false;
    std::size_t words_checked = 0;
    bool sphere_counts_ok = false;
    std::vector<std::int64_t> sphere_sizes;
    bool rules_ok = false;
    bool uniqueness_ok = false;
    std::size_t pairs_tested = 0;
    bool cone_additivity_ok = false;
    bool state_consistency_ok = false;
    bool renewal_oracle_ok = false;
    std::size_t renewals_compared = 0;
    double seconds = 0.0;

    bool all_ok() const {
        return normal_form_lengths_ok && sphere_counts_ok && rules_ok && uniqueness_ok &&
               cone_additivity_ok && state_consistency_ok && renewal_oracle_ok;
    }
};

// Exact-oracle suite, anchored on a reducer built from the presentation
// alone with free cancellation and the length-reducing rules (Dehn's
// algorithm: exact distances and an exact triviality test, independent of
// the shortlex normal form under test):
//   - every rule of the system under test satisfies lhs = rhs in the group,
//   - normal-form lengths equal the Dehn distances on every freely reduced
//     word up to the radius (and the BFS layering agrees),
//   - distinct irreducible words are distinct group elements (pairwise,
//     within abelianization buckets), so sphere sizes count elements,
//   - sphere sizes equal accepted path counts of the automaton,
//   - cones are prefix-additive and states determine extension sets,
//   - the renewal detector equals the quadratic definition.
OracleCheckReport run_oracle_checks(const Workspace& ws, const OracleCheckOptions& opts);

// Literal quadratic renewal detection on materialized positions; also used
// directly by tests.
RenewalRecord brute_force_renewals(const std::vector<NormalForm>& positions,
                                   const ConeAutomaton& a, const RenewalConfig& cfg);
std::vector<NormalForm> materialize_positions(const Trajectory& t, const DrivingMeasure& m,
                                              const RewriteSystem& rw);

// Pooled estimation over replicas: walks, renewal detection at the margin
// and at twice the margin, speed/variance/CLT, all seeds recorded.
struct EstimationResult {
    SpeedEstimate speed;
    ValueWithError v_direct;
    VarianceEstimate variance;
    SpeedEstimate speed_double_margin;
    LazyEstimate lazy;
    bool lazy_mode = false;
    CltReport clt;
    IidDiagnostics iid;
    TailDiagnostics tails;
    ExcursionStats pooled;
    std::int32_t target_state = -1;
    std::uint32_t margin = 0;
    std::uint64_t total_steps = 0;
    std::size_t replicas = 0;
    double k_rate_times_mean_tau = 0.0; // k(n) * mean(tau) / n, should be near 1
};

EstimationResult run_estimation(const Workspace& ws, const RunConfig& cfg, bool with_clt);

// Command entry points used by the CLI; they write their reports under
// cfg.out_dir and return a process exit code.
int cmd_build_automaton(const RunConfig& cfg);
int cmd_walk(const RunConfig& cfg);
int cmd_estimate(const RunConfig& cfg);
int cmd_diagnose(const RunConfig& cfg);
int cmd_probe(const RunConfig& cfg);
int cmd_oracle_check(const RunConfig& cfg);

nlohmann::json estimate_report_json(const EstimationResult& r, const RunConfig& cfg);
nlohmann::json automaton_report_json(const Workspace& ws);

} // namespace conewalk
