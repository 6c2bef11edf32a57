// conewalk: geodesic automata and renewal-time estimators for random walks
// on surface and free groups.

#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "conewalk/pipeline.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::uint32_t> n;
    std::optional<std::uint32_t> replicas;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration");
    cmd->add_option("--preset", opts.preset, "built-in preset: f2-srw, genus2-srw, genus2-lazy");
    cmd->add_option("--seed", opts.seed, "override the base seed");
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--n", opts.n, "override the number of walk steps");
    cmd->add_option("--replicas", opts.replicas, "override the replica count");
}

conewalk::RunConfig resolve_config(const CommonOpts& opts) {
    conewalk::RunConfig cfg;
    if (!opts.preset.empty() && !opts.config_path.empty())
        throw std::invalid_argument("give either --config or --preset, not both");
    if (!opts.preset.empty())
        cfg = conewalk::preset_config(opts.preset);
    else if (!opts.config_path.empty())
        cfg = conewalk::load_config(opts.config_path);
    else
        throw std::invalid_argument("one of --config or --preset is required");
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    if (opts.n) cfg.n = *opts.n;
    if (opts.replicas) cfg.replicas = *opts.replicas;
    return cfg;
}

int dispatch(const CommonOpts& opts, int (*command)(const conewalk::RunConfig&)) {
    try {
        return command(resolve_config(opts));
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return conewalk::exit_code::config;
    } catch (const conewalk::AssumptionError& e) {
        std::cerr << "assumption failure: " << e.what() << "\n";
        return conewalk::exit_code::assumption;
    } catch (const conewalk::PreconditionError& e) {
        std::cerr << "statistical precondition failure: " << e.what() << "\n";
        return conewalk::exit_code::precondition;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return conewalk::exit_code::failure;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random walks on surface groups: geodesic automata, renewal times, "
                 "speed and variance estimators"};
    app.require_subcommand(1);

    CommonOpts opts;
    int rc = conewalk::exit_code::ok;

    auto* build = app.add_subcommand("build-automaton",
                                     "build and classify the cone-type automaton");
    add_common(build, opts);
    build->callback([&] { rc = dispatch(opts, conewalk::cmd_build_automaton); });

    auto* walk = app.add_subcommand("walk", "sample one trajectory and dump it as CSV");
    add_common(walk, opts);
    walk->callback([&] { rc = dispatch(opts, conewalk::cmd_walk); });

    auto* estimate = app.add_subcommand(
        "estimate", "run walks, detect renewal times, estimate speed and variance");
    add_common(estimate, opts);
    estimate->callback([&] { rc = dispatch(opts, conewalk::cmd_estimate); });

    auto* diagnose = app.add_subcommand(
        "diagnose", "independence, tail, margin-sensitivity and normality diagnostics");
    add_common(diagnose, opts);
    diagnose->callback([&] { rc = dispatch(opts, conewalk::cmd_diagnose); });

    auto* probe = app.add_subcommand("probe",
                                     "finite-difference sensitivity of the speed in the measure");
    add_common(probe, opts);
    probe->callback([&] { rc = dispatch(opts, conewalk::cmd_probe); });

    auto* oracle = app.add_subcommand("oracle-check",
                                      "exhaustive exact checks against the BFS oracle");
    add_common(oracle, opts);
    oracle->callback([&] { rc = dispatch(opts, conewalk::cmd_oracle_check); });

    CLI11_PARSE(app, argc, argv);
    return rc;
}
