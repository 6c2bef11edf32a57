// Python bindings for the conewalk core: group/normal-form operations, the
// cone-type automaton, and the walk -> renewal -> estimate pipelines.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "conewalk/pipeline.hpp"
#include "conewalk/rng.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace conewalk;

namespace {

py::object json_to_py(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

json py_to_json(const py::object& obj) {
    return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

// One presentation with its rewriting system and classified automaton.
struct Group {
    explicit Group(const std::string& kind, int parameter)
        : presentation(kind == "surface" ? Presentation::surface(parameter)
                                         : Presentation::free_group(parameter)),
          rewrite(presentation),
          automaton(build_automaton(rewrite)) {
        if (kind != "surface" && kind != "free")
            throw std::invalid_argument("kind must be 'surface' or 'free'");
        assumption = recurrence_classify(automaton);
        mark_large(automaton);
    }

    std::string normal_form(const std::string& word) const {
        return format_word(rewrite.normal_form(parse_word(word, presentation.alphabet_size())).letters);
    }
    int distance(const std::string& word) const {
        return rewrite.normal_form(parse_word(word, presentation.alphabet_size())).length();
    }
    std::string mul(const std::string& nf, const std::string& word) const {
        const NormalForm x{parse_word(nf, presentation.alphabet_size())};
        return format_word(
            rewrite.mul(x, parse_word(word, presentation.alphabet_size())).letters);
    }
    int state_of_word(const std::string& word) const {
        return state_of(rewrite.normal_form(parse_word(word, presentation.alphabet_size())),
                        automaton);
    }
    std::vector<std::int64_t> sphere_sizes(int radius) const {
        return bfs_oracle(rewrite, radius).sphere_sizes;
    }
    std::uint64_t paths(int n) const { return count_paths(automaton, n); }

    Presentation presentation;
    RewriteSystem rewrite;
    ConeAutomaton automaton;
    bool assumption = false;
};

py::object estimate_from_config(const py::object& config, bool with_clt) {
    const RunConfig cfg = config_from_json(py_to_json(config));
    const Workspace ws = build_workspace(cfg);
    const EstimationResult r = run_estimation(ws, cfg, with_clt);
    return json_to_py(estimate_report_json(r, cfg));
}

py::object oracle_check_from_config(const py::object& config) {
    const RunConfig cfg = config_from_json(py_to_json(config));
    const Workspace ws = build_workspace(cfg);
    OracleCheckOptions opts;
    opts.radius = cfg.oracle_radius;
    opts.renewal_trajectories = cfg.oracle_renewal_trajectories;
    opts.renewal_n = cfg.oracle_renewal_n;
    opts.seed = stream_seed(cfg.seed, 0x0bac1eULL);
    const OracleCheckReport report = run_oracle_checks(ws, opts);
    return json_to_py(json{{"all_ok", report.all_ok()},
                           {"normal_form_lengths_ok", report.normal_form_lengths_ok},
                           {"words_checked", report.words_checked},
                           {"sphere_counts_ok", report.sphere_counts_ok},
                           {"sphere_sizes", report.sphere_sizes},
                           {"rules_ok", report.rules_ok},
                           {"uniqueness_ok", report.uniqueness_ok},
                           {"pairs_tested", report.pairs_tested},
                           {"cone_additivity_ok", report.cone_additivity_ok},
                           {"state_consistency_ok", report.state_consistency_ok},
                           {"renewal_oracle_ok", report.renewal_oracle_ok}});
}

py::object preset_py(const std::string& name) {
    return json_to_py(config_to_json(preset_config(name)));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Random walks on surface groups: shortlex normal forms, cone-type automata, "
              "renewal times and CLT estimators.";

    py::register_exception<AssumptionError>(m, "AssumptionFailure");
    py::register_exception<PreconditionError>(m, "PreconditionFailure");

    py::class_<Group>(m, "Group")
        .def(py::init<const std::string&, int>(), py::arg("kind"), py::arg("parameter"),
             "kind is 'surface' (parameter = genus >= 2) or 'free' (parameter = rank >= 2)")
        .def("normal_form", &Group::normal_form, py::arg("word"),
             "shortlex geodesic representative of a word like 'a1b1A1'")
        .def("distance", &Group::distance, py::arg("word"),
             "word-metric distance to the identity")
        .def("mul", &Group::mul, py::arg("normal_form"), py::arg("word"))
        .def("state_of", &Group::state_of_word, py::arg("word"))
        .def("sphere_sizes", &Group::sphere_sizes, py::arg("radius"),
             "exact Cayley-sphere sizes from breadth-first search")
        .def("count_paths", &Group::paths, py::arg("n"),
             "accepted length-n paths of the automaton (= sphere size)")
        .def_property_readonly("state_count", [](const Group& g) { return g.automaton.state_count(); })
        .def_property_readonly("recurrent_count",
                               [](const Group& g) { return g.automaton.recurrent_count(); })
        .def_property_readonly("assumption_recurrent_scc",
                               [](const Group& g) { return g.assumption; })
        .def_property_readonly("alphabet_size",
                               [](const Group& g) { return g.presentation.alphabet_size(); });

    m.def("preset", &preset_py, py::arg("name"),
          "built-in run configuration: f2-srw, genus2-srw or genus2-lazy");
    m.def("estimate", &estimate_from_config, py::arg("config"), py::arg("with_clt") = true,
          "full pipeline: walks, renewal detection, speed/variance estimators, CLT check");
    m.def("oracle_check", &oracle_check_from_config, py::arg("config"),
          "exact BFS-oracle checks for the configured group");
}
