#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"

#include "textpecker/edit_distance.hpp"
#include "textpecker/error.hpp"
#include "textpecker/marked_text.hpp"
#include "textpecker/metrics.hpp"
#include "textpecker/renderer.hpp"
#include "textpecker/scoring.hpp"
#include "textpecker/service.hpp"
#include "textpecker/utf8.hpp"

namespace py = pybind11;
namespace tp = textpecker;

namespace {

// JSON values cross the boundary through the standard json module.
template <typename Json>
py::object to_py(const Json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::handle& obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::dict report_dict(const tp::ScoreReport& r) {
    py::list matching;
    for (const auto& m : r.matching) matching.append(py::make_tuple(m.target, m.prediction, m.ned));
    py::dict d;
    d["semantic"] = r.semantic;
    d["quality"] = r.quality;
    d["reward"] = r.reward;
    d["unmatched"] = r.unmatched_count;
    d["n_anomalous"] = r.counts.anomalous;
    d["n_total"] = r.counts.total;
    d["matching"] = matching;
    return d;
}

std::optional<tp::Level> level_arg(const std::optional<std::string>& level) {
    if (!level) return std::nullopt;
    return tp::parse_level(*level);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Anomaly-aware text scoring, benchmark metrics and dataset synthesis";
    m.attr("__version__") = std::string(tp::kVersion);

    auto& error = py::register_exception<tp::Error>(m, "Error");
    static PyObject* parse_type = py::register_exception<tp::ParseError>(m, "ParseError", error.ptr()).ptr();
    static PyObject* schema_type = py::register_exception<tp::SchemaError>(m, "SchemaError", error.ptr()).ptr();
    py::register_exception<tp::ContractError>(m, "ContractError", error.ptr());
    py::register_exception<tp::DatasetEmptyError>(m, "DatasetEmptyError", error.ptr());
    py::register_exception<tp::PlacementError>(m, "PlacementError", error.ptr());
    py::register_exception<tp::IoError>(m, "IoError", error.ptr());
    // Registered last so it runs first: attaches the byte offset and line number.
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const tp::ParseError& e) {
            py::object inst = py::reinterpret_borrow<py::object>(parse_type)(e.what());
            inst.attr("offset") = e.offset();
            PyErr_SetObject(parse_type, inst.ptr());
        } catch (const tp::SchemaError& e) {
            py::object inst = py::reinterpret_borrow<py::object>(schema_type)(e.what());
            inst.attr("line") = e.line();
            PyErr_SetObject(schema_type, inst.ptr());
        }
    });

    m.def("structural_score", &tp::structural_score, py::arg("anomalous"), py::arg("total"), py::arg("omega") = 5.0);

    m.def(
        "composite_reward",
        [](const std::string& target, const std::string& prediction, const std::string& language, double omega,
           double w_semantic, double w_quality) {
            return report_dict(tp::composite_reward(target, prediction, tp::parse_language(language), {omega, w_semantic, w_quality}));
        },
        py::arg("target"), py::arg("prediction"), py::arg("language") = "en", py::arg("omega") = 5.0,
        py::arg("w_semantic") = 0.5, py::arg("w_quality") = 0.5);

    m.def("ocr_baseline_reward", &tp::ocr_baseline_reward, py::arg("target"), py::arg("prediction"));

    m.def("ned", py::overload_cast<std::string_view, std::string_view>(&tp::ned), py::arg("a"), py::arg("b"));
    m.def(
        "levenshtein",
        [](const std::string& a, const std::string& b) { return tp::levenshtein(tp::utf8::decode(a), tp::utf8::decode(b)); },
        py::arg("a"), py::arg("b"));

    m.def(
        "anomaly_counts",
        [](const std::string& raw, const std::string& language) {
            const auto c = tp::anomaly_counts(tp::parse_marked(raw, tp::parse_language(language)));
            return py::make_tuple(c.anomalous, c.total);
        },
        py::arg("marked"), py::arg("language") = "en", "(anomalous, total) characters of a marked transcript");

    m.def(
        "normalize_marked",
        [](const std::string& raw, const std::string& language) {
            return tp::parse_marked(raw, tp::parse_language(language)).serialize();
        },
        py::arg("marked"), py::arg("language") = "en", "Canonical inline form of a marked transcript");

    m.def("tsap_match", &tp::tsap_match, py::arg("gt_count"), py::arg("pred_count"), py::arg("delta") = tp::kDefaultDelta);

    m.def(
        "evaluate_dataset",
        [](const std::filesystem::path& path, double delta, std::optional<std::string> level,
           std::optional<std::filesystem::path> predictions) {
            return to_py(tp::to_json(tp::evaluate_dataset(path, delta, level_arg(level), predictions)));
        },
        py::arg("path"), py::arg("delta") = tp::kDefaultDelta, py::arg("level") = py::none(),
        py::arg("predictions") = py::none());

    m.def(
        "default_engine_config", [] { return to_py(tp::to_json(tp::EngineConfig{})); },
        "Engine configuration defaults as a dict");

    m.def(
        "synthesize_dataset",
        [](const std::filesystem::path& out, std::size_t n, const std::filesystem::path& strokes,
           const std::filesystem::path& corpus, std::optional<std::uint64_t> seed, py::object config, unsigned threads) {
            tp::EngineConfig cfg = config.is_none() ? tp::EngineConfig{} : tp::engine_config_from_json(from_py(config));
            if (seed) cfg.seed = *seed;
            const auto db = tp::GlyphDb::load(strokes);
            const auto text = tp::Corpus::load(corpus, db);
            tp::Manifest manifest;
            {
                py::gil_scoped_release release;
                manifest = tp::synthesize_dataset(cfg, db, text, n, out, threads);
            }
            return to_py(manifest.to_json());
        },
        py::arg("out"), py::arg("n"), py::arg("strokes"), py::arg("corpus"), py::arg("seed") = py::none(),
        py::arg("config") = py::none(), py::arg("threads") = 1);

    py::class_<tp::RewardService>(m, "RewardService")
        .def(py::init([](double omega, double w_semantic, double w_quality, std::size_t batch_limit) {
                 return tp::RewardService({{omega, w_semantic, w_quality}, batch_limit});
             }),
             py::arg("omega") = 5.0, py::arg("w_semantic") = 0.5, py::arg("w_quality") = 0.5,
             py::arg("batch_limit") = tp::kDefaultBatchLimit)
        .def(
            "score",
            [](const tp::RewardService& s, py::object request) {
                const auto r = s.handle_score(from_py(request));
                return py::make_tuple(r.status, to_py(r.body));
            },
            py::arg("request"), "(status, body) for one score request")
        .def(
            "batch",
            [](const tp::RewardService& s, py::object request) {
                const auto r = s.handle_batch(from_py(request));
                return py::make_tuple(r.status, to_py(r.body));
            },
            py::arg("request"), "(status, body) for {\"requests\": [...]}")
        .def("health", [](const tp::RewardService& s) { return to_py(s.handle_health()); });
}
