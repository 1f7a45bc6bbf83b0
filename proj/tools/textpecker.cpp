// textpecker: score, eval, synth, serve and inspect subcommands.
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "textpecker/error.hpp"
#include "textpecker/metrics.hpp"
#include "textpecker/raster.hpp"
#include "textpecker/renderer.hpp"
#include "textpecker/scoring.hpp"
#include "textpecker/service.hpp"
#include "textpecker/stroke.hpp"
#include "textpecker/utf8.hpp"

#ifndef TEXTPECKER_DATA_DIR
#define TEXTPECKER_DATA_DIR "data"
#endif

namespace tp = textpecker;
using json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::string kDefaultStrokes = std::string(TEXTPECKER_DATA_DIR) + "/strokes.jsonl";
const std::string kDefaultCorpus = std::string(TEXTPECKER_DATA_DIR) + "/corpus_zh.txt";

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string code_point(char32_t c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
    return buf;
}

// TEXTPECKER_SEED wins over --seed when set.
std::optional<std::uint64_t> effective_seed(std::optional<std::uint64_t> flag) {
    if (const char* env = std::getenv("TEXTPECKER_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used != std::string_view(env).size()) throw std::invalid_argument(env);
            return v;
        } catch (const std::exception&) {
            throw UsageError(std::string("TEXTPECKER_SEED is not an unsigned integer: ") + env);
        }
    }
    return flag;
}

tp::RewardConfig reward_config(double omega, double we, double wq) {
    tp::RewardConfig cfg{omega, we, wq};
    try {
        cfg.validate();
    } catch (const tp::ContractError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

// What a recognizer without anomaly marking would have printed: the characters, markers removed.
std::string plain_text(const tp::MarkedTranscript& t) {
    std::string out;
    for (const auto& tok : t.tokens()) {
        if (tok.is_adhesion()) continue;
        if (!out.empty() && t.language() == tp::Language::En) out += ' ';
        for (const auto& c : tok.chars()) tp::utf8::append(out, c.ch);
    }
    return out;
}

// ---- score

struct ScoreArgs {
    std::string target, pred, lang = "en", format = "text";
    double omega = 5.0, we = 0.5, wq = 0.5;
    bool baseline = false;
};

int cmd_score(const ScoreArgs& a) {
    const auto lang = tp::parse_language(a.lang);
    const auto cfg = reward_config(a.omega, a.we, a.wq);
    const auto r = tp::composite_reward(a.target, a.pred, lang, cfg);
    std::optional<double> baseline;
    if (a.baseline) {
        if (a.target.empty()) throw UsageError("--baseline needs a non-empty --target");
        baseline = tp::ocr_baseline_reward(a.target, plain_text(tp::parse_marked(a.pred, lang)));
    }
    if (a.format == "map") {
        json j{{"semantic", r.semantic},
               {"quality", r.quality},
               {"reward", r.reward},
               {"unmatched", r.unmatched_count},
               {"n_anomalous", r.counts.anomalous},
               {"n_total", r.counts.total},
               {"omega", cfg.omega},
               {"w_semantic", cfg.w_semantic},
               {"w_quality", cfg.w_quality}};
        if (baseline) j["baseline"] = *baseline;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "semantic  " << fmt4(r.semantic) << "\n"
                  << "quality   " << fmt4(r.quality) << "  (" << r.counts.anomalous << "/" << r.counts.total
                  << " anomalous)\n"
                  << "reward    " << fmt4(r.reward) << "\n";
        if (baseline) std::cout << "baseline  " << fmt4(*baseline) << "\n";
    }
    return kOk;
}

// ---- eval

struct EvalArgs {
    std::string dataset, predictions, level = "all", format = "text";
    double delta = tp::kDefaultDelta;
};

int cmd_eval(const EvalArgs& a) {
    std::optional<std::filesystem::path> predictions;
    if (!a.predictions.empty()) predictions = a.predictions;
    const auto records = tp::load_dataset(a.dataset, predictions);

    std::vector<tp::Level> levels;
    if (a.level == "all") {
        levels = {tp::Level::Image, tp::Level::Box};
    } else {
        levels = {tp::parse_level(a.level)};
    }

    json maps = json::array();
    std::size_t reported = 0;
    for (const auto level : levels) {
        std::vector<tp::EvalRecord> subset;
        for (const auto& r : records)
            if (r.level == level) subset.push_back(r);
        if (subset.empty()) {
            if (a.level != "all") std::cerr << "no records at level " << tp::to_string(level) << " in " << a.dataset << "\n";
            continue;
        }
        const auto report = tp::evaluate_records(subset, a.delta, level);
        ++reported;
        if (a.format == "map") {
            maps.push_back(json::parse(tp::to_json(report).dump()));
        } else {
            std::cout << tp::format_table(report);
        }
    }
    if (reported == 0) {
        if (a.level == "all") std::cerr << "no records in " << a.dataset << "\n";
        return kDataError;
    }
    if (a.format == "map") std::cout << maps.dump() << "\n";
    return kOk;
}

// ---- synth

struct SynthArgs {
    std::string config, out, strokes = kDefaultStrokes, corpus = kDefaultCorpus;
    std::size_t n = 0;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

int cmd_synth(const SynthArgs& a) {
    tp::EngineConfig cfg = a.config.empty() ? tp::EngineConfig{} : tp::load_engine_config(a.config);
    if (const auto seed = effective_seed(a.seed)) cfg.seed = *seed;
    const auto db = tp::GlyphDb::load(a.strokes);
    const auto corpus = tp::Corpus::load(a.corpus, db);
    const auto m = tp::synthesize_dataset(cfg, db, corpus, a.n, a.out, a.threads);
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "wrote " << m.images << " images (" << m.anomalous_images << " anomalous), " << m.boxes << " boxes ("
              << m.anomalous_boxes << " anomalous) to " << a.out << "\n"
              << "seed " << m.seed << ", labels sha256 " << m.labels_sha256 << "\n";
    return kOk;
}

// ---- serve

struct ServeArgs {
    std::string host = "127.0.0.1";
    int port = 8080;
    double omega = 5.0, we = 0.5, wq = 0.5;
    std::size_t batch_limit = tp::kDefaultBatchLimit;
};

int cmd_serve(const ServeArgs& a) {
    tp::ServiceConfig sc{reward_config(a.omega, a.we, a.wq), a.batch_limit};
    if (sc.batch_limit == 0) throw UsageError("--batch-limit must be at least 1");
    tp::HttpServer server{tp::RewardService(sc)};

    // Signals are taken by a dedicated thread so stopping happens outside a handler.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    const int port = server.bind(a.host, a.port);
    std::cout << "listening on " << a.host << ":" << port << std::endl;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    // Wakes the waiter when the server ended on its own.
    auto release = [&] {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    };
    try {
        server.listen();
    } catch (...) {
        release();
        throw;
    }
    release();
    return kOk;
}

// ---- inspect

struct InspectArgs {
    std::string glyph, strokes = kDefaultStrokes, op = "compose", out = ".", format = "text";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    int size = 256;
};

void write_glyph_png(const tp::StrokeGlyph& g, int size, const std::filesystem::path& path) {
    const auto raster = tp::rasterize_glyph(g, size, 0.08 * size);
    tp::Image img(size, size);
    tp::fill_gradient(img, {255, 255, 255}, {255, 255, 255}, 0.0);
    tp::composite(img, tp::make_layer(raster.mask), 0, 0, {0, 0, 0}, {0, 0, 0});
    tp::write_file(path, tp::encode_png(img));
}

int cmd_inspect(const InspectArgs& a) {
    const auto chars = tp::utf8::decode(a.glyph);
    if (chars.size() != 1) throw UsageError("--glyph must be exactly one character");
    const auto db = tp::GlyphDb::load(a.strokes);
    const tp::StrokeGlyph* g = db.find(chars[0]);
    if (!g) throw tp::SchemaError("character " + a.glyph + " (" + code_point(chars[0]) + ") is not in " + a.strokes);

    tp::Rng rng(effective_seed(a.seed).value_or(0));
    const std::size_t n = g->strokes.size();
    tp::StrokeGlyph after;
    tp::EditLog log;
    try {
        if (a.op == "delete") {
            const std::size_t hi = std::max<std::size_t>(1, (n + 2) / 3);
            const std::size_t k = a.k.value_or(static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(hi))));
            auto r = tp::op_delete(*g, rng, k);
            after = std::move(r.glyph), log = std::move(r.log);
        } else if (a.op == "insert") {
            auto r = tp::op_insert(*g, db, rng);
            after = std::move(r.glyph), log = std::move(r.log);
        } else if (a.op == "swap") {
            auto r = tp::op_swap(*g, rng);
            after = std::move(r.glyph), log = std::move(r.log);
        } else {
            auto r = tp::compose_anomaly(*g, db, rng, {});
            after = std::move(r.glyph), log = std::move(r.log);
        }
    } catch (const tp::ContractError& e) {
        // The operator cannot run on this glyph: a property of the data, not of the flags.
        throw tp::SchemaError(std::string(e.what()) + " (" + a.glyph + " has " + std::to_string(n) + " strokes)");
    }

    namespace fs = std::filesystem;
    const std::string stem = code_point(chars[0]);
    const fs::path before_png = fs::path(a.out) / (stem + "_before.png");
    const fs::path after_png = fs::path(a.out) / (stem + "_after.png");
    write_glyph_png(*g, a.size, before_png);
    write_glyph_png(after, a.size, after_png);

    if (a.format == "map") {
        json ops = json::array();
        for (const auto& op : log.operations) {
            json o{{"kind", tp::to_string(op.kind)}, {"strokes", op.strokes}};
            if (op.donor) {
                std::string d;
                tp::utf8::append(d, *op.donor);
                o["donor"] = d;
            }
            ops.push_back(std::move(o));
        }
        std::cout << json{{"character", a.glyph},
                          {"strokes_before", n},
                          {"strokes_after", after.strokes.size()},
                          {"operations", ops},
                          {"before", before_png.string()},
                          {"after", after_png.string()}}
                         .dump()
                  << "\n";
        return kOk;
    }
    std::cout << a.glyph << " (" << stem << "): " << n << " strokes -> " << after.strokes.size() << " strokes\n";
    if (log.empty()) std::cout << "no edits\n";
    for (const auto& op : log.operations) {
        std::cout << tp::to_string(op.kind) << " strokes";
        for (std::size_t i = 0; i < op.strokes.size(); ++i) std::cout << (i ? "," : " ") << op.strokes[i];
        if (op.donor) {
            std::string d;
            tp::utf8::append(d, *op.donor);
            std::cout << " from " << d;
        }
        std::cout << "\n";
    }
    std::cout << "wrote " << before_png.string() << " and " << after_png.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural anomaly scoring, evaluation and synthesis for text images"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tp::kVersion));

    ScoreArgs score;
    auto* s = app.add_subcommand("score", "Composite reward of one marked prediction");
    s->add_option("--target", score.target, "Ground-truth text, no markers")->required();
    s->add_option("--pred", score.pred, "Prediction with inline markers")->required();
    s->add_option("--lang", score.lang, "en or zh")->check(CLI::IsMember({"en", "zh"}))->capture_default_str();
    s->add_option("--omega", score.omega, "Anomaly amplification")->check(CLI::PositiveNumber)->capture_default_str();
    s->add_option("--we", score.we, "Semantic weight")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    s->add_option("--wq", score.wq, "Quality weight")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    s->add_flag("--baseline", score.baseline, "Also print the string-accuracy reward");
    s->add_option("--format", score.format)->check(CLI::IsMember({"text", "map"}))->capture_default_str();

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "TSAP and CTR over an evaluation file");
    e->add_option("--dataset", eval.dataset, "JSON-lines records")->required();
    e->add_option("--predictions", eval.predictions, "Separate predictions file joined by id");
    e->add_option("--delta", eval.delta, "TSAP tolerance")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    e->add_option("--level", eval.level)->check(CLI::IsMember({"image", "box", "all"}))->capture_default_str();
    e->add_option("--format", eval.format)->check(CLI::IsMember({"text", "map"}))->capture_default_str();

    SynthArgs synth;
    auto* y = app.add_subcommand("synth", "Synthesize a labeled dataset");
    y->add_option("--config", synth.config, "Engine config map (JSON)")->check(CLI::ExistingFile);
    y->add_option("--n", synth.n, "Number of samples")->required();
    y->add_option("--out", synth.out, "Output directory")->required();
    y->add_option("--seed", synth.seed, "Base seed (TEXTPECKER_SEED overrides)");
    y->add_option("--strokes", synth.strokes)->capture_default_str();
    y->add_option("--corpus", synth.corpus)->capture_default_str();
    y->add_option("--threads", synth.threads)->check(CLI::Range(1u, 256u))->capture_default_str();

    ServeArgs serve;
    auto* v = app.add_subcommand("serve", "Run the reward service");
    v->add_option("--host", serve.host)->capture_default_str();
    v->add_option("--port", serve.port, "0 picks a free port")->check(CLI::Range(0, 65535))->capture_default_str();
    v->add_option("--omega", serve.omega)->check(CLI::PositiveNumber)->capture_default_str();
    v->add_option("--we", serve.we)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    v->add_option("--wq", serve.wq)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    v->add_option("--batch-limit", serve.batch_limit)->check(CLI::PositiveNumber)->capture_default_str();

    InspectArgs inspect;
    auto* i = app.add_subcommand("inspect", "Apply an edit operator to one glyph and render both versions");
    i->add_option("--glyph", inspect.glyph, "Character")->required();
    i->add_option("--strokes", inspect.strokes)->capture_default_str();
    i->add_option("--op", inspect.op)->check(CLI::IsMember({"delete", "insert", "swap", "compose"}))->capture_default_str();
    i->add_option("--k", inspect.k, "Strokes to delete");
    i->add_option("--seed", inspect.seed);
    i->add_option("--out", inspect.out, "Directory for the PNGs")->capture_default_str();
    i->add_option("--size", inspect.size, "Bitmap size in pixels")->check(CLI::Range(8, 4096))->capture_default_str();
    i->add_option("--format", inspect.format)->check(CLI::IsMember({"text", "map"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*s) return cmd_score(score);
        if (*e) return cmd_eval(eval);
        if (*y) return cmd_synth(synth);
        if (*v) return cmd_serve(serve);
        if (*i) return cmd_inspect(inspect);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kUsageError;
    } catch (const tp::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kDataError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kDataError;
    }
    return kUsageError;
}
