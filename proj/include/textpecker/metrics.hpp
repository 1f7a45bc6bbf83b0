#pragma once

// Benchmark metrics: structural anomaly perception (TSAP) and canonical text
// recognition (CTR), over line-delimited evaluation records.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "textpecker/marked_text.hpp"

namespace textpecker {

enum class Level { Image, Box };

Level parse_level(std::string_view name);  // "image" | "box", throws SchemaError
std::string_view to_string(Level level) noexcept;

inline constexpr double kDefaultDelta = 0.7;

struct EvalRecord {
    std::string id;
    Level level = Level::Image;
    Language language = Language::En;
    MarkedTranscript gt{{}, Language::En};
    MarkedTranscript pred{{}, Language::En};
};

struct TsapCounts {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0, n_records = 0;

    TsapCounts& operator+=(const TsapCounts& o) {
        tp += o.tp, fp += o.fp, fn += o.fn, tn += o.tn, n_records += o.n_records;
        return *this;
    }
    friend bool operator==(const TsapCounts&, const TsapCounts&) = default;
};

struct TsapResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    TsapCounts counts;
};

struct CtrResult {
    double recall = 0.0;
    double ned = 0.0;
};

struct MetricReport {
    TsapResult tsap;
    CtrResult ctr;
    double delta = kDefaultDelta;
    std::optional<Level> level;
};

/// delta * gt_count <= pred_count <= gt_count / delta (inclusive). gt_count must be positive.
bool tsap_match(std::size_t gt_count, std::size_t pred_count, double delta);

/// Per record, with g/p the ground-truth/predicted anomalous counts: TP when both are
/// positive and interval-matched; otherwise FP when p > 0, FN when g > 0, TN when both are 0.
TsapCounts tsap_classify(std::size_t gt_count, std::size_t pred_count, double delta);
TsapResult tsap_from_counts(const TsapCounts& counts);
TsapResult tsap_metrics(std::span<const EvalRecord> records, double delta = kDefaultDelta);

/// Per-record CTR contribution: exact-token recall under ned-cost matching and whole-string ned.
CtrResult ctr_record(const MarkedTranscript& gt, const MarkedTranscript& pred);
/// Means of `ctr_record` over the records.
CtrResult ctr_metrics(std::span<const EvalRecord> records);

MetricReport evaluate_records(std::span<const EvalRecord> records, double delta = kDefaultDelta,
                              std::optional<Level> level = std::nullopt);

/// Reads records {"id","level","language","gt","pred"}, one JSON map per line. When
/// `predictions` is given, "pred" is taken from that file instead, joined by "id" (a
/// missing id is an empty prediction); "text" is accepted in place of "gt"/"pred" so
/// label files from the synthesizer can be used directly.
std::vector<EvalRecord> load_dataset(const std::filesystem::path& path,
                                     const std::optional<std::filesystem::path>& predictions = std::nullopt);

/// Throws DatasetEmptyError when no record survives the level filter.
MetricReport evaluate_dataset(const std::filesystem::path& path, double delta = kDefaultDelta,
                              std::optional<Level> level = std::nullopt,
                              const std::optional<std::filesystem::path>& predictions = std::nullopt);

nlohmann::json to_json(const MetricReport& report);
std::string format_table(const MetricReport& report);

}  // namespace textpecker
