#include "textpecker/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"

#include "textpecker/edit_distance.hpp"
#include "textpecker/error.hpp"
#include "textpecker/hungarian.hpp"

namespace textpecker {

using nlohmann::json;

Level parse_level(std::string_view name) {
    if (name == "image") return Level::Image;
    if (name == "box") return Level::Box;
    throw SchemaError("unknown level '" + std::string(name) + "' (expected \"image\" or \"box\")");
}

std::string_view to_string(Level level) noexcept { return level == Level::Image ? "image" : "box"; }

bool tsap_match(std::size_t gt_count, std::size_t pred_count, double delta) {
    if (gt_count == 0) throw ContractError("tsap_match: ground-truth anomalous count must be positive");
    if (!(delta > 0.0 && delta <= 1.0)) throw ContractError("tsap_match: delta must lie in (0, 1]");
    const double g = static_cast<double>(gt_count);
    const double p = static_cast<double>(pred_count);
    return delta * g <= p && p <= g / delta;
}

TsapCounts tsap_classify(std::size_t gt_count, std::size_t pred_count, double delta) {
    TsapCounts c;
    c.n_records = 1;
    if (gt_count > 0 && pred_count > 0 && tsap_match(gt_count, pred_count, delta)) {
        c.tp = 1;
        return c;
    }
    if (pred_count > 0) c.fp = 1;
    if (gt_count > 0) c.fn = 1;
    if (gt_count == 0 && pred_count == 0) c.tn = 1;
    return c;
}

TsapResult tsap_from_counts(const TsapCounts& counts) {
    TsapResult r;
    r.counts = counts;
    const double tp = static_cast<double>(counts.tp);
    if (counts.tp + counts.fp > 0) r.precision = tp / static_cast<double>(counts.tp + counts.fp);
    if (counts.tp + counts.fn > 0) r.recall = tp / static_cast<double>(counts.tp + counts.fn);
    if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

TsapResult tsap_metrics(std::span<const EvalRecord> records, double delta) {
    TsapCounts total;
    for (const auto& rec : records)
        total += tsap_classify(anomaly_counts(rec.gt).anomalous, anomaly_counts(rec.pred).anomalous, delta);
    return tsap_from_counts(total);
}

CtrResult ctr_record(const MarkedTranscript& gt, const MarkedTranscript& pred) {
    const auto gt_units = comparison_units(gt);
    const auto pred_units = comparison_units(pred);
    if (gt_units.empty()) return {1.0, pred_units.empty() ? 0.0 : 1.0};

    CostMatrix costs(gt_units.size(), pred_units.size());
    for (std::size_t i = 0; i < gt_units.size(); ++i)
        for (std::size_t j = 0; j < pred_units.size(); ++j) costs(i, j) = ned(gt_units[i], pred_units[j]);
    std::size_t exact = 0;
    for (const auto& [i, j] : hungarian_match(costs)) exact += costs(i, j) == 0.0 ? 1 : 0;

    CtrResult r;
    r.recall = static_cast<double>(exact) / static_cast<double>(gt_units.size());
    r.ned = ned(strip_markers(gt), strip_markers(pred));
    return r;
}

CtrResult ctr_metrics(std::span<const EvalRecord> records) {
    CtrResult mean;
    if (records.empty()) return mean;
    for (const auto& rec : records) {
        const CtrResult r = ctr_record(rec.gt, rec.pred);
        mean.recall += r.recall;
        mean.ned += r.ned;
    }
    mean.recall /= static_cast<double>(records.size());
    mean.ned /= static_cast<double>(records.size());
    return mean;
}

MetricReport evaluate_records(std::span<const EvalRecord> records, double delta, std::optional<Level> level) {
    std::vector<EvalRecord> filtered;
    std::span<const EvalRecord> view = records;
    if (level) {
        for (const auto& r : records)
            if (r.level == *level) filtered.push_back(r);
        view = filtered;
    }
    if (view.empty()) {
        throw DatasetEmptyError(level ? "no records at level '" + std::string(to_string(*level)) + "'"
                                      : std::string("dataset has no records"));
    }
    MetricReport report;
    report.delta = delta;
    report.level = level;
    report.tsap = tsap_metrics(view, delta);
    report.ctr = ctr_metrics(view);
    return report;
}

namespace {

const std::string& require_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'", line);
    if (!it->is_string()) throw SchemaError(std::string("field '") + key + "' must be a string", line);
    return it->get_ref<const std::string&>();
}

const std::string* optional_string(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    if (!it->is_string()) throw SchemaError(std::string("field '") + key + "' must be a string", line);
    return &it->get_ref<const std::string&>();
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj = json::parse(text, nullptr, false);
        if (obj.is_discarded()) throw SchemaError("malformed JSON record", line_no);
        if (!obj.is_object()) throw SchemaError("record must be a JSON object", line_no);
        fn(obj, line_no);
    }
}

MarkedTranscript parse_field(const std::string& raw, Language lang, const char* key, std::size_t line) {
    try {
        return parse_marked(raw, lang);
    } catch (const ParseError& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what(), line);
    }
}

}  // namespace

std::vector<EvalRecord> load_dataset(const std::filesystem::path& path,
                                     const std::optional<std::filesystem::path>& predictions) {
    std::map<std::string, std::string> joined;
    if (predictions) {
        for_each_json_line(*predictions, [&](const json& obj, std::size_t line) {
            const std::string& id = require_string(obj, "id", line);
            const std::string* pred = optional_string(obj, "pred", line);
            if (!pred) pred = &require_string(obj, "text", line);
            if (!joined.emplace(id, *pred).second)
                throw SchemaError("duplicate prediction id '" + id + "'", line);
        });
    }

    std::vector<EvalRecord> records;
    std::set<std::string> ids;
    for_each_json_line(path, [&](const json& obj, std::size_t line) {
        EvalRecord rec;
        rec.id = require_string(obj, "id", line);
        if (!ids.insert(rec.id).second) throw SchemaError("duplicate id '" + rec.id + "'", line);
        try {
            rec.level = parse_level(require_string(obj, "level", line));
            rec.language = parse_language(require_string(obj, "language", line));
        } catch (const SchemaError& e) {
            if (e.line()) throw;
            throw SchemaError(e.what(), line);
        }
        const std::string* gt = optional_string(obj, "gt", line);
        if (!gt) gt = &require_string(obj, "text", line);
        rec.gt = parse_field(*gt, rec.language, "gt", line);
        if (predictions) {
            auto it = joined.find(rec.id);
            rec.pred = parse_field(it == joined.end() ? std::string() : it->second, rec.language, "pred", line);
        } else {
            rec.pred = parse_field(require_string(obj, "pred", line), rec.language, "pred", line);
        }
        records.push_back(std::move(rec));
    });
    return records;
}

MetricReport evaluate_dataset(const std::filesystem::path& path, double delta, std::optional<Level> level,
                              const std::optional<std::filesystem::path>& predictions) {
    const auto records = load_dataset(path, predictions);
    if (records.empty()) throw DatasetEmptyError("dataset " + path.string() + " has no records");
    return evaluate_records(records, delta, level);
}

json to_json(const MetricReport& report) {
    const auto& c = report.tsap.counts;
    return json{
        {"delta", report.delta},
        {"level", report.level ? json(std::string(to_string(*report.level))) : json(nullptr)},
        {"tsap", {{"precision", report.tsap.precision}, {"recall", report.tsap.recall}, {"f1", report.tsap.f1}}},
        {"ctr", {{"recall", report.ctr.recall}, {"ned", report.ctr.ned}}},
        {"counts", {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}, {"n_records", c.n_records}}},
    };
}

std::string format_table(const MetricReport& report) {
    const auto& t = report.tsap;
    const std::string level = report.level ? std::string(to_string(*report.level)) : "all";
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "level   records  | TSAP P   R       F1      | CTR R   NED     | delta\n"
                  "%-7s %-8zu | %.4f  %.4f  %.4f  | %.4f  %.4f  | %.2f\n",
                  level.c_str(), t.counts.n_records, t.precision, t.recall, t.f1, report.ctr.recall,
                  report.ctr.ned, report.delta);
    return buf;
}

}  // namespace textpecker
