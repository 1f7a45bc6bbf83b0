#include "textpecker/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "textpecker/edit_distance.hpp"
#include "textpecker/error.hpp"
#include "textpecker/hungarian.hpp"
#include "textpecker/utf8.hpp"

namespace textpecker {

namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        const u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Sum of edit-distance ratios kept as a reduced fraction, so that the score depends only
// on the multiset value of the matching and not on summation order.
class RatioSum {
public:
    void add(std::size_t distance, std::size_t length) {
        terms_.push_back(static_cast<double>(distance) / static_cast<double>(length));
        if (!exact_ || distance == 0) return;
        const u128 d = distance, l = length;
        const u128 g = gcd128(den_, l);
        const u128 scale = l / g;
        constexpr u128 kLimit = u128(1) << 100;
        if (den_ > kLimit / scale || num_ > kLimit / scale) {
            exact_ = false;
            return;
        }
        num_ = num_ * scale + d * (den_ / g);
        den_ *= scale;
        const u128 r = gcd128(num_, den_);
        num_ /= r;
        den_ /= r;
    }

    /// clip(1 - (sum + penalty) / longest, 0, 1)
    double score(std::size_t penalty, std::size_t longest) {
        if (exact_) {
            const u128 whole = den_ * u128(longest);
            const u128 lost = num_ + den_ * u128(penalty);
            if (lost >= whole) return 0.0;
            return static_cast<double>(static_cast<long double>(whole - lost) / static_cast<long double>(whole));
        }
        std::sort(terms_.begin(), terms_.end());
        double sum = 0.0;
        for (double t : terms_) sum += t;
        return std::clamp(1.0 - (sum + static_cast<double>(penalty)) / static_cast<double>(longest), 0.0, 1.0);
    }

private:
    u128 num_ = 0;
    u128 den_ = 1;
    bool exact_ = true;
    std::vector<double> terms_;
};

}  // namespace

void RewardConfig::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ContractError("omega must be a positive finite number");
    if (!(w_semantic >= 0.0 && w_semantic <= 1.0)) throw ContractError("w_semantic must lie in [0, 1]");
    if (!(w_quality >= 0.0 && w_quality <= 1.0)) throw ContractError("w_quality must lie in [0, 1]");
    if (std::abs(w_semantic + w_quality - 1.0) > 1e-12) throw ContractError("w_semantic + w_quality must equal 1");
}

SemanticResult semantic_score(const std::vector<std::u32string>& target, const MarkedTranscript& prediction) {
    const auto pred = comparison_units(prediction);
    SemanticResult result;
    const std::size_t longest = std::max(target.size(), pred.size());
    if (longest == 0) return result;

    CostMatrix costs(target.size(), pred.size());
    std::vector<std::size_t> distance(target.size() * pred.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        for (std::size_t j = 0; j < pred.size(); ++j) {
            const std::size_t d = levenshtein(target[i], pred[j]);
            const std::size_t len = std::max(target[i].size(), pred[j].size());
            distance[i * pred.size() + j] = d;
            costs(i, j) = len ? static_cast<double>(d) / static_cast<double>(len) : 0.0;
        }
    }

    RatioSum matched;
    for (const auto& [i, j] : hungarian_match(costs)) {
        result.matching.push_back({i, j, costs(i, j)});
        const std::size_t len = std::max(target[i].size(), pred[j].size());
        if (len > 0) matched.add(distance[i * pred.size() + j], len);
    }
    result.unmatched = target.size() + pred.size() - 2 * result.matching.size();
    result.score = matched.score(result.unmatched, longest);
    return result;
}

SemanticResult semantic_score(const std::vector<std::string>& target, const MarkedTranscript& prediction) {
    std::vector<std::u32string> units;
    units.reserve(target.size());
    for (const auto& t : target) units.push_back(utf8::decode(t));
    return semantic_score(units, prediction);
}

double structural_score(std::size_t anomalous, std::size_t total, double omega) {
    if (anomalous > total) throw ContractError("structural_score: anomalous count exceeds total count");
    if (total == 0) return 1.0;
    return std::clamp(1.0 - omega * static_cast<double>(anomalous) / static_cast<double>(total), 0.0, 1.0);
}

ScoreReport composite_reward(std::string_view target_text, std::string_view prediction_raw, Language language,
                             const RewardConfig& cfg) {
    cfg.validate();
    const MarkedTranscript prediction = parse_marked(prediction_raw, language);
    SemanticResult sem = semantic_score(target_units(target_text, language), prediction);

    ScoreReport report;
    report.counts = anomaly_counts(prediction);
    report.semantic = sem.score;
    report.quality = structural_score(report.counts.anomalous, report.counts.total, cfg.omega);
    report.reward = cfg.w_semantic * report.semantic + cfg.w_quality * report.quality;
    report.matching = std::move(sem.matching);
    report.unmatched_count = sem.unmatched;
    report.config = cfg;
    return report;
}

double ocr_baseline_reward(std::string_view target, std::string_view prediction_plain) {
    const auto t = utf8::decode(target);
    if (t.empty()) throw ContractError("ocr_baseline_reward: target must be non-empty");
    const auto errors = levenshtein(t, utf8::decode(prediction_plain));
    return std::clamp(1.0 - static_cast<double>(errors) / static_cast<double>(t.size()), 0.0, 1.0);
}

}  // namespace textpecker
