#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "textpecker/marked_text.hpp"

namespace textpecker {

/// Weights and amplification factor of the composite reward.
struct RewardConfig {
    double omega = 5.0;
    double w_semantic = 0.5;
    double w_quality = 0.5;

    /// Throws ContractError unless omega > 0, both weights lie in [0, 1] and sum to 1.
    void validate() const;

    /// Configuration used when scoring benchmark outputs (omega = 1).
    static RewardConfig evaluation() { return {1.0, 0.5, 0.5}; }
};

struct MatchedPair {
    std::size_t target = 0;
    std::size_t prediction = 0;
    double ned = 0.0;
};

struct SemanticResult {
    double score = 1.0;
    std::vector<MatchedPair> matching;
    std::size_t unmatched = 0;
};

struct ScoreReport {
    double semantic = 0.0;
    double quality = 0.0;
    double reward = 0.0;
    std::vector<MatchedPair> matching;
    std::size_t unmatched_count = 0;
    AnomalyCounts counts;
    RewardConfig config;
};

/// Word-level alignment score between marker-free target units and a marked prediction.
/// Anomalous prediction characters compare as the sentinel, so they always cost an edit.
SemanticResult semantic_score(const std::vector<std::u32string>& target, const MarkedTranscript& prediction);
SemanticResult semantic_score(const std::vector<std::string>& target, const MarkedTranscript& prediction);

/// clip(1 - omega * anomalous / total, 0, 1); 1 when total is 0.
double structural_score(std::size_t anomalous, std::size_t total, double omega);

ScoreReport composite_reward(std::string_view target_text, std::string_view prediction_raw, Language language,
                             const RewardConfig& cfg = {});

/// String-accuracy reward clip(1 - levenshtein / |target|, 0, 1). Target must be non-empty.
double ocr_baseline_reward(std::string_view target, std::string_view prediction_plain);

}  // namespace textpecker
