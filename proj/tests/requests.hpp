#pragma once

// Random score requests for service tests.

#include <string>

#include "json.hpp"

#include "textpecker/random.hpp"

namespace fixtures {

inline std::string random_word(textpecker::Rng& rng) {
    static constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
    std::string w;
    const auto len = rng.integer(1, 8);
    for (std::int64_t i = 0; i < len; ++i) w += kLetters[rng.index(kLetters.size())];
    return w;
}

/// English request with up to `max_tokens` words per side; the prediction is a noisy copy with
/// some characters marked anomalous or unreadable and an occasional adhesion marker.
inline nlohmann::json random_request(textpecker::Rng& rng, std::size_t max_tokens = 64) {
    const auto n = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(max_tokens)));
    std::string target, pred;
    std::size_t pred_words = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string w = random_word(rng);
        target += (i ? " " : "") + w;
        if (rng.bernoulli(0.1)) continue;  // dropped word
        if (pred_words == max_tokens) break;
        if (pred_words > 0 && pred_words + 1 < max_tokens && rng.bernoulli(0.05)) {
            pred += " [[#]]";
            ++pred_words;
        }
        if (pred_words++) pred += " ";
        for (char c : w) {
            if (rng.bernoulli(0.05)) {
                pred += "[[?]]";
            } else if (rng.bernoulli(0.1)) {
                pred += std::string("[[") + c + "]]";
            } else {
                pred += rng.bernoulli(0.05) ? 'x' : c;
            }
        }
    }
    return {{"target", target}, {"prediction", pred}, {"language", "en"}};
}

}  // namespace fixtures
