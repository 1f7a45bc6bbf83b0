#pragma once

// Anomaly-marked transcripts.
//
// Inline grammar (tokens are separated by Unicode whitespace):
//   plain character        c
//   anomalous character    [[c]]      ([[?]] for an unreadable one)
//   adhesion word          [[#]]      only as a whole token
// The characters '[' and ']' never appear as content.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace textpecker {

enum class Language { En, Zh };

Language parse_language(std::string_view name);  // "en" | "zh", throws SchemaError
std::string_view to_string(Language lang) noexcept;

/// Replacement for anomalous characters when comparing text; never present in targets.
inline constexpr char32_t kSentinel = U'\uFFFD';

struct MarkedChar {
    char32_t ch = 0;
    bool anomalous = false;

    friend bool operator==(const MarkedChar&, const MarkedChar&) = default;
};

class Token {
public:
    enum class Kind { Word, Adhesion };

    static Token word(std::vector<MarkedChar> chars);  // throws ContractError if invalid
    static Token adhesion() { return Token(Kind::Adhesion, {}); }

    Kind kind() const noexcept { return kind_; }
    bool is_adhesion() const noexcept { return kind_ == Kind::Adhesion; }
    const std::vector<MarkedChar>& chars() const noexcept { return chars_; }

    friend bool operator==(const Token&, const Token&) = default;

private:
    Token(Kind kind, std::vector<MarkedChar> chars) : kind_(kind), chars_(std::move(chars)) {}

    Kind kind_;
    std::vector<MarkedChar> chars_;
};

struct AnomalyCounts {
    std::size_t anomalous = 0;  // N_a
    std::size_t total = 0;      // N_P

    friend bool operator==(const AnomalyCounts&, const AnomalyCounts&) = default;
};

class MarkedTranscript {
public:
    MarkedTranscript(std::vector<Token> tokens, Language language)
        : tokens_(std::move(tokens)), language_(language) {}

    const std::vector<Token>& tokens() const noexcept { return tokens_; }
    Language language() const noexcept { return language_; }
    bool empty() const noexcept { return tokens_.empty(); }

    /// Canonical inline form: tokens joined by a single space.
    std::string serialize() const;

    friend bool operator==(const MarkedTranscript&, const MarkedTranscript&) = default;

private:
    std::vector<Token> tokens_;
    Language language_;
};

/// Throws ParseError (with byte offset) on unbalanced, nested, empty or multi-character markers.
MarkedTranscript parse_marked(std::string_view raw, Language language);

AnomalyCounts anomaly_counts(const MarkedTranscript& t) noexcept;

/// Marker-free target tokenization. EN: whitespace split. ZH: every CJK ideograph is its
/// own token; other characters group into runs bounded by whitespace and ideographs.
std::vector<std::string> tokenize(std::string_view raw_plain, Language language);

/// Plain text with anomalous characters and adhesion tokens replaced by the sentinel.
std::string strip_markers(const MarkedTranscript& t);

/// Comparison units of a transcript: tokens re-split with the `tokenize` rule of its language
/// and with anomalous characters replaced by the sentinel. An anomalous ideograph stays a
/// unit of its own; an adhesion token is a single sentinel unit.
std::vector<std::u32string> comparison_units(const MarkedTranscript& t);

/// `tokenize` output decoded to scalar values.
std::vector<std::u32string> target_units(std::string_view raw_plain, Language language);

}  // namespace textpecker
