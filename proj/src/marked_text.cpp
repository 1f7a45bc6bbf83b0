#include "textpecker/marked_text.hpp"

#include "textpecker/error.hpp"
#include "textpecker/utf8.hpp"

namespace textpecker {

namespace {

constexpr std::string_view kOpen = "[[";
constexpr std::string_view kClose = "]]";
constexpr std::string_view kAdhesion = "[[#]]";

bool is_marker_char(char32_t c) noexcept { return c == U'[' || c == U']'; }

char32_t display(const MarkedChar& c) noexcept { return c.anomalous ? kSentinel : c.ch; }

}  // namespace

Language parse_language(std::string_view name) {
    if (name == "en") return Language::En;
    if (name == "zh") return Language::Zh;
    throw SchemaError("unknown language '" + std::string(name) + "' (expected \"en\" or \"zh\")");
}

std::string_view to_string(Language lang) noexcept { return lang == Language::En ? "en" : "zh"; }

Token Token::word(std::vector<MarkedChar> chars) {
    if (chars.empty()) throw ContractError("word token must be non-empty");
    for (const auto& c : chars) {
        if (is_marker_char(c.ch) || utf8::is_space(c.ch))
            throw ContractError("word token contains a marker or whitespace character");
    }
    if (chars.size() == 1 && chars[0].anomalous && chars[0].ch == U'#')
        throw ContractError("a lone anomalous '#' is reserved for the adhesion placeholder");
    return Token(Kind::Word, std::move(chars));
}

std::string MarkedTranscript::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (i) out.push_back(' ');
        const Token& tok = tokens_[i];
        if (tok.is_adhesion()) {
            out += kAdhesion;
            continue;
        }
        for (const auto& c : tok.chars()) {
            if (c.anomalous) {
                out += kOpen;
                utf8::append(out, c.ch);
                out += kClose;
            } else {
                utf8::append(out, c.ch);
            }
        }
    }
    return out;
}

MarkedTranscript parse_marked(std::string_view raw, Language language) {
    std::vector<Token> tokens;
    std::vector<MarkedChar> word;
    auto flush = [&] {
        if (!word.empty()) tokens.push_back(Token::word(std::move(word)));
        word.clear();
    };

    std::size_t pos = 0;
    while (pos < raw.size()) {
        const std::size_t here = pos;
        if (raw.substr(pos).starts_with(kOpen)) {
            if (word.empty() && raw.substr(pos).starts_with(kAdhesion)) {
                std::size_t after = pos + kAdhesion.size();
                std::size_t probe = after;
                if (after == raw.size() || utf8::is_space(utf8::next(raw, probe))) {
                    tokens.push_back(Token::adhesion());
                    pos = after;
                    continue;
                }
            }
            pos += kOpen.size();
            if (pos >= raw.size()) throw ParseError("unbalanced marker", here);
            const char32_t c = utf8::next(raw, pos);
            if (c == U'[') throw ParseError("nested marker", here);
            if (c == U']') throw ParseError("empty marker", here);
            if (raw.substr(pos).starts_with(kClose)) {
                word.push_back({c, true});
                pos += kClose.size();
                continue;
            }
            const std::size_t close = raw.find(kClose, pos);
            const std::size_t open = raw.find(kOpen, pos);
            if (open != std::string_view::npos && (close == std::string_view::npos || open < close))
                throw ParseError("nested marker", open);
            if (close != std::string_view::npos)
                throw ParseError("marker wraps more than one character", here);
            throw ParseError("unbalanced marker", here);
        }
        const char32_t c = utf8::next(raw, pos);
        if (is_marker_char(c)) throw ParseError("unbalanced marker bracket", here);
        if (utf8::is_space(c)) {
            flush();
        } else {
            word.push_back({c, false});
        }
    }
    flush();
    return MarkedTranscript(std::move(tokens), language);
}

AnomalyCounts anomaly_counts(const MarkedTranscript& t) noexcept {
    AnomalyCounts counts;
    for (const auto& tok : t.tokens()) {
        if (tok.is_adhesion()) {
            ++counts.anomalous;
            ++counts.total;
            continue;
        }
        counts.total += tok.chars().size();
        for (const auto& c : tok.chars()) counts.anomalous += c.anomalous ? 1 : 0;
    }
    return counts;
}

std::vector<std::u32string> target_units(std::string_view raw_plain, Language language) {
    std::vector<std::u32string> out;
    std::u32string run;
    auto flush = [&] {
        if (!run.empty()) out.push_back(std::move(run));
        run.clear();
    };
    for (char32_t c : utf8::decode(raw_plain)) {
        if (utf8::is_space(c)) {
            flush();
        } else if (language == Language::Zh && utf8::is_cjk(c)) {
            flush();
            out.push_back(std::u32string(1, c));
        } else {
            run.push_back(c);
        }
    }
    flush();
    return out;
}

std::vector<std::string> tokenize(std::string_view raw_plain, Language language) {
    std::vector<std::string> out;
    for (const auto& unit : target_units(raw_plain, language)) out.push_back(utf8::encode(unit));
    return out;
}

std::vector<std::u32string> comparison_units(const MarkedTranscript& t) {
    std::vector<std::u32string> out;
    for (const auto& tok : t.tokens()) {
        if (tok.is_adhesion()) {
            out.push_back(std::u32string(1, kSentinel));
            continue;
        }
        if (t.language() == Language::En) {
            std::u32string unit;
            for (const auto& c : tok.chars()) unit.push_back(display(c));
            out.push_back(std::move(unit));
            continue;
        }
        std::u32string run;
        for (const auto& c : tok.chars()) {
            if (utf8::is_cjk(c.ch)) {
                if (!run.empty()) out.push_back(std::move(run));
                run.clear();
                out.push_back(std::u32string(1, display(c)));
            } else {
                run.push_back(display(c));
            }
        }
        if (!run.empty()) out.push_back(std::move(run));
    }
    return out;
}

std::string strip_markers(const MarkedTranscript& t) {
    std::string out;
    for (std::size_t i = 0; i < t.tokens().size(); ++i) {
        if (i) out.push_back(' ');
        const Token& tok = t.tokens()[i];
        if (tok.is_adhesion()) {
            utf8::append(out, kSentinel);
            continue;
        }
        for (const auto& c : tok.chars()) utf8::append(out, display(c));
    }
    return out;
}

}  // namespace textpecker
