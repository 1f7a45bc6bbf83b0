#pragma once

// Programmatic stroke glyphs for tests that must not depend on data files.

#include <string>
#include <vector>

#include "textpecker/stroke.hpp"

namespace fixtures {

/// `n` strokes: alternating horizontal and vertical bars with a bend, spread over the em square.
inline textpecker::StrokeGlyph bars(char32_t c, std::size_t n, double em = textpecker::kDefaultEm) {
    textpecker::StrokeGlyph g;
    g.character = c;
    g.em = em;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 1.0) / (static_cast<double>(n) + 1.0);
        textpecker::Polyline s;
        if (i % 2 == 0) {
            s.points = {{0.15 * em, t * em}, {0.55 * em, t * em}, {0.85 * em, t * em + 0.04 * em}};
        } else {
            s.points = {{t * em, 0.12 * em}, {t * em, 0.5 * em}, {t * em - 0.05 * em, 0.88 * em}};
        }
        g.strokes.push_back(std::move(s));
    }
    return g;
}

/// Small database of `count` bar glyphs starting at U+4E00 with 1..9 strokes.
inline textpecker::GlyphDb bar_db(std::size_t count = 12) {
    std::vector<textpecker::StrokeGlyph> glyphs;
    for (std::size_t i = 0; i < count; ++i) glyphs.push_back(bars(static_cast<char32_t>(0x4E00 + i), 1 + i % 9));
    return textpecker::GlyphDb::from_glyphs(std::move(glyphs));
}

}  // namespace fixtures
