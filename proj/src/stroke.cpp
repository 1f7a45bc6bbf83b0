#include "textpecker/stroke.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "textpecker/error.hpp"
#include "textpecker/utf8.hpp"

namespace textpecker {

namespace {

constexpr std::size_t kCentroidSamples = 32;

std::string describe(char32_t c) {
    std::string s = "character '";
    utf8::append(s, c);
    return s + "'";
}

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Translates and clamps into the em square; drops points that collapse onto their predecessor.
Polyline translated(const Polyline& stroke, double dx, double dy, double em) {
    Polyline out;
    out.points.reserve(stroke.points.size());
    for (const auto& p : stroke.points) {
        const Point q{std::clamp(p.x + dx, 0.0, em), std::clamp(p.y + dy, 0.0, em)};
        if (out.points.empty() || !(out.points.back() == q)) out.points.push_back(q);
    }
    return out;
}

// A stroke squeezed against a corner by clamping can degenerate; keep the original then.
Polyline move_stroke(const Polyline& stroke, double dx, double dy, double em) {
    Polyline moved = translated(stroke, dx, dy, em);
    return moved.points.size() >= 2 ? moved : stroke;
}

}  // namespace

void StrokeGlyph::validate() const {
    if (!(em > 0.0)) throw SchemaError(describe(character) + ": em must be positive");
    for (std::size_t s = 0; s < strokes.size(); ++s) {
        const auto& pts = strokes[s].points;
        const std::string where = describe(character) + ": strokes[" + std::to_string(s) + "]";
        if (pts.size() < 2) throw SchemaError(where + " has fewer than 2 points");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0.0 || p.y < 0.0 || p.x > em || p.y > em)
                throw SchemaError(where + " point " + std::to_string(i) + " lies outside the em square");
            if (i > 0 && pts[i - 1] == p)
                throw SchemaError(where + " repeats point " + std::to_string(i));
        }
    }
}

double arc_length(const Polyline& stroke) {
    double total = 0.0;
    for (std::size_t i = 1; i < stroke.points.size(); ++i) total += distance(stroke.points[i - 1], stroke.points[i]);
    return total;
}

Polyline resample(const Polyline& stroke, std::size_t n) {
    if (n < 2) throw ContractError("resample: n must be at least 2");
    const auto& pts = stroke.points;
    const double total = arc_length(stroke);
    if (pts.size() < 2 || !(total > 0.0)) throw ContractError("resample: zero-length stroke");

    Polyline out;
    out.points.reserve(n);
    out.points.push_back(pts.front());
    std::size_t seg = 1;
    double seg_start = 0.0;  // arc length at pts[seg - 1]
    double seg_len = distance(pts[0], pts[1]);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
        while (seg + 1 < pts.size() && seg_start + seg_len < target) {
            seg_start += seg_len;
            ++seg;
            seg_len = distance(pts[seg - 1], pts[seg]);
        }
        const double t = seg_len > 0.0 ? std::clamp((target - seg_start) / seg_len, 0.0, 1.0) : 0.0;
        const Point& a = pts[seg - 1];
        const Point& b = pts[seg];
        out.points.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    out.points.push_back(pts.back());
    return out;
}

Point centroid(const Polyline& stroke) {
    // A closed stroke is sampled cyclically so its start point is not counted twice.
    const bool closed = stroke.points.size() > 2 && stroke.points.front() == stroke.points.back();
    Polyline s = resample(stroke, closed ? kCentroidSamples + 1 : kCentroidSamples);
    if (closed) s.points.pop_back();
    Point c;
    for (const auto& p : s.points) {
        c.x += p.x;
        c.y += p.y;
    }
    c.x /= static_cast<double>(s.points.size());
    c.y /= static_cast<double>(s.points.size());
    return c;
}

GlyphDb GlyphDb::from_glyphs(std::vector<StrokeGlyph> glyphs) {
    if (glyphs.empty()) throw SchemaError("stroke database is empty");
    GlyphDb db;
    for (auto& g : glyphs) {
        g.validate();
        const char32_t c = g.character;
        if (!db.glyphs_.emplace(c, std::move(g)).second) throw SchemaError("duplicate " + describe(c));
    }
    for (const auto& [c, g] : db.glyphs_) db.order_.push_back(c);
    return db;
}

GlyphDb GlyphDb::load(const std::filesystem::path& path) {
    using nlohmann::json;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stroke database " + path.string());

    std::vector<StrokeGlyph> glyphs;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json rec = json::parse(text, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) throw SchemaError("malformed stroke record", line);

        auto ch = rec.find("character");
        if (ch == rec.end() || !ch->is_string()) throw SchemaError("field 'character' must be a string", line);
        const auto scalars = utf8::decode(ch->get<std::string>());
        if (scalars.size() != 1) throw SchemaError("field 'character' must hold exactly one scalar value", line);

        StrokeGlyph g;
        g.character = scalars[0];
        if (auto em = rec.find("em"); em != rec.end()) {
            if (!em->is_number()) throw SchemaError(describe(g.character) + ": field 'em' must be a number", line);
            g.em = em->get<double>();
        }
        auto strokes = rec.find("strokes");
        if (strokes == rec.end() || !strokes->is_array())
            throw SchemaError(describe(g.character) + ": field 'strokes' must be an array", line);
        for (const auto& s : *strokes) {
            if (!s.is_array()) throw SchemaError(describe(g.character) + ": each stroke must be an array", line);
            Polyline poly;
            for (const auto& p : s) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                    throw SchemaError(describe(g.character) + ": stroke points must be [x, y] pairs", line);
                poly.points.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            g.strokes.push_back(std::move(poly));
        }
        if (g.strokes.empty()) throw SchemaError(describe(g.character) + ": field 'strokes' is empty", line);
        try {
            g.validate();
        } catch (const SchemaError& e) {
            throw SchemaError(e.what(), line);
        }
        glyphs.push_back(std::move(g));
    }
    return from_glyphs(std::move(glyphs));
}

const StrokeGlyph* GlyphDb::find(char32_t c) const {
    auto it = glyphs_.find(c);
    return it == glyphs_.end() ? nullptr : &it->second;
}

std::string_view to_string(EditKind kind) noexcept {
    switch (kind) {
        case EditKind::Delete: return "delete";
        case EditKind::Insert: return "insert";
        case EditKind::Swap: return "swap";
    }
    return "unknown";
}

EditResult op_delete(const StrokeGlyph& g, Rng& rng, std::size_t k) {
    const std::size_t n = g.strokes.size();
    if (k < 1 || k >= n) throw ContractError("op_delete: need 1 <= k < stroke count");
    auto removed = rng.sample_without_replacement(n, k);
    std::sort(removed.begin(), removed.end());

    EditResult r{g, {}};
    r.glyph.strokes.clear();
    for (std::size_t i = 0, next = 0; i < n; ++i) {
        if (next < removed.size() && removed[next] == i) {
            ++next;
            continue;
        }
        r.glyph.strokes.push_back(g.strokes[i]);
    }
    r.log.operations.push_back({EditKind::Delete, std::move(removed), std::nullopt});
    return r;
}

EditResult swap_strokes(const StrokeGlyph& g, std::size_t i, std::size_t j) {
    if (i == j || i >= g.strokes.size() || j >= g.strokes.size())
        throw ContractError("swap_strokes: need two distinct stroke indices");
    const Point ci = centroid(g.strokes[i]);
    const Point cj = centroid(g.strokes[j]);
    EditResult r{g, {}};
    r.glyph.strokes[i] = move_stroke(g.strokes[i], cj.x - ci.x, cj.y - ci.y, g.em);
    r.glyph.strokes[j] = move_stroke(g.strokes[j], ci.x - cj.x, ci.y - cj.y, g.em);
    r.log.operations.push_back({EditKind::Swap, {std::min(i, j), std::max(i, j)}, std::nullopt});
    return r;
}

EditResult op_swap(const StrokeGlyph& g, Rng& rng) {
    const std::size_t n = g.strokes.size();
    if (n < 2) throw ContractError("op_swap: glyph needs at least 2 strokes");
    const std::size_t i = rng.index(n);
    std::size_t j = rng.index(n - 1);
    if (j >= i) ++j;
    return swap_strokes(g, i, j);
}

EditResult op_insert(const StrokeGlyph& g, const GlyphDb& donors, Rng& rng) {
    const auto& chars = donors.characters();
    const bool self_present = donors.contains(g.character);
    const std::size_t eligible = chars.size() - (self_present ? 1 : 0);
    if (eligible == 0) throw ContractError("op_insert: no donor character other than the glyph itself");
    if (g.strokes.empty()) throw ContractError("op_insert: glyph has no strokes to anchor the insertion");

    std::size_t pick = rng.index(eligible);
    if (self_present) {
        const auto self = static_cast<std::size_t>(std::lower_bound(chars.begin(), chars.end(), g.character) - chars.begin());
        if (pick >= self) ++pick;
    }
    const StrokeGlyph& donor = *donors.find(chars[pick]);
    const std::size_t donor_stroke = rng.index(donor.strokes.size());
    const std::size_t anchor = rng.index(g.strokes.size());
    const double jitter = 0.1 * g.em;
    const double jx = rng.uniform(-jitter, jitter);
    const double jy = rng.uniform(-jitter, jitter);

    Polyline stroke = donor.strokes[donor_stroke];
    if (donor.em != g.em) {
        const double s = g.em / donor.em;
        for (auto& p : stroke.points) p = {p.x * s, p.y * s};
    }
    const Point from = centroid(stroke);
    const Point to = centroid(g.strokes[anchor]);
    stroke = move_stroke(stroke, to.x + jx - from.x, to.y + jy - from.y, g.em);

    EditResult r{g, {}};
    r.glyph.strokes.push_back(std::move(stroke));
    r.log.operations.push_back({EditKind::Insert, {r.glyph.strokes.size() - 1}, donor.character});
    return r;
}

ComposeResult compose_anomaly(const StrokeGlyph& g, const GlyphDb& donors, Rng& rng, const AnomalyProbabilities& p) {
    for (double q : {p.del, p.ins, p.swap})
        if (!(q >= 0.0 && q <= 1.0)) throw ContractError("compose_anomaly: probabilities must lie in [0, 1]");

    ComposeResult out;
    out.glyph = g;
    auto apply = [&](EditResult r) {
        out.glyph = std::move(r.glyph);
        for (auto& op : r.log.operations) out.log.operations.push_back(std::move(op));
    };

    {
        const bool draw = rng.bernoulli(p.del);
        const std::size_t n = out.glyph.strokes.size();
        out.feasible[0] = n >= 2;
        if (draw && out.feasible[0]) {
            const auto hi = std::max<std::int64_t>(1, static_cast<std::int64_t>((n + 2) / 3));
            apply(op_delete(out.glyph, rng, static_cast<std::size_t>(rng.integer(1, hi))));
        } else if (draw) {
            out.skipped.push_back(EditKind::Delete);
        }
    }
    {
        const bool draw = rng.bernoulli(p.ins);
        const std::size_t others = donors.size() - (donors.contains(out.glyph.character) ? 1 : 0);
        out.feasible[1] = others > 0 && !out.glyph.strokes.empty();
        if (draw && out.feasible[1]) {
            apply(op_insert(out.glyph, donors, rng));
        } else if (draw) {
            out.skipped.push_back(EditKind::Insert);
        }
    }
    {
        const bool draw = rng.bernoulli(p.swap);
        out.feasible[2] = out.glyph.strokes.size() >= 2;
        if (draw && out.feasible[2]) {
            apply(op_swap(out.glyph, rng));
        } else if (draw) {
            out.skipped.push_back(EditKind::Swap);
        }
    }
    out.anomalous = !out.log.empty();
    return out;
}

}  // namespace textpecker
