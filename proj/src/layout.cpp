#include "textpecker/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "textpecker/error.hpp"

namespace textpecker {

namespace {

// Canvas extents along the text direction (main) and across it (cross).
struct Axes {
    int main, cross;
};

Axes axes(const EngineConfig& cfg, bool vertical) {
    return vertical ? Axes{cfg.canvas_height, cfg.canvas_width} : Axes{cfg.canvas_width, cfg.canvas_height};
}

double max_sag(const EngineConfig& cfg, bool vertical) { return cfg.curve_sag_ratio.hi * axes(cfg, vertical).main; }

double half_span(const EngineConfig& cfg, bool vertical) { return axes(cfg, vertical).main / 2.0 - cfg.margin_px; }

}  // namespace

std::vector<Placement> layout_flow(std::span<const Size> elements, const EngineConfig& cfg, bool vertical, Rng& rng) {
    const auto [main, cross] = axes(cfg, vertical);
    const int m = cfg.margin_px;
    const int main_end = main - m, cross_end = cross - m;

    std::vector<Placement> out;
    out.reserve(elements.size());
    int u = m, v = m, line = 0;
    bool line_empty = true;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const int a = vertical ? elements[i].height : elements[i].width;
        const int b = vertical ? elements[i].width : elements[i].height;
        if (a > main_end - m || b > cross_end - m)
            throw PlacementError("element " + std::to_string(i) + " is larger than the canvas inside its margins");

        const int offset = rng.bernoulli(cfg.offset_prob) ? static_cast<int>(rng.integer(cfg.offset_px.lo, cfg.offset_px.hi)) : 0;
        int gap = line_empty ? 0 : static_cast<int>(rng.integer(cfg.h_spacing_px.lo, cfg.h_spacing_px.hi));
        if (!line_empty && u + gap + a > main_end) {
            v += line + static_cast<int>(rng.integer(cfg.line_spacing_px.lo, cfg.line_spacing_px.hi));
            u = m, line = 0, gap = 0;
        }
        if (v + offset + b > cross_end) throw PlacementError("elements overflow the canvas at element " + std::to_string(i));

        const int pu = u + gap, pv = v + offset;
        out.push_back(vertical ? Placement{pv, pu} : Placement{pu, pv});
        u = pu + a;
        line = std::max(line, offset + b);
        line_empty = false;
    }
    return out;
}

double QuadraticArc::offset(double u) const {
    const double t = (u - center) / half_span;
    return sag * (1.0 - t * t);
}

double QuadraticArc::slope(double u) const { return -2.0 * sag * (u - center) / (half_span * half_span); }

int curve_allowance(const CurveElement& e, const EngineConfig& cfg, bool vertical) {
    const double sag = max_sag(cfg, vertical);
    if (!(sag > 0.0)) return e.border_px;
    const double theta = std::atan(2.0 * sag / half_span(cfg, vertical));
    const double half = e.cell_px / 2.0 + e.border_px;
    return static_cast<int>(std::ceil(half * (std::cos(theta) + std::sin(theta)) - e.cell_px / 2.0)) + 1;
}

Size curve_box_size(const CurveElement& e, const EngineConfig& cfg, bool vertical) {
    if (e.glyphs < 1 || e.cell_px < 1) throw ContractError("curve element needs at least one glyph and a positive cell");
    const int a = curve_allowance(e, cfg, vertical);
    const int main = e.glyphs * e.cell_px + 2 * a;
    const int cross = e.cell_px + 2 * a + static_cast<int>(std::ceil(max_sag(cfg, vertical)));
    return vertical ? Size{cross, main} : Size{main, cross};
}

CurveLayout layout_curve(std::span<const CurveElement> elements, const EngineConfig& cfg, bool vertical, Rng& rng) {
    std::vector<Size> sizes;
    sizes.reserve(elements.size());
    for (const auto& e : elements) sizes.push_back(curve_box_size(e, cfg, vertical));
    const auto boxes = layout_flow(sizes, cfg, vertical, rng);

    CurveLayout out;
    const double main = axes(cfg, vertical).main;
    out.arc.center = main / 2.0;
    out.arc.half_span = half_span(cfg, vertical);
    out.arc.sag = rng.uniform(cfg.curve_sag_ratio.lo, cfg.curve_sag_ratio.hi) * main;
    if (rng.bernoulli(0.5)) out.arc.sag = -out.arc.sag;
    const double base = std::min(0.0, out.arc.sag);

    for (std::size_t i = 0; i < elements.size(); ++i) {
        const auto& e = elements[i];
        const int a = curve_allowance(e, cfg, vertical);
        CurvePlacement p{boxes[i], sizes[i], {}};
        const double box_u = vertical ? boxes[i].y : boxes[i].x;
        const double box_v = vertical ? boxes[i].x : boxes[i].y;
        for (int k = 0; k < e.glyphs; ++k) {
            const double u = box_u + a + (k + 0.5) * e.cell_px;
            const double v = box_v + a + e.cell_px / 2.0 + (out.arc.offset(u) - base);
            const double theta = std::atan(out.arc.slope(u)) * 180.0 / std::numbers::pi;
            p.glyphs.push_back(vertical ? GlyphPose{{v, u}, -theta} : GlyphPose{{u, v}, theta});
        }
        out.elements.push_back(std::move(p));
    }
    return out;
}

}  // namespace textpecker
