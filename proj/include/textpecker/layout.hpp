#pragma once

// Placement of text elements on the canvas: flow layout (lines of elements, wrapping at the
// margin) and curve layout (glyphs riding a quadratic arc across the canvas).

#include <span>
#include <vector>

#include "textpecker/engine_config.hpp"
#include "textpecker/random.hpp"
#include "textpecker/stroke.hpp"

namespace textpecker {

struct Size {
    int width = 0;
    int height = 0;

    friend bool operator==(const Size&, const Size&) = default;
};

/// Top-left corner in canvas pixels.
struct Placement {
    int x = 0;
    int y = 0;

    friend bool operator==(const Placement&, const Placement&) = default;
};

/// Left to right (top to bottom when `vertical`) with gaps from h_spacing_px, wrapping at
/// canvas - margin onto a new line line_spacing_px beyond the tallest element of the
/// previous one. With offset_prob an element is pushed across the line by offset_px.
/// Throws PlacementError when an element or line does not fit.
std::vector<Placement> layout_flow(std::span<const Size> elements, const EngineConfig& cfg, bool vertical, Rng& rng);

/// y = sag * (1 - ((u - center) / half_span)^2): zero at both ends of the span, `sag` at the centre.
struct QuadraticArc {
    double sag = 0.0;
    double center = 0.0;
    double half_span = 1.0;

    double offset(double u) const;
    double slope(double u) const;
};

struct CurveElement {
    int glyphs = 0;
    int cell_px = 0;    // glyph cell edge (the font size)
    int border_px = 0;  // border drawn around each glyph
};

struct GlyphPose {
    Point center;
    double angle_deg = 0.0;  // rotation of the glyph, positive clockwise on screen
};

struct CurvePlacement {
    Placement box;
    Size size;
    std::vector<GlyphPose> glyphs;
};

struct CurveLayout {
    QuadraticArc arc;
    std::vector<CurvePlacement> elements;
};

/// Room kept around each glyph cell so tangent-aligned rotation and the border stay inside
/// the element box; equals the border width when the configured arc is flat.
int curve_allowance(const CurveElement& e, const EngineConfig& cfg, bool vertical);

/// Box reserved for a curved element before the arc is drawn.
Size curve_box_size(const CurveElement& e, const EngineConfig& cfg, bool vertical);

/// Lays the reserved boxes out with `layout_flow`, then draws the arc and bends each
/// element's glyphs onto it. With a flat configured arc the boxes equal the flow placement.
CurveLayout layout_curve(std::span<const CurveElement> elements, const EngineConfig& cfg, bool vertical, Rng& rng);

}  // namespace textpecker
