#pragma once

// Coverage masks, RGB canvases and the pixel-level pieces of the renderer: glyph
// rasterization, border dilation, compositing and PNG encoding.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textpecker/stroke.hpp"

namespace textpecker {

/// Single-channel coverage in [0, 1], row-major. Pixel (x, y) covers [x, x+1) x [y, y+1).
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Mask() = default;
    Mask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0f) {}

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }

    /// Bilinear sample at continuous coordinates; zero outside the mask.
    float sample(double x, double y) const;

    friend bool operator==(const Mask&, const Mask&) = default;
};

/// Number of pixels with non-zero coverage.
std::size_t ink_count(const Mask& m);

struct PixelBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open

    friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

struct GlyphRaster {
    Mask mask;
    std::optional<PixelBox> tight;  // empty for a blank bitmap
};

/// Anti-aliased rendering of every stroke as a round-capped polyline of the given width,
/// em square scaled to `size_px`. Throws ContractError for size_px < 8.
GlyphRaster rasterize_glyph(const StrokeGlyph& g, int size_px, double stroke_width_px);

using Quad = std::array<Point, 4>;  // top-left, top-right, bottom-right, bottom-left

/// A drawable element: glyph ink, an optional border behind it, and the label quad in
/// layer pixel coordinates. `ink` and `border` always share dimensions.
struct Layer {
    Mask ink;
    Mask border;
    Quad quad{};

    int width() const noexcept { return ink.width; }
    int height() const noexcept { return ink.height; }
};

Layer make_layer(Mask ink);

/// Border of ceil(ratio * font_px) pixels around the ink, drawn at `alpha` behind it. The layer
/// is padded by the border width on every side and the quad shifted accordingly.
/// ratio 0 returns the input unchanged.
Layer style_border(const Layer& layer, double ratio, double alpha, double font_px);

/// Border width in pixels used by `style_border`.
int border_width_px(double ratio, double font_px);

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Rec. 601 luma on the 8-bit scale.
double luminance(Rgb c);

struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}

    Rgb pixel(int x, int y) const;
    void set(int x, int y, Rgb c);
};

/// Linear gradient from `from` to `to` along `angle_rad`; from == to gives a flat fill.
void fill_gradient(Image& img, Rgb from, Rgb to, double angle_rad);

/// Alpha-composites the layer with its top-left at (x0, y0): border first, ink on top.
/// Pixels falling outside the image are dropped.
void composite(Image& img, const Layer& layer, int x0, int y0, Rgb ink, Rgb border);

std::vector<std::uint8_t> encode_png(const Image& img);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(const std::string& text);

}  // namespace textpecker
