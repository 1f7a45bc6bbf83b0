#include "textpecker/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <openssl/evp.h>
#include <png.h>

#include "textpecker/error.hpp"

namespace textpecker {

namespace {

// Squared distance from (px, py) to segment ab.
double segment_dist2(double px, double py, const Point& a, const Point& b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
    return ex * ex + ey * ey;
}

constexpr double kFar = 1e20;  // stands in for "no ink"; finite so the envelope arithmetic stays exact enough

// 1-D squared distance transform (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    const double inf = std::numeric_limits<double>::infinity();
    auto F = [&](int i) { return f[static_cast<std::size_t>(i)] + double(i) * i; };
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        double s = (F(q) - F(v[static_cast<std::size_t>(k)])) / (2.0 * (q - v[static_cast<std::size_t>(k)]));
        while (s <= z[static_cast<std::size_t>(k)]) {
            --k;
            s = (F(q) - F(v[static_cast<std::size_t>(k)])) / (2.0 * (q - v[static_cast<std::size_t>(k)]));
        }
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = s;
        z[static_cast<std::size_t>(k) + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
        const int p = v[static_cast<std::size_t>(k)];
        d[static_cast<std::size_t>(q)] = double(q - p) * (q - p) + f[static_cast<std::size_t>(p)];
    }
}

// Squared Euclidean distance from every pixel to the nearest pixel with coverage >= 0.5.
std::vector<double> distance_to_ink(const Mask& m) {
    const int w = m.width, h = m.height;
    std::vector<double> grid(m.data.size());
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = m.data[i] >= 0.5f ? 0.0 : kFar;

    const int n = std::max(w, h);
    std::vector<double> f(static_cast<std::size_t>(n)), d(static_cast<std::size_t>(n));
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x); };

    f.resize(static_cast<std::size_t>(h));
    d.resize(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) f[static_cast<std::size_t>(y)] = grid[idx(x, y)];
        edt_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) grid[idx(x, y)] = d[static_cast<std::size_t>(y)];
    }
    f.resize(static_cast<std::size_t>(w));
    d.resize(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[static_cast<std::size_t>(x)] = grid[idx(x, y)];
        edt_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) grid[idx(x, y)] = d[static_cast<std::size_t>(x)];
    }
    return grid;
}

Mask padded(const Mask& m, int pad) {
    Mask out(m.width + 2 * pad, m.height + 2 * pad);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) out.at(x + pad, y + pad) = m.at(x, y);
    return out;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

float Mask::sample(double x, double y) const {
    // Pixel centres sit at half-integers.
    const double fx = x - 0.5, fy = y - 0.5;
    const double x0 = std::floor(fx), y0 = std::floor(fy);
    const double tx = fx - x0, ty = fy - y0;
    const int ix = static_cast<int>(x0), iy = static_cast<int>(y0);
    auto get = [&](int cx, int cy) -> double {
        if (cx < 0 || cy < 0 || cx >= width || cy >= height) return 0.0;
        return at(cx, cy);
    };
    const double top = get(ix, iy) * (1 - tx) + get(ix + 1, iy) * tx;
    const double bottom = get(ix, iy + 1) * (1 - tx) + get(ix + 1, iy + 1) * tx;
    return static_cast<float>(top * (1 - ty) + bottom * ty);
}

std::size_t ink_count(const Mask& m) {
    return static_cast<std::size_t>(std::count_if(m.data.begin(), m.data.end(), [](float v) { return v > 0.0f; }));
}

GlyphRaster rasterize_glyph(const StrokeGlyph& g, int size_px, double stroke_width_px) {
    if (size_px < 8) throw ContractError("rasterize_glyph: size must be at least 8 px");
    if (!(stroke_width_px > 0.0)) throw ContractError("rasterize_glyph: stroke width must be positive");

    GlyphRaster out{Mask(size_px, size_px), std::nullopt};
    const double scale = size_px / g.em;
    const double half = stroke_width_px / 2.0;
    for (const auto& stroke : g.strokes) {
        for (std::size_t i = 1; i < stroke.points.size(); ++i) {
            const Point a{stroke.points[i - 1].x * scale, stroke.points[i - 1].y * scale};
            const Point b{stroke.points[i].x * scale, stroke.points[i].y * scale};
            const double reach = half + 1.0;
            const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - reach)));
            const int x1 = std::min(size_px - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + reach)));
            const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - reach)));
            const int y1 = std::min(size_px - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + reach)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const double d = std::sqrt(segment_dist2(x + 0.5, y + 0.5, a, b));
                    const float cov = static_cast<float>(std::clamp(half + 0.5 - d, 0.0, 1.0));
                    float& px = out.mask.at(x, y);
                    px = std::max(px, cov);
                }
            }
        }
    }

    PixelBox box{size_px, size_px, 0, 0};
    bool any = false;
    for (int y = 0; y < size_px; ++y)
        for (int x = 0; x < size_px; ++x)
            if (out.mask.at(x, y) > 0.0f) {
                any = true;
                box.x0 = std::min(box.x0, x);
                box.y0 = std::min(box.y0, y);
                box.x1 = std::max(box.x1, x + 1);
                box.y1 = std::max(box.y1, y + 1);
            }
    if (any) out.tight = box;
    return out;
}

Layer make_layer(Mask ink) {
    Layer l;
    const double w = ink.width, h = ink.height;
    l.border = Mask(ink.width, ink.height);
    l.ink = std::move(ink);
    l.quad = {Point{0, 0}, Point{w, 0}, Point{w, h}, Point{0, h}};
    return l;
}

int border_width_px(double ratio, double font_px) { return static_cast<int>(std::ceil(ratio * font_px - 1e-9)); }

Layer style_border(const Layer& layer, double ratio, double alpha, double font_px) {
    if (!(ratio >= 0.0) || !(alpha >= 0.0 && alpha <= 1.0) || !(font_px > 0.0))
        throw ContractError("style_border: need ratio >= 0, alpha in [0, 1] and a positive font size");
    const int r = border_width_px(ratio, font_px);
    if (r <= 0) return layer;

    Layer out;
    out.ink = padded(layer.ink, r);
    out.border = padded(layer.border, r);
    for (std::size_t i = 0; i < layer.quad.size(); ++i) out.quad[i] = {layer.quad[i].x + r, layer.quad[i].y + r};

    const auto dist2 = distance_to_ink(out.ink);
    for (std::size_t i = 0; i < dist2.size(); ++i) {
        if (dist2[i] >= kFar / 2) continue;
        const double cov = std::clamp(r + 1.0 - std::sqrt(dist2[i]), 0.0, 1.0) * alpha;
        out.border.data[i] = std::max(out.border.data[i], static_cast<float>(cov));
    }
    return out;
}

double luminance(Rgb c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

Rgb Image::pixel(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
    const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
}

void fill_gradient(Image& img, Rgb from, Rgb to, double angle_rad) {
    const double ux = std::cos(angle_rad), uy = std::sin(angle_rad);
    // Project the corners to find the extent of the gradient axis.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [cx, cy] : {std::pair{0.0, 0.0}, {double(img.width), 0.0}, {0.0, double(img.height)}, {double(img.width), double(img.height)}}) {
        const double t = cx * ux + cy * uy;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double t = ((x + 0.5) * ux + (y + 0.5) * uy - lo) / span;
            img.set(x, y, {to_byte(from.r + (to.r - from.r) * t), to_byte(from.g + (to.g - from.g) * t), to_byte(from.b + (to.b - from.b) * t)});
        }
    }
}

void composite(Image& img, const Layer& layer, int x0, int y0, Rgb ink, Rgb border) {
    for (int y = 0; y < layer.height(); ++y) {
        const int iy = y0 + y;
        if (iy < 0 || iy >= img.height) continue;
        for (int x = 0; x < layer.width(); ++x) {
            const int ix = x0 + x;
            if (ix < 0 || ix >= img.width) continue;
            const double ab = layer.border.at(x, y), ai = layer.ink.at(x, y);
            if (ab <= 0.0 && ai <= 0.0) continue;
            const Rgb bg = img.pixel(ix, iy);
            double r = bg.r, g = bg.g, b = bg.b;
            r += (border.r - r) * ab, g += (border.g - g) * ab, b += (border.b - b) * ab;
            r += (ink.r - r) * ai, g += (ink.g - g) * ai, b += (ink.b - b) * ai;
            img.set(ix, iy, {to_byte(r), to_byte(g), to_byte(b)});
        }
    }
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: cannot create info struct");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: encoding failed");
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t len) {
            auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            buf->insert(buf->end(), data, data + len);
        },
        nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, img.rgb.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(img.width) * 3);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 15];
    }
    return hex;
}

std::string sha256_hex(const std::string& text) {
    return sha256_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace textpecker
