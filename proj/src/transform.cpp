#include "textpecker/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "textpecker/error.hpp"

namespace textpecker {

namespace {

using Mat3 = Eigen::Matrix3d;

std::array<double, 9> to_array(const Mat3& m) {
    std::array<double, 9> a{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[static_cast<std::size_t>(r * 3 + c)] = m(r, c);
    return a;
}

Point apply(const std::array<double, 9>& h, Point p) {
    const double w = h[6] * p.x + h[7] * p.y + h[8];
    return {(h[0] * p.x + h[1] * p.y + h[2]) / w, (h[3] * p.x + h[4] * p.y + h[5]) / w};
}

// Homography taking src[i] to dst[i] for four points in general position.
Mat3 homography(const std::array<Point, 4>& src, const std::array<Point, 4>& dst) {
    Eigen::Matrix<double, 8, 8> a;
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const auto& s = src[static_cast<std::size_t>(i)];
        const auto& d = dst[static_cast<std::size_t>(i)];
        a.row(2 * i) << s.x, s.y, 1, 0, 0, 0, -d.x * s.x, -d.x * s.y;
        a.row(2 * i + 1) << 0, 0, 0, s.x, s.y, 1, -d.y * s.x, -d.y * s.y;
        b(2 * i) = d.x;
        b(2 * i + 1) = d.y;
    }
    const Eigen::Matrix<double, 8, 1> x = a.fullPivLu().solve(b);
    Mat3 h;
    h << x(0), x(1), x(2), x(3), x(4), x(5), x(6), x(7), 1.0;
    return h;
}

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

Range param_range(const EngineConfig& cfg, TransformKind kind) {
    switch (kind) {
        case TransformKind::PerspX: return cfg.persp_x_percent;
        case TransformKind::PerspY: return cfg.persp_y_percent;
        case TransformKind::TrapX: return cfg.trap_x_percent;
        case TransformKind::TrapY: return cfg.trap_y_percent;
        case TransformKind::SkewX: return cfg.skew_x_deg;
        case TransformKind::SkewY: return cfg.skew_y_deg;
        case TransformKind::Rotate: return cfg.rotate_deg;
    }
    return {};
}

bool is_trapezoid(TransformKind k) { return k == TransformKind::TrapX || k == TransformKind::TrapY; }

struct Bounds {
    double x0, y0, x1, y1;
};

Bounds mapped_bounds(const Warp& w, double width, double height) {
    Bounds b{INFINITY, INFINITY, -INFINITY, -INFINITY};
    for (const Point& c : {Point{0, 0}, Point{width, 0}, Point{width, height}, Point{0, height}}) {
        const Point p = w.forward(c);
        b.x0 = std::min(b.x0, p.x), b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x), b.y1 = std::max(b.y1, p.y);
    }
    return b;
}

Quad map_quad(const Warp& warp, const Bounds& b, const Quad& quad, int ow, int oh) {
    Quad out{};
    for (std::size_t i = 0; i < 4; ++i) {
        const Point p = warp.forward(quad[i]);
        out[i] = {std::clamp(p.x - b.x0, 0.0, double(ow)), std::clamp(p.y - b.y0, 0.0, double(oh))};
    }
    return out;
}

int extent(double lo, double hi) { return std::max(1, static_cast<int>(std::ceil(hi - lo - 1e-9))); }

}  // namespace

TransformKind draw_transform_kind(const EngineConfig& cfg, Rng& rng) {
    return static_cast<TransformKind>(rng.weighted(cfg.transform_weights));
}

std::optional<TransformSpec> draw_transform(const EngineConfig& cfg, Rng& rng) {
    if (!rng.bernoulli(cfg.transform_prob)) return std::nullopt;
    TransformSpec s;
    s.kind = draw_transform_kind(cfg, rng);
    const Range r = param_range(cfg, s.kind);
    s.amount = rng.uniform(r.lo, r.hi);
    s.flip = rng.bernoulli(0.5);
    return s;
}

Warp::Warp(const TransformSpec& spec, double width, double height) : spec_(spec), width_(width), height_(height) {
    if (!(width > 0.0) || !(height > 0.0)) throw ContractError("Warp: frame must have positive size");
    if (is_trapezoid(spec.kind)) {
        if (!(spec.amount > 0.0 && spec.amount <= 1.0)) throw ContractError("Warp: trapezoid percent must lie in (0, 1]");
        return;
    }

    const double cx = width / 2, cy = height / 2;
    Mat3 to_origin = Mat3::Identity(), back = Mat3::Identity();
    to_origin(0, 2) = -cx, to_origin(1, 2) = -cy;
    back(0, 2) = cx, back(1, 2) = cy;
    const double deg = spec.flip ? -spec.amount : spec.amount;

    Mat3 h = Mat3::Identity();
    switch (spec.kind) {
        case TransformKind::Rotate: {
            const double a = radians(deg);
            Mat3 r = Mat3::Identity();
            r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
            h = back * r * to_origin;
            break;
        }
        case TransformKind::SkewX: {
            Mat3 s = Mat3::Identity();
            s(0, 1) = std::tan(radians(deg));
            h = back * s * to_origin;
            break;
        }
        case TransformKind::SkewY: {
            Mat3 s = Mat3::Identity();
            s(1, 0) = std::tan(radians(deg));
            h = back * s * to_origin;
            break;
        }
        case TransformKind::PerspX:
        case TransformKind::PerspY: {
            const double p = spec.amount;
            if (!(p > 0.0 && p <= 1.0)) throw ContractError("Warp: perspective percent must lie in (0, 1]");
            const std::array<Point, 4> src{Point{0, 0}, Point{width, 0}, Point{width, height}, Point{0, height}};
            auto dst = src;
            if (spec.kind == TransformKind::PerspX) {
                // One vertical edge keeps p of its length about the centre line.
                const double inset = height * (1 - p) / 2;
                const std::size_t top = spec.flip ? 1 : 0, bottom = spec.flip ? 2 : 3;
                dst[top].y += inset;
                dst[bottom].y -= inset;
            } else {
                const double inset = width * (1 - p) / 2;
                const std::size_t left = spec.flip ? 3 : 0, right = spec.flip ? 2 : 1;
                dst[left].x += inset;
                dst[right].x -= inset;
            }
            h = homography(src, dst);
            break;
        }
        case TransformKind::TrapX:
        case TransformKind::TrapY: break;
    }
    h_ = to_array(h);
    h_inv_ = to_array(h.inverse());
}

Point Warp::forward(Point p) const {
    if (!is_trapezoid(spec_.kind)) return apply(h_, p);
    const double q = spec_.amount;
    if (spec_.kind == TransformKind::TrapX) {
        // Horizontal scale varies linearly from q on the squeezed edge to 1 on the other.
        const double t = spec_.flip ? 1 - p.y / height_ : p.y / height_;
        const double s = q + (1 - q) * t;
        return {width_ / 2 + (p.x - width_ / 2) * s, p.y};
    }
    const double t = spec_.flip ? 1 - p.x / width_ : p.x / width_;
    const double s = q + (1 - q) * t;
    return {p.x, height_ / 2 + (p.y - height_ / 2) * s};
}

Point Warp::inverse(Point p) const {
    if (!is_trapezoid(spec_.kind)) return apply(h_inv_, p);
    const double q = spec_.amount;
    if (spec_.kind == TransformKind::TrapX) {
        const double t = spec_.flip ? 1 - p.y / height_ : p.y / height_;
        const double s = q + (1 - q) * t;
        return {width_ / 2 + (p.x - width_ / 2) / s, p.y};
    }
    const double t = spec_.flip ? 1 - p.x / width_ : p.x / width_;
    const double s = q + (1 - q) * t;
    return {p.x, height_ / 2 + (p.y - height_ / 2) / s};
}

std::pair<int, int> transformed_size(const TransformSpec& spec, int width, int height) {
    const Warp w(spec, width, height);
    const Bounds b = mapped_bounds(w, width, height);
    return {extent(b.x0, b.x1), extent(b.y0, b.y1)};
}

Layer apply_transform(const Layer& layer, const TransformSpec& spec) {
    const double w = layer.width(), h = layer.height();
    const Warp warp(spec, w, h);
    const Bounds b = mapped_bounds(warp, w, h);
    const int ow = extent(b.x0, b.x1), oh = extent(b.y0, b.y1);

    Layer out;
    out.ink = Mask(ow, oh);
    out.border = Mask(ow, oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            const Point src = warp.inverse({x + 0.5 + b.x0, y + 0.5 + b.y0});
            out.ink.at(x, y) = layer.ink.sample(src.x, src.y);
            out.border.at(x, y) = layer.border.sample(src.x, src.y);
        }
    }
    out.quad = map_quad(warp, b, layer.quad, ow, oh);
    return out;
}

Quad transform_quad(const Quad& quad, const TransformSpec& spec, int width, int height) {
    const Warp warp(spec, width, height);
    const Bounds b = mapped_bounds(warp, width, height);
    return map_quad(warp, b, quad, extent(b.x0, b.x1), extent(b.y0, b.y1));
}

}  // namespace textpecker
