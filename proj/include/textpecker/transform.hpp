#pragma once

// Weighted geometric transforms applied to rendered text elements.

#include <array>
#include <optional>

#include "textpecker/engine_config.hpp"
#include "textpecker/random.hpp"
#include "textpecker/raster.hpp"

namespace textpecker {

/// `amount` is the retained edge-length fraction for perspective/trapezoid kinds and the
/// angle in degrees for skew/rotate. `flip` squeezes the opposite edge, or negates the angle.
struct TransformSpec {
    TransformKind kind = TransformKind::Rotate;
    double amount = 0.0;
    bool flip = false;

    friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

/// Bernoulli(transform_prob); on success one kind with probability proportional to its
/// weight, then its parameter and side.
std::optional<TransformSpec> draw_transform(const EngineConfig& cfg, Rng& rng);

/// Transform kind drawn by weight alone.
TransformKind draw_transform_kind(const EngineConfig& cfg, Rng& rng);

/// The analytic map of a transform over a width x height frame, centred on the frame.
/// Perspective, skew and rotate are homographies; trapezoids scale one axis linearly
/// along the other.
class Warp {
public:
    Warp(const TransformSpec& spec, double width, double height);

    Point forward(Point p) const;
    Point inverse(Point p) const;

private:
    TransformSpec spec_;
    double width_, height_;
    std::array<double, 9> h_{}, h_inv_{};  // row-major homographies, unused for trapezoids
};

/// Maps the layer through the transform: corners and quad exactly, pixels by inverse
/// bilinear resampling into the bounding box of the mapped frame.
Layer apply_transform(const Layer& layer, const TransformSpec& spec);

/// The quad `apply_transform` produces for a layer of the given size, without resampling.
Quad transform_quad(const Quad& quad, const TransformSpec& spec, int width, int height);

/// Integer size of the layer `apply_transform` would produce for a width x height frame.
std::pair<int, int> transformed_size(const TransformSpec& spec, int width, int height);

}  // namespace textpecker
