#pragma once

// Parameters of the synthetic text-image engine. Defaults follow the canonical-text /
// structural-anomaly parameter table; the handful of fields marked "engine" below are
// rendering details the table leaves open.

#include <array>
#include <cstdint>
#include <filesystem>

#include "json.hpp"

#include "textpecker/stroke.hpp"

namespace textpecker {

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const Range&, const Range&) = default;
};

struct IntRange {
    int lo = 0;
    int hi = 0;

    friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Index order of `EngineConfig::transform_weights`.
enum class TransformKind { PerspX, PerspY, TrapX, TrapY, SkewX, SkewY, Rotate };
inline constexpr std::size_t kTransformKinds = 7;

std::string_view to_string(TransformKind kind) noexcept;

struct EngineConfig {
    int canvas_width = 1024;  // engine
    int canvas_height = 1024;  // engine

    double vertical_prob = 0.10;
    IntRange elements_per_sample{3, 10};
    IntRange text_len{1, 25};
    IntRange font_size_px{50, 100};

    IntRange h_spacing_px{50, 200};
    IntRange line_spacing_px{10, 20};
    Range length_ratio{0.8, 1.0};  // longest share of a line one element may take
    double offset_prob = 0.20;
    IntRange offset_px{10, 30};
    int margin_px = 15;
    double flow_prob = 0.80;
    double curve_prob = 0.20;
    Range curve_sag_ratio{0.02, 0.08};  // engine: arc height over the canvas extent

    double style_prob = 0.25;
    Range border_size_ratio{0.05, 0.15};
    double border_alpha = 1.0;

    double transform_prob = 0.50;
    std::array<double, kTransformKinds> transform_weights{1, 1, 1, 1, 2, 2, 3};
    Range persp_x_percent{0.8, 0.8};
    Range persp_y_percent{0.8, 1.0};
    Range trap_x_percent{0.8, 1.0};
    Range trap_y_percent{0.8, 1.0};
    Range skew_x_deg{0, 30};
    Range skew_y_deg{0, 10};
    Range rotate_deg{0, 10};

    Range stroke_width_ratio{0.06, 0.10};  // engine: stroke width over font size
    Range glyph_scale{0.9, 1.0};           // engine: per-glyph size jitter within its cell
    double gradient_prob = 0.5;            // engine: gradient vs flat background

    double anomaly_prob = 0.50;
    AnomalyProbabilities op_probs{};

    std::uint64_t seed = 0;

    /// Throws SchemaError naming the offending field.
    void validate() const;

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// Overlays the fields present in `j` (a map keyed by the field names above; ranges as
/// [lo, hi], transform_weights and op_probs as maps) onto `base`, then validates.
/// Unknown fields are rejected.
EngineConfig engine_config_from_json(const nlohmann::json& j, const EngineConfig& base = {});
EngineConfig load_engine_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const EngineConfig& cfg);

}  // namespace textpecker
