#pragma once

// Characters as ordered stroke medians, and the structural edit operators that turn a
// canonical glyph into an anomalous one.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "textpecker/random.hpp"

namespace textpecker {

inline constexpr double kDefaultEm = 1024.0;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Polyline {
    std::vector<Point> points;

    friend bool operator==(const Polyline&, const Polyline&) = default;
};

struct StrokeGlyph {
    char32_t character = 0;
    std::vector<Polyline> strokes;  // canonical writing order
    double em = kDefaultEm;

    /// Throws SchemaError naming the character and the offending stroke.
    void validate() const;

    friend bool operator==(const StrokeGlyph&, const StrokeGlyph&) = default;
};

double arc_length(const Polyline& stroke);

/// `n` points equally spaced in arc length along the stroke; the endpoints are kept exactly.
/// Throws ContractError for n < 2 or a zero-length stroke.
Polyline resample(const Polyline& stroke, std::size_t n);

/// Mean of the 32-point arc-length resampling (closed strokes: 32 cyclic samples).
Point centroid(const Polyline& stroke);

/// Immutable character -> glyph map.
class GlyphDb {
public:
    /// Line-delimited records {"character": "中", "strokes": [[[x, y], ...], ...]}, coordinates
    /// in a 1024-unit em square (an optional "em" overrides). Rejects duplicates and empty files.
    static GlyphDb load(const std::filesystem::path& path);
    static GlyphDb from_glyphs(std::vector<StrokeGlyph> glyphs);

    const StrokeGlyph* find(char32_t c) const;
    bool contains(char32_t c) const { return find(c) != nullptr; }
    std::size_t size() const noexcept { return order_.size(); }
    /// Characters in ascending code point order.
    const std::vector<char32_t>& characters() const noexcept { return order_; }

private:
    std::map<char32_t, StrokeGlyph> glyphs_;
    std::vector<char32_t> order_;
};

enum class EditKind { Delete, Insert, Swap };

std::string_view to_string(EditKind kind) noexcept;

struct EditOp {
    EditKind kind = EditKind::Delete;
    std::vector<std::size_t> strokes;  // removed / swapped / appended indices
    std::optional<char32_t> donor;     // insert only

    friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditLog {
    std::vector<EditOp> operations;

    bool empty() const noexcept { return operations.empty(); }
    friend bool operator==(const EditLog&, const EditLog&) = default;
};

struct EditResult {
    StrokeGlyph glyph;
    EditLog log;
};

/// Removes `k` strokes chosen uniformly without replacement; 1 <= k < stroke count.
EditResult op_delete(const StrokeGlyph& g, Rng& rng, std::size_t k);

/// Exchanges the positions of a uniformly chosen stroke pair by swapping their centroids.
EditResult op_swap(const StrokeGlyph& g, Rng& rng);
EditResult swap_strokes(const StrokeGlyph& g, std::size_t i, std::size_t j);

/// Appends one stroke taken from another character, centred near an existing stroke.
EditResult op_insert(const StrokeGlyph& g, const GlyphDb& donors, Rng& rng);

struct AnomalyProbabilities {
    double del = 0.4;
    double ins = 0.4;
    double swap = 0.4;

    friend bool operator==(const AnomalyProbabilities&, const AnomalyProbabilities&) = default;
};

struct ComposeResult {
    StrokeGlyph glyph;
    EditLog log;
    bool anomalous = false;
    /// Operators whose draw succeeded but could not run on the glyph at that point.
    std::vector<EditKind> skipped;
    /// Whether each operator (delete, insert, swap) was feasible when considered.
    std::array<bool, 3> feasible{};
};

/// Considers delete -> insert -> swap, each independently with its probability. Deletion
/// removes k ~ U[1, max(1, ceil(strokes / 3))] strokes.
ComposeResult compose_anomaly(const StrokeGlyph& g, const GlyphDb& donors, Rng& rng, const AnomalyProbabilities& p);

}  // namespace textpecker
