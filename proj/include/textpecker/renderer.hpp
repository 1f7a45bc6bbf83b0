#pragma once

// Synthetic text-image generation: draws texts from a corpus, edits glyph structure,
// rasterizes, styles, transforms and lays the elements out over a background, and emits
// box- and image-level anomaly labels.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "textpecker/engine_config.hpp"
#include "textpecker/layout.hpp"
#include "textpecker/raster.hpp"
#include "textpecker/stroke.hpp"
#include "textpecker/transform.hpp"

namespace textpecker {

/// Characters available for synthesis: the covered, non-space characters of a text, in order.
class Corpus {
public:
    /// Characters absent from `db` are dropped and listed in `uncovered()`. Throws
    /// SchemaError when nothing usable remains.
    static Corpus from_text(std::string_view utf8_text, const GlyphDb& db);
    static Corpus load(const std::filesystem::path& path, const GlyphDb& db);

    const std::u32string& chars() const noexcept { return chars_; }
    /// Distinct dropped characters, ascending.
    const std::vector<char32_t>& uncovered() const noexcept { return uncovered_; }

private:
    std::u32string chars_;
    std::vector<char32_t> uncovered_;
};

struct BoxLabel {
    Quad quad{};
    std::string text;  // inline marked
    std::size_t anomalous = 0;
    std::size_t total = 0;
    std::vector<EditLog> edits;  // one per glyph; non-empty exactly for the anomalous glyphs
    std::optional<TransformSpec> transform;
};

struct RenderSample {
    std::uint64_t seed = 0;
    bool vertical = false;
    bool curve = false;
    int attempts = 1;  // layout draws used
    Image image;       // empty when rendering was skipped
    std::vector<BoxLabel> boxes;
    std::string image_label;  // box texts joined by single spaces

    std::size_t anomalous() const;
    std::size_t total() const;
};

struct SynthOptions {
    /// Labels do not depend on pixels; skipping rasterization yields identical labels.
    bool render = true;
};

inline constexpr int kMaxSampleAttempts = 10;

/// Fully determined by the generator state. Placement failures redraw the whole sample up
/// to kMaxSampleAttempts times, then PlacementError is thrown.
RenderSample synthesize_sample(const EngineConfig& cfg, const GlyphDb& db, const Corpus& corpus, Rng& rng,
                               const SynthOptions& options = {});
RenderSample synthesize_sample(const EngineConfig& cfg, const GlyphDb& db, const Corpus& corpus, std::uint64_t seed,
                               const SynthOptions& options = {});

/// Label records of one sample: the image-level record, then one per box.
std::vector<nlohmann::ordered_json> label_records(const RenderSample& s, const std::string& id, const std::string& image);

struct Manifest {
    bool complete = true;
    std::string error;
    std::uint64_t seed = 0;
    std::size_t images = 0;
    std::size_t anomalous_images = 0;
    std::size_t boxes = 0;
    std::size_t anomalous_boxes = 0;
    std::size_t chars = 0;
    std::size_t anomalous_chars = 0;
    std::vector<std::pair<std::string, std::string>> image_digests;  // file, sha256
    std::string labels_sha256;
    std::vector<std::string> warnings;
    EngineConfig config;

    nlohmann::ordered_json to_json() const;
};

/// Writes out_dir/images/NNNNNN.png, out_dir/labels.jsonl and out_dir/manifest.json for
/// samples seeded mix_seed(cfg.seed, i). Samples are generated on `threads` workers and
/// written in index order. On an I/O failure a manifest with complete = false and the
/// progress so far is written before IoError propagates.
Manifest synthesize_dataset(const EngineConfig& cfg, const GlyphDb& db, const Corpus& corpus, std::size_t n,
                            const std::filesystem::path& out_dir, unsigned threads = 1);

}  // namespace textpecker
