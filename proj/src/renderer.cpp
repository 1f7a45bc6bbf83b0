#include "textpecker/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "textpecker/error.hpp"
#include "textpecker/utf8.hpp"

namespace textpecker {

namespace {

using ojson = nlohmann::ordered_json;

struct GlyphPlan {
    StrokeGlyph glyph;
    EditLog log;
    double scale = 1.0;
};

struct ElementPlan {
    std::u32string chars;
    std::vector<GlyphPlan> glyphs;
    int font = 0;
    double stroke_width = 0.0;
    double border_ratio = 0.0;
    int border_px = 0;
    std::optional<TransformSpec> transform;
    Rgb ink, border;
};

std::string char_name(char32_t c) {
    char code[16];
    std::snprintf(code, sizeof code, "U+%04X", static_cast<unsigned>(c));
    std::string s = "'";
    utf8::append(s, c);
    return s + "' (" + code + ")";
}

bool reserved(char32_t c) { return c == U'[' || c == U']' || c == U'#' || utf8::is_space(c); }

ElementPlan draw_element(const EngineConfig& cfg, const GlyphDb& db, const Corpus& corpus, Rng& rng, bool vertical, bool curve) {
    ElementPlan e;
    e.font = static_cast<int>(rng.integer(cfg.font_size_px.lo, cfg.font_size_px.hi));
    const double length_ratio = rng.uniform(cfg.length_ratio.lo, cfg.length_ratio.hi);
    if (rng.bernoulli(cfg.style_prob)) {
        e.border_ratio = rng.uniform(cfg.border_size_ratio.lo, cfg.border_size_ratio.hi);
        e.border_px = border_width_px(e.border_ratio, e.font);
    }
    e.stroke_width = e.font * rng.uniform(cfg.stroke_width_ratio.lo, cfg.stroke_width_ratio.hi);

    const int usable = (vertical ? cfg.canvas_height : cfg.canvas_width) - 2 * cfg.margin_px;
    const int pad = curve ? curve_allowance({1, e.font, e.border_px}, cfg, vertical) : e.border_px;
    const int fit = static_cast<int>(std::floor((length_ratio * usable - 2 * pad) / e.font));
    if (fit < 1) throw PlacementError("a single glyph does not fit on a line");
    const int n = std::min(static_cast<int>(rng.integer(cfg.text_len.lo, cfg.text_len.hi)), fit);

    const auto& pool = corpus.chars();
    const std::size_t start = rng.index(pool.size());
    const bool anomalous = rng.bernoulli(cfg.anomaly_prob);
    std::vector<const StrokeGlyph*> base;
    for (int i = 0; i < n; ++i) {
        const char32_t c = pool[(start + static_cast<std::size_t>(i)) % pool.size()];
        const StrokeGlyph* g = db.find(c);
        base.push_back(g);
        e.chars.push_back(c);
        GlyphPlan gp;
        gp.scale = rng.uniform(cfg.glyph_scale.lo, cfg.glyph_scale.hi);
        if (anomalous) {
            auto r = compose_anomaly(*g, db, rng, cfg.op_probs);
            gp.glyph = std::move(r.glyph);
            gp.log = std::move(r.log);
        } else {
            gp.glyph = *g;
        }
        e.glyphs.push_back(std::move(gp));
    }
    // An anomalous text carries at least one edited glyph; redraw one if every draw came up empty.
    auto edited = [&] { return std::any_of(e.glyphs.begin(), e.glyphs.end(), [](const GlyphPlan& g) { return !g.log.empty(); }); };
    for (int t = 0; anomalous && t < 64 && !edited(); ++t) {
        const std::size_t k = rng.index(e.glyphs.size());
        auto r = compose_anomaly(*base[k], db, rng, cfg.op_probs);
        e.glyphs[k].glyph = std::move(r.glyph);
        e.glyphs[k].log = std::move(r.log);
    }

    if (!curve) e.transform = draw_transform(cfg, rng);
    return e;
}

Size raw_size(const ElementPlan& e, bool vertical) {
    const int n = static_cast<int>(e.glyphs.size());
    return vertical ? Size{e.font, n * e.font} : Size{n * e.font, e.font};
}

Size flow_size(const ElementPlan& e, bool vertical) {
    const Size raw = raw_size(e, vertical);
    const Size padded{raw.width + 2 * e.border_px, raw.height + 2 * e.border_px};
    if (!e.transform) return padded;
    const auto [w, h] = transformed_size(*e.transform, padded.width, padded.height);
    return {w, h};
}

Quad flow_quad(const ElementPlan& e, bool vertical, Placement at) {
    const Size raw = raw_size(e, vertical);
    const double r = e.border_px;
    Quad q{Point{r, r}, Point{r + raw.width, r}, Point{r + raw.width, r + raw.height}, Point{r, r + raw.height}};
    if (e.transform) q = transform_quad(q, *e.transform, raw.width + 2 * e.border_px, raw.height + 2 * e.border_px);
    for (auto& p : q) p = {p.x + at.x, p.y + at.y};
    return q;
}

Quad curve_quad(const ElementPlan& e, const CurvePlacement& p, const EngineConfig& cfg) {
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (const auto& pose : p.glyphs) {
        const double a = pose.angle_deg * std::numbers::pi / 180.0;
        const double ext = e.font / 2.0 * (std::abs(std::cos(a)) + std::abs(std::sin(a)));
        x0 = std::min(x0, pose.center.x - ext), x1 = std::max(x1, pose.center.x + ext);
        y0 = std::min(y0, pose.center.y - ext), y1 = std::max(y1, pose.center.y + ext);
    }
    x0 = std::max(x0, 0.0), y0 = std::max(y0, 0.0);
    x1 = std::min(x1, double(cfg.canvas_width)), y1 = std::min(y1, double(cfg.canvas_height));
    return {Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}};
}

// Glyph centred in an f x f cell, scaled by its jitter.
Mask glyph_cell(const GlyphPlan& g, int font, double stroke_width) {
    const int size = std::max(8, static_cast<int>(std::lround(font * g.scale)));
    const auto raster = rasterize_glyph(g.glyph, size, stroke_width * g.scale);
    Mask cell(font, font);
    const int off = (font - size) / 2;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const int cx = x + off, cy = y + off;
            if (cx >= 0 && cy >= 0 && cx < font && cy < font) cell.at(cx, cy) = raster.mask.at(x, y);
        }
    return cell;
}

Layer flow_layer(const ElementPlan& e, bool vertical, double alpha) {
    const Size raw = raw_size(e, vertical);
    Mask ink(raw.width, raw.height);
    for (std::size_t k = 0; k < e.glyphs.size(); ++k) {
        const Mask cell = glyph_cell(e.glyphs[k], e.font, e.stroke_width);
        const int ox = vertical ? 0 : static_cast<int>(k) * e.font;
        const int oy = vertical ? static_cast<int>(k) * e.font : 0;
        for (int y = 0; y < e.font; ++y)
            for (int x = 0; x < e.font; ++x) ink.at(ox + x, oy + y) = cell.at(x, y);
    }
    Layer layer = make_layer(std::move(ink));
    if (e.border_px > 0) layer = style_border(layer, e.border_ratio, alpha, e.font);
    if (e.transform) layer = apply_transform(layer, *e.transform);
    return layer;
}

void render_curve_element(Image& img, const ElementPlan& e, const CurvePlacement& p, double alpha) {
    for (std::size_t k = 0; k < e.glyphs.size(); ++k) {
        Layer layer = make_layer(glyph_cell(e.glyphs[k], e.font, e.stroke_width));
        if (e.border_px > 0) layer = style_border(layer, e.border_ratio, alpha, e.font);
        const double angle = p.glyphs[k].angle_deg;
        if (angle != 0.0) layer = apply_transform(layer, {TransformKind::Rotate, std::abs(angle), angle < 0.0});
        const Point c = p.glyphs[k].center;
        const int x = static_cast<int>(std::lround(c.x - layer.width() / 2.0));
        const int y = static_cast<int>(std::lround(c.y - layer.height() / 2.0));
        composite(img, layer, x, y, e.ink, e.border);
    }
}

// A colour whose luma is at least 41 away from every luma in [lo, hi].
Rgb contrasting(Rng& rng, double lo, double hi) {
    constexpr double kGap = 41.0;
    const bool dark_ok = lo - kGap >= 0.0, light_ok = hi + kGap <= 255.0;
    const bool dark = dark_ok && (!light_ok || rng.bernoulli(0.5));
    const double target = dark ? rng.uniform(0.0, lo - kGap) : rng.uniform(hi + kGap, 255.0);
    const int r = static_cast<int>(rng.integer(0, 255)), g = static_cast<int>(rng.integer(0, 255)), b = static_cast<int>(rng.integer(0, 255));
    const double shift = target - luminance({std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)});
    auto ch = [&](int v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v + shift), 0L, 255L)); };
    const Rgb c{ch(r), ch(g), ch(b)};
    const double l = luminance(c);
    if (dark ? l <= lo - kGap : l >= hi + kGap) return c;
    const auto grey = static_cast<std::uint8_t>(dark ? std::floor(target) : std::ceil(target));
    return {grey, grey, grey};
}

std::string marked(const ElementPlan& e, std::size_t& anomalous) {
    std::string s;
    anomalous = 0;
    for (std::size_t k = 0; k < e.chars.size(); ++k) {
        if (e.glyphs[k].log.empty()) {
            utf8::append(s, e.chars[k]);
        } else {
            ++anomalous;
            s += "[[";
            utf8::append(s, e.chars[k]);
            s += "]]";
        }
    }
    return s;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

Corpus Corpus::from_text(std::string_view utf8_text, const GlyphDb& db) {
    Corpus c;
    std::set<char32_t> missing;
    for (char32_t ch : utf8::decode(utf8_text)) {
        if (utf8::is_space(ch)) continue;
        if (reserved(ch) || !db.contains(ch)) {
            missing.insert(ch);
            continue;
        }
        c.chars_.push_back(ch);
    }
    c.uncovered_.assign(missing.begin(), missing.end());
    if (c.chars_.empty()) throw SchemaError("corpus has no characters covered by the stroke database");
    return c;
}

Corpus Corpus::load(const std::filesystem::path& path, const GlyphDb& db) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), db);
}

std::size_t RenderSample::anomalous() const {
    std::size_t n = 0;
    for (const auto& b : boxes) n += b.anomalous;
    return n;
}

std::size_t RenderSample::total() const {
    std::size_t n = 0;
    for (const auto& b : boxes) n += b.total;
    return n;
}

RenderSample synthesize_sample(const EngineConfig& cfg, const GlyphDb& db, const Corpus& corpus, Rng& rng,
                               const SynthOptions& options) {
    cfg.validate();
    RenderSample out;
    std::string last_error;
    for (int attempt = 1; attempt <= kMaxSampleAttempts; ++attempt) {
        const int count = static_cast<int>(rng.integer(cfg.elements_per_sample.lo, cfg.elements_per_sample.hi));
        const bool vertical = rng.bernoulli(cfg.vertical_prob);
        const bool curve = rng.bernoulli(cfg.curve_prob);
        std::vector<ElementPlan> plans;
        std::vector<Placement> flow;
        CurveLayout arc;
        try {
            for (int i = 0; i < count; ++i) plans.push_back(draw_element(cfg, db, corpus, rng, vertical, curve));
            if (curve) {
                std::vector<CurveElement> elements;
                for (const auto& e : plans) elements.push_back({static_cast<int>(e.glyphs.size()), e.font, e.border_px});
                arc = layout_curve(elements, cfg, vertical, rng);
            } else {
                std::vector<Size> sizes;
                for (const auto& e : plans) sizes.push_back(flow_size(e, vertical));
                flow = layout_flow(sizes, cfg, vertical, rng);
            }
        } catch (const PlacementError& err) {
            last_error = err.what();
            continue;
        }

        out.vertical = vertical;
        out.curve = curve;
        out.attempts = attempt;

        // Colours are drawn whether or not pixels are produced, so both modes consume the same stream.
        const bool gradient = rng.bernoulli(cfg.gradient_prob);
        const Rgb bg_from{std::uint8_t(rng.integer(0, 255)), std::uint8_t(rng.integer(0, 255)), std::uint8_t(rng.integer(0, 255))};
        Rgb bg_to = bg_from;
        if (gradient) {
            auto jitter = [&](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp<std::int64_t>(v + rng.integer(-40, 40), 0, 255)); };
            bg_to = {jitter(bg_from.r), jitter(bg_from.g), jitter(bg_from.b)};
        }
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double lo = std::min(luminance(bg_from), luminance(bg_to)), hi = std::max(luminance(bg_from), luminance(bg_to));
        for (auto& e : plans) {
            e.ink = contrasting(rng, lo, hi);
            const double li = luminance(e.ink);
            e.border = contrasting(rng, li, li);
        }

        std::vector<std::string> texts;
        for (std::size_t i = 0; i < plans.size(); ++i) {
            const auto& e = plans[i];
            BoxLabel box;
            box.text = marked(e, box.anomalous);
            box.total = e.chars.size();
            for (const auto& g : e.glyphs) box.edits.push_back(g.log);
            box.transform = e.transform;
            box.quad = curve ? curve_quad(e, arc.elements[i], cfg) : flow_quad(e, vertical, flow[i]);
            for (auto& p : box.quad) p = {round2(p.x), round2(p.y)};
            texts.push_back(box.text);
            out.boxes.push_back(std::move(box));
        }
        for (std::size_t i = 0; i < texts.size(); ++i) out.image_label += (i ? " " : "") + texts[i];

        if (options.render) {
            out.image = Image(cfg.canvas_width, cfg.canvas_height);
            fill_gradient(out.image, bg_from, bg_to, angle);
            for (std::size_t i = 0; i < plans.size(); ++i) {
                if (curve) {
                    render_curve_element(out.image, plans[i], arc.elements[i], cfg.border_alpha);
                } else {
                    const Layer layer = flow_layer(plans[i], vertical, cfg.border_alpha);
                    composite(out.image, layer, flow[i].x, flow[i].y, plans[i].ink, plans[i].border);
                }
            }
        }
        return out;
    }
    throw PlacementError("sample could not be placed after " + std::to_string(kMaxSampleAttempts) + " attempts: " + last_error);
}

RenderSample synthesize_sample(const EngineConfig& cfg, const GlyphDb& db, const Corpus& corpus, std::uint64_t seed,
                               const SynthOptions& options) {
    Rng rng(seed);
    RenderSample s = synthesize_sample(cfg, db, corpus, rng, options);
    s.seed = seed;
    return s;
}

std::vector<ojson> label_records(const RenderSample& s, const std::string& id, const std::string& image) {
    std::vector<ojson> out;
    ojson img;
    img["id"] = id;
    img["image"] = image;
    img["language"] = "zh";
    img["level"] = "image";
    img["text"] = s.image_label;
    img["anomalous"] = s.anomalous();
    img["total"] = s.total();
    out.push_back(std::move(img));
    for (std::size_t k = 0; k < s.boxes.size(); ++k) {
        const auto& b = s.boxes[k];
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_%02zu", k);
        ojson box;
        box["id"] = id + suffix;
        box["image"] = image;
        box["language"] = "zh";
        box["level"] = "box";
        box["quad"] = ojson::array();
        for (const auto& p : b.quad) box["quad"].push_back({p.x, p.y});
        box["text"] = b.text;
        box["anomalous"] = b.anomalous;
        box["total"] = b.total;
        out.push_back(std::move(box));
    }
    return out;
}

ojson Manifest::to_json() const {
    ojson j;
    j["complete"] = complete;
    if (!complete) j["error"] = error;
    j["seed"] = seed;
    j["counts"] = {{"images", images},
                   {"anomalous_images", anomalous_images},
                   {"normal_images", images - anomalous_images},
                   {"boxes", boxes},
                   {"anomalous_boxes", anomalous_boxes},
                   {"normal_boxes", boxes - anomalous_boxes},
                   {"chars", chars},
                   {"anomalous_chars", anomalous_chars}};
    j["labels"] = "labels.jsonl";
    j["labels_sha256"] = labels_sha256;
    j["images"] = ojson::array();
    for (const auto& [file, digest] : image_digests) j["images"].push_back({{"file", file}, {"sha256", digest}});
    j["warnings"] = warnings;
    j["config"] = textpecker::to_json(config);
    return j;
}

Manifest synthesize_dataset(const EngineConfig& cfg, const GlyphDb& db, const Corpus& corpus, std::size_t n,
                            const std::filesystem::path& out_dir, unsigned threads) {
    namespace fs = std::filesystem;
    cfg.validate();
    Manifest m;
    m.seed = cfg.seed;
    m.config = cfg;
    for (char32_t c : corpus.uncovered()) m.warnings.push_back("character " + char_name(c) + " has no stroke data; skipped");

    std::string labels;
    auto write_manifest = [&] {
        m.labels_sha256 = sha256_hex(labels);
        const std::string text = m.to_json().dump(2) + "\n";
        write_file(out_dir / "manifest.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    };

    try {
        std::error_code ec;
        fs::create_directories(out_dir / "images", ec);
        if (ec) throw IoError("cannot create " + (out_dir / "images").string() + ": " + ec.message());
        std::ofstream label_file(out_dir / "labels.jsonl", std::ios::binary | std::ios::trunc);
        if (!label_file) throw IoError("cannot open " + (out_dir / "labels.jsonl").string() + " for writing");

        const std::size_t workers = std::max(1u, threads);
        struct Slot {
            RenderSample sample;
            std::vector<std::uint8_t> png;
            std::exception_ptr error;
        };
        for (std::size_t first = 0; first < n; first += workers) {
            const std::size_t count = std::min(workers, n - first);
            std::vector<Slot> slots(count);
            auto work = [&](std::size_t k) {
                try {
                    slots[k].sample = synthesize_sample(cfg, db, corpus, mix_seed(cfg.seed, first + k));
                    slots[k].png = encode_png(slots[k].sample.image);
                } catch (...) {
                    slots[k].error = std::current_exception();
                }
            };
            if (count == 1) {
                work(0);
            } else {
                std::vector<std::thread> pool;
                for (std::size_t k = 0; k < count; ++k) pool.emplace_back(work, k);
                for (auto& t : pool) t.join();
            }

            for (std::size_t k = 0; k < count; ++k) {
                if (slots[k].error) std::rethrow_exception(slots[k].error);
                char name[32];
                std::snprintf(name, sizeof name, "%06zu", first + k);
                const std::string image = std::string("images/") + name + ".png";
                write_file(out_dir / image, slots[k].png);

                std::string lines;
                for (const auto& rec : label_records(slots[k].sample, name, image)) lines += rec.dump() + "\n";
                label_file << lines;
                label_file.flush();
                if (!label_file) throw IoError("write failed for " + (out_dir / "labels.jsonl").string());
                labels += lines;

                const auto& s = slots[k].sample;
                m.image_digests.emplace_back(image, sha256_hex(slots[k].png));
                ++m.images;
                if (s.anomalous() > 0) ++m.anomalous_images;
                m.boxes += s.boxes.size();
                for (const auto& b : s.boxes) m.anomalous_boxes += b.anomalous > 0 ? 1 : 0;
                m.chars += s.total();
                m.anomalous_chars += s.anomalous();
            }
        }
        write_manifest();
    } catch (const Error& e) {
        m.complete = false;
        m.error = e.what();
        try {
            write_manifest();
        } catch (const Error&) {
        }
        throw;
    }
    return m;
}

}  // namespace textpecker
