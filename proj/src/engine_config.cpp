#include "textpecker/engine_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "textpecker/error.hpp"

namespace textpecker {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kTransformKinds> kTransformNames{"persp_x", "persp_y", "trap_x", "trap_y",
                                                                         "skew_x",  "skew_y",  "rotate"};

double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw SchemaError("field '" + field + "' must be a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& field) {
    const double d = number(v, field);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw SchemaError("field '" + field + "' must be an integer");
    return static_cast<int>(d);
}

Range range(const json& v, const std::string& field) {
    if (v.is_number()) return {v.get<double>(), v.get<double>()};
    if (!v.is_array() || v.size() != 2) throw SchemaError("field '" + field + "' must be [lo, hi] or a number");
    return {number(v[0], field), number(v[1], field)};
}

IntRange int_range(const json& v, const std::string& field) {
    if (v.is_number()) return {integer(v, field), integer(v, field)};
    if (!v.is_array() || v.size() != 2) throw SchemaError("field '" + field + "' must be [lo, hi] or an integer");
    return {integer(v[0], field), integer(v[1], field)};
}

void check_prob(double p, const char* field) {
    if (!(p >= 0.0 && p <= 1.0)) throw SchemaError(std::string("field '") + field + "' must lie in [0, 1]");
}

void check_range(const Range& r, const char* field, double min, double max) {
    if (!(r.lo <= r.hi) || !(r.lo >= min) || !(r.hi <= max))
        throw SchemaError(std::string("field '") + field + "' must satisfy " + std::to_string(min) + " <= lo <= hi <= " +
                          std::to_string(max));
}

void check_range(const IntRange& r, const char* field, int min) {
    if (r.lo > r.hi || r.lo < min)
        throw SchemaError(std::string("field '") + field + "' must satisfy " + std::to_string(min) + " <= lo <= hi");
}

json to_json(const Range& r) { return json::array({r.lo, r.hi}); }
json to_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

}  // namespace

std::string_view to_string(TransformKind kind) noexcept { return kTransformNames[static_cast<std::size_t>(kind)]; }

void EngineConfig::validate() const {
    if (margin_px < 0) throw SchemaError("field 'margin_px' must be non-negative");
    if (canvas_width < 2 * margin_px + 8 || canvas_height < 2 * margin_px + 8)
        throw SchemaError("canvas must exceed twice the margin by at least 8 px");
    for (auto [p, name] : {std::pair{vertical_prob, "vertical_prob"}, {offset_prob, "offset_prob"}, {flow_prob, "flow_prob"},
                           {curve_prob, "curve_prob"}, {style_prob, "style_prob"}, {border_alpha, "border_alpha"},
                           {transform_prob, "transform_prob"}, {gradient_prob, "gradient_prob"}, {anomaly_prob, "anomaly_prob"},
                           {op_probs.del, "op_probs.delete"}, {op_probs.ins, "op_probs.insert"}, {op_probs.swap, "op_probs.swap"}})
        check_prob(p, name);
    if (std::abs(flow_prob + curve_prob - 1.0) > 1e-9) throw SchemaError("flow_prob + curve_prob must equal 1");

    check_range(elements_per_sample, "elements_per_sample", 1);
    check_range(text_len, "text_len", 1);
    check_range(font_size_px, "font_size_px", 8);
    check_range(h_spacing_px, "h_spacing_px", 0);
    check_range(line_spacing_px, "line_spacing_px", 0);
    check_range(offset_px, "offset_px", 0);
    check_range(length_ratio, "length_ratio", 1e-9, 1.0);
    check_range(curve_sag_ratio, "curve_sag_ratio", 0.0, 0.5);
    check_range(border_size_ratio, "border_size_ratio", 0.0, 1.0);
    check_range(persp_x_percent, "persp_x_percent", 1e-9, 1.0);
    check_range(persp_y_percent, "persp_y_percent", 1e-9, 1.0);
    check_range(trap_x_percent, "trap_x_percent", 1e-9, 1.0);
    check_range(trap_y_percent, "trap_y_percent", 1e-9, 1.0);
    check_range(skew_x_deg, "skew_x_deg", 0.0, 60.0);
    check_range(skew_y_deg, "skew_y_deg", 0.0, 60.0);
    check_range(rotate_deg, "rotate_deg", 0.0, 180.0);
    check_range(stroke_width_ratio, "stroke_width_ratio", 1e-9, 0.5);
    check_range(glyph_scale, "glyph_scale", 0.1, 1.0);

    double total = 0.0;
    for (std::size_t i = 0; i < kTransformKinds; ++i) {
        if (!(transform_weights[i] >= 0.0) || !std::isfinite(transform_weights[i]))
            throw SchemaError("transform weight '" + std::string(kTransformNames[i]) + "' must be a non-negative number");
        total += transform_weights[i];
    }
    if (!(total > 0.0)) throw SchemaError("transform weights must not all be zero");
}

EngineConfig engine_config_from_json(const json& j, const EngineConfig& base) {
    if (!j.is_object()) throw SchemaError("engine config must be a map");
    EngineConfig c = base;

    using Setter = std::function<void(const json&, const std::string&)>;
    auto prob = [](double& dst) -> Setter { return [&dst](const json& v, const std::string& f) { dst = number(v, f); }; };
    auto rng = [](Range& dst) -> Setter { return [&dst](const json& v, const std::string& f) { dst = range(v, f); }; };
    auto irng = [](IntRange& dst) -> Setter { return [&dst](const json& v, const std::string& f) { dst = int_range(v, f); }; };
    auto intg = [](int& dst) -> Setter { return [&dst](const json& v, const std::string& f) { dst = integer(v, f); }; };

    const std::map<std::string, Setter, std::less<>> fields{
        {"canvas_width", intg(c.canvas_width)},
        {"canvas_height", intg(c.canvas_height)},
        {"vertical_prob", prob(c.vertical_prob)},
        {"elements_per_sample", irng(c.elements_per_sample)},
        {"text_len", irng(c.text_len)},
        {"font_size_px", irng(c.font_size_px)},
        {"h_spacing_px", irng(c.h_spacing_px)},
        {"line_spacing_px", irng(c.line_spacing_px)},
        {"length_ratio", rng(c.length_ratio)},
        {"offset_prob", prob(c.offset_prob)},
        {"offset_px", irng(c.offset_px)},
        {"margin_px", intg(c.margin_px)},
        {"flow_prob", prob(c.flow_prob)},
        {"curve_prob", prob(c.curve_prob)},
        {"curve_sag_ratio", rng(c.curve_sag_ratio)},
        {"style_prob", prob(c.style_prob)},
        {"border_size_ratio", rng(c.border_size_ratio)},
        {"border_alpha", prob(c.border_alpha)},
        {"transform_prob", prob(c.transform_prob)},
        {"persp_x_percent", rng(c.persp_x_percent)},
        {"persp_y_percent", rng(c.persp_y_percent)},
        {"trap_x_percent", rng(c.trap_x_percent)},
        {"trap_y_percent", rng(c.trap_y_percent)},
        {"skew_x_deg", rng(c.skew_x_deg)},
        {"skew_y_deg", rng(c.skew_y_deg)},
        {"rotate_deg", rng(c.rotate_deg)},
        {"stroke_width_ratio", rng(c.stroke_width_ratio)},
        {"glyph_scale", rng(c.glyph_scale)},
        {"gradient_prob", prob(c.gradient_prob)},
        {"anomaly_prob", prob(c.anomaly_prob)},
        {"transform_weights",
         [&c](const json& v, const std::string&) {
             if (!v.is_object()) throw SchemaError("field 'transform_weights' must be a map");
             for (const auto& [key, w] : v.items()) {
                 std::size_t i = 0;
                 while (i < kTransformKinds && kTransformNames[i] != key) ++i;
                 if (i == kTransformKinds) throw SchemaError("unknown transform '" + key + "' in 'transform_weights'");
                 c.transform_weights[i] = number(w, "transform_weights." + key);
             }
         }},
        {"op_probs",
         [&c](const json& v, const std::string&) {
             if (v.is_array() && v.size() == 3) {
                 c.op_probs = {number(v[0], "op_probs"), number(v[1], "op_probs"), number(v[2], "op_probs")};
                 return;
             }
             if (!v.is_object()) throw SchemaError("field 'op_probs' must be [delete, insert, swap] or a map");
             for (const auto& [key, p] : v.items()) {
                 if (key == "delete") c.op_probs.del = number(p, "op_probs.delete");
                 else if (key == "insert") c.op_probs.ins = number(p, "op_probs.insert");
                 else if (key == "swap") c.op_probs.swap = number(p, "op_probs.swap");
                 else throw SchemaError("unknown operator '" + key + "' in 'op_probs'");
             }
         }},
        {"seed",
         [&c](const json& v, const std::string&) {
             if (!v.is_number_unsigned()) throw SchemaError("field 'seed' must be a non-negative integer");
             c.seed = v.get<std::uint64_t>();
         }},
    };

    for (const auto& [key, value] : j.items()) {
        auto it = fields.find(key);
        if (it == fields.end()) throw SchemaError("unknown field '" + key + "'");
        it->second(value, key);
    }
    c.validate();
    return c;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open engine config " + path.string());
    const json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SchemaError("engine config " + path.string() + " is not valid JSON");
    return engine_config_from_json(j);
}

nlohmann::ordered_json to_json(const EngineConfig& c) {
    nlohmann::ordered_json j;
    j["canvas_width"] = c.canvas_width;
    j["canvas_height"] = c.canvas_height;
    j["vertical_prob"] = c.vertical_prob;
    j["elements_per_sample"] = to_json(c.elements_per_sample);
    j["text_len"] = to_json(c.text_len);
    j["font_size_px"] = to_json(c.font_size_px);
    j["h_spacing_px"] = to_json(c.h_spacing_px);
    j["line_spacing_px"] = to_json(c.line_spacing_px);
    j["length_ratio"] = to_json(c.length_ratio);
    j["offset_prob"] = c.offset_prob;
    j["offset_px"] = to_json(c.offset_px);
    j["margin_px"] = c.margin_px;
    j["flow_prob"] = c.flow_prob;
    j["curve_prob"] = c.curve_prob;
    j["curve_sag_ratio"] = to_json(c.curve_sag_ratio);
    j["style_prob"] = c.style_prob;
    j["border_size_ratio"] = to_json(c.border_size_ratio);
    j["border_alpha"] = c.border_alpha;
    j["transform_prob"] = c.transform_prob;
    nlohmann::ordered_json weights;
    for (std::size_t i = 0; i < kTransformKinds; ++i) weights[std::string(kTransformNames[i])] = c.transform_weights[i];
    j["transform_weights"] = weights;
    j["persp_x_percent"] = to_json(c.persp_x_percent);
    j["persp_y_percent"] = to_json(c.persp_y_percent);
    j["trap_x_percent"] = to_json(c.trap_x_percent);
    j["trap_y_percent"] = to_json(c.trap_y_percent);
    j["skew_x_deg"] = to_json(c.skew_x_deg);
    j["skew_y_deg"] = to_json(c.skew_y_deg);
    j["rotate_deg"] = to_json(c.rotate_deg);
    j["stroke_width_ratio"] = to_json(c.stroke_width_ratio);
    j["glyph_scale"] = to_json(c.glyph_scale);
    j["gradient_prob"] = c.gradient_prob;
    j["anomaly_prob"] = c.anomaly_prob;
    j["op_probs"] = {{"delete", c.op_probs.del}, {"insert", c.op_probs.ins}, {"swap", c.op_probs.swap}};
    j["seed"] = c.seed;
    return j;
}

}  // namespace textpecker
