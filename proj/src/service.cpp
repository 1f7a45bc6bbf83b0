#include "textpecker/service.hpp"

#include <cmath>
#include <optional>

#include "httplib.h"

#include "textpecker/error.hpp"

namespace textpecker {

namespace {

using json = nlohmann::json;

struct FieldError {
    std::string field;
    std::string message;
};

json error_body(std::string code, const std::string& message) {
    return {{"error", {{"code", std::move(code)}, {"message", message}}}};
}

HandlerResult schema_error(const std::string& field, const std::string& message) {
    json body = error_body("schema", message);
    body["error"]["field"] = field;
    return {400, std::move(body)};
}

HandlerResult parse_error(const ParseError& e) {
    json body = error_body("parse", e.what());
    body["error"]["offset"] = e.offset();
    return {422, std::move(body)};
}

const std::string& require_string(const json& req, const char* field) {
    const auto it = req.find(field);
    if (it == req.end()) throw FieldError{field, std::string("missing required field '") + field + "'"};
    if (!it->is_string()) throw FieldError{field, std::string("field '") + field + "' must be a string"};
    return it->get_ref<const std::string&>();
}

std::optional<double> optional_number(const json& req, const char* field) {
    const auto it = req.find(field);
    if (it == req.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw FieldError{field, std::string("field '") + field + "' must be a number"};
    return it->get<double>();
}

RewardConfig apply_overrides(const json& req, const RewardConfig& defaults) {
    RewardConfig cfg = defaults;
    const auto omega = optional_number(req, "omega");
    const auto ws = optional_number(req, "w_semantic");
    const auto wq = optional_number(req, "w_quality");
    if (omega) cfg.omega = *omega;
    if (ws) cfg.w_semantic = *ws;
    if (wq) cfg.w_quality = *wq;
    if (!(cfg.omega > 0.0) || !std::isfinite(cfg.omega)) throw FieldError{"omega", "omega must be a positive finite number"};
    if (!(cfg.w_semantic >= 0.0 && cfg.w_semantic <= 1.0)) throw FieldError{"w_semantic", "w_semantic must lie in [0, 1]"};
    if (!(cfg.w_quality >= 0.0 && cfg.w_quality <= 1.0)) throw FieldError{"w_quality", "w_quality must lie in [0, 1]"};
    try {
        cfg.validate();
    } catch (const ContractError& e) {
        throw FieldError{wq ? "w_quality" : "w_semantic", e.what()};
    }
    return cfg;
}

HandlerResult score_one(const json& req, const RewardConfig& defaults) {
    try {
        if (!req.is_object()) throw FieldError{"", "request must be an object"};
        for (const auto& [key, value] : req.items()) {
            if (key != "target" && key != "prediction" && key != "language" && key != "omega" && key != "w_semantic" &&
                key != "w_quality")
                throw FieldError{key, "unknown field '" + key + "'"};
        }
        const std::string& target = require_string(req, "target");
        const std::string& prediction = require_string(req, "prediction");
        Language lang;
        try {
            lang = parse_language(require_string(req, "language"));
        } catch (const SchemaError& e) {
            throw FieldError{"language", e.what()};
        }
        const RewardConfig cfg = apply_overrides(req, defaults);

        const ScoreReport r = composite_reward(target, prediction, lang, cfg);
        return {200,
                {{"semantic", r.semantic},
                 {"quality", r.quality},
                 {"reward", r.reward},
                 {"unmatched", r.unmatched_count},
                 {"n_anomalous", r.counts.anomalous},
                 {"n_total", r.counts.total}}};
    } catch (const FieldError& e) {
        return schema_error(e.field, e.message);
    } catch (const ParseError& e) {
        return parse_error(e);
    } catch (const Error& e) {
        return schema_error("", e.what());
    }
}

std::optional<json> parse_body(std::string_view body, HandlerResult& failure) {
    json j = json::parse(body.begin(), body.end(), nullptr, false);
    if (j.is_discarded()) {
        failure = schema_error("", "request body is not valid JSON");
        return std::nullopt;
    }
    return j;
}

}  // namespace

RewardService::RewardService(ServiceConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.defaults.validate();
    if (cfg_.batch_limit == 0) throw ContractError("batch limit must be at least 1");
}

HandlerResult RewardService::handle_score(const json& request) const { return score_one(request, cfg_.defaults); }

HandlerResult RewardService::handle_batch(const json& request) const {
    if (!request.is_object()) return schema_error("", "batch request must be an object");
    for (const auto& [key, value] : request.items())
        if (key != "requests") return schema_error(key, "unknown field '" + key + "'");
    const auto it = request.find("requests");
    if (it == request.end()) return schema_error("requests", "missing required field 'requests'");
    if (!it->is_array()) return schema_error("requests", "field 'requests' must be an array");
    const std::size_t size = it->size();
    if (size == 0) return schema_error("requests", "batch must contain at least one request");
    if (size > cfg_.batch_limit) {
        json body = error_body("batch_limit", "batch of " + std::to_string(size) + " exceeds the limit of " +
                                                  std::to_string(cfg_.batch_limit));
        body["error"]["limit"] = cfg_.batch_limit;
        body["error"]["size"] = size;
        return {413, std::move(body)};
    }

    json responses = json::array();
    for (std::size_t i = 0; i < size; ++i) {
        HandlerResult r = score_one((*it)[i], cfg_.defaults);
        if (r.status != 200 && r.body["error"].contains("field")) {
            const std::string field = r.body["error"]["field"];
            r.body["error"]["field"] = "requests[" + std::to_string(i) + "]" + (field.empty() ? "" : "." + field);
        }
        responses.push_back(std::move(r.body));
    }
    return {200, {{"responses", std::move(responses)}}};
}

json RewardService::handle_health() const {
    return {{"status", "ok"},
            {"version", std::string(kVersion)},
            {"omega", cfg_.defaults.omega},
            {"w_semantic", cfg_.defaults.w_semantic},
            {"w_quality", cfg_.defaults.w_quality},
            {"batch_limit", cfg_.batch_limit}};
}

HandlerResult RewardService::handle_score_body(std::string_view body) const {
    HandlerResult failure;
    const auto j = parse_body(body, failure);
    return j ? handle_score(*j) : failure;
}

HandlerResult RewardService::handle_batch_body(std::string_view body) const {
    HandlerResult failure;
    const auto j = parse_body(body, failure);
    return j ? handle_batch(*j) : failure;
}

HttpServer::HttpServer(RewardService service) : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
    constexpr const char* kType = "application/json";
    // SO_REUSEADDR only: a port held by another listener must fail to bind.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    server_->set_tcp_nodelay(true);
    auto reply = [](httplib::Response& res, const HandlerResult& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), kType);
    };
    server_->Post("/score", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service_.handle_score_body(req.body));
    });
    server_->Post("/score/batch", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, service_.handle_batch_body(req.body));
    });
    server_->Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(service_.handle_health().dump(), kType);
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpServer::listen() {
    if (!server_->listen_after_bind()) throw IoError("server stopped with an error");
}

void HttpServer::stop() {
    if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace textpecker
