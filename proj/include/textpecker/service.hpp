#pragma once

// Composite-reward scoring over HTTP for RL training loops. Handlers are pure functions of
// the request and an immutable configuration, so any number may run concurrently.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"

#include "textpecker/scoring.hpp"

namespace httplib {
class Server;
}

namespace textpecker {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::size_t kDefaultBatchLimit = 256;

struct ServiceConfig {
    RewardConfig defaults{};
    std::size_t batch_limit = kDefaultBatchLimit;
};

/// HTTP status plus a JSON body. Errors carry {"error": {"code", "message", ...}}: code
/// "schema" (400, with "field"), "parse" (422, with "offset"), "batch_limit" (413, with
/// "limit" and "size").
struct HandlerResult {
    int status = 200;
    nlohmann::json body;
};

class RewardService {
public:
    /// Throws ContractError for an invalid default config or a zero batch limit.
    explicit RewardService(ServiceConfig cfg = {});

    const ServiceConfig& config() const noexcept { return cfg_; }

    /// Request {"target", "prediction", "language": "en"|"zh", optional "omega",
    /// "w_semantic", "w_quality"}; response {"semantic", "quality", "reward", "unmatched",
    /// "n_anomalous", "n_total"}.
    HandlerResult handle_score(const nlohmann::json& request) const;

    /// Request {"requests": [...]}; response {"responses": [...]} in request order, with
    /// failing items replaced by their error object.
    HandlerResult handle_batch(const nlohmann::json& request) const;

    /// {"status": "ok", "version", "omega", "w_semantic", "w_quality", "batch_limit"}.
    nlohmann::json handle_health() const;

    /// Raw-body entry points used by the HTTP layer: malformed JSON is a 400.
    HandlerResult handle_score_body(std::string_view body) const;
    HandlerResult handle_batch_body(std::string_view body) const;

private:
    ServiceConfig cfg_;
};

/// POST /score, POST /score/batch, GET /healthz.
class HttpServer {
public:
    explicit HttpServer(RewardService service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to host:port (port 0 picks a free one) and returns the bound port. Throws IoError.
    int bind(const std::string& host, int port);
    /// Serves until `stop()`; blocks.
    void listen();
    void stop();
    bool running() const;

private:
    RewardService service_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace textpecker
