#include <thread>

#include "doctest.h"
#include "httplib.h"

#include "requests.hpp"
#include "textpecker/error.hpp"
#include "textpecker/service.hpp"

using namespace textpecker;
using json = nlohmann::json;

namespace {

json req(std::string target, std::string prediction, std::string lang = "en") {
    return {{"target", std::move(target)}, {"prediction", std::move(prediction)}, {"language", std::move(lang)}};
}

}  // namespace

TEST_CASE("score examples") {
    const RewardService svc;
    auto r = svc.handle_score(req("hello", "hello"));
    CHECK(r.status == 200);
    CHECK(r.body["reward"].get<double>() == 1.0);
    CHECK(r.body["n_anomalous"] == 0);

    r = svc.handle_score(req("cat", "c[[a]]t"));
    CHECK(r.status == 200);
    const auto in_process = composite_reward("cat", "c[[a]]t", Language::En);
    CHECK(r.body["reward"].get<double>() == in_process.reward);
    CHECK(r.body["reward"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.body["semantic"].get<double>() == in_process.semantic);
    CHECK(r.body["quality"].get<double>() == in_process.quality);
    CHECK(r.body["unmatched"] == in_process.unmatched_count);
    CHECK(r.body["n_anomalous"] == 1);
    CHECK(r.body["n_total"] == 3);
}

TEST_CASE("marker parse failure is a 422 with offset") {
    const RewardService svc;
    const auto r = svc.handle_score(req("x", "ab[[x"));
    CHECK(r.status == 422);
    CHECK(r.body["error"]["code"] == "parse");
    CHECK(r.body["error"]["offset"] == 2);
}

TEST_CASE("schema violations name the field") {
    const RewardService svc;
    auto field_of = [&](const json& j) {
        const auto r = svc.handle_score(j);
        CHECK(r.status == 400);
        CHECK(r.body["error"]["code"] == "schema");
        return r.body["error"]["field"].get<std::string>();
    };
    CHECK(field_of({{"target", "a"}, {"language", "en"}}) == "prediction");
    CHECK(field_of({{"target", 3}, {"prediction", "a"}, {"language", "en"}}) == "target");
    CHECK(field_of(req("a", "a", "fr")) == "language");
    json j = req("a", "a");
    j["omega"] = -1;
    CHECK(field_of(j) == "omega");
    j = req("a", "a");
    j["w_semantic"] = 0.7;
    CHECK(field_of(j) == "w_semantic");
    j["w_quality"] = "0.3";
    CHECK(field_of(j) == "w_quality");
    j = req("a", "a");
    j["extra"] = true;
    CHECK(field_of(j) == "extra");
    CHECK(field_of(json::array()) == "");
    CHECK(svc.handle_score_body("{not json").status == 400);
}

TEST_CASE("overrides match in-process scoring") {
    const RewardService svc;
    json j = req("the quick brown fox", "the qu[[i]]ck brwn [[f]]ox");
    j["omega"] = 1.0;
    j["w_semantic"] = 0.25;
    j["w_quality"] = 0.75;
    const auto r = svc.handle_score(j);
    REQUIRE(r.status == 200);
    const auto ref = composite_reward("the quick brown fox", "the qu[[i]]ck brwn [[f]]ox", Language::En, {1.0, 0.25, 0.75});
    CHECK(r.body["reward"].get<double>() == ref.reward);
    CHECK(r.body["quality"].get<double>() == ref.quality);

    const RewardService evaluation({RewardConfig::evaluation()});
    const auto e = evaluation.handle_score(req("the quick brown fox", "the qu[[i]]ck brwn [[f]]ox"));
    CHECK(e.body["quality"] == r.body["quality"]);
}

TEST_CASE("chinese request") {
    const RewardService svc;
    const auto r = svc.handle_score(req("文本异常", "文[[本]]异常", "zh"));
    REQUIRE(r.status == 200);
    CHECK(r.body["n_total"] == 4);
    CHECK(r.body["reward"].get<double>() == composite_reward("文本异常", "文[[本]]异常", Language::Zh).reward);
}

TEST_CASE("batch") {
    const RewardService svc;
    SUBCASE("order and equivalence") {
        const json batch = {{"requests", {req("hello", "hello"), req("cat", "c[[a]]t")}}};
        const auto r = svc.handle_batch(batch);
        REQUIRE(r.status == 200);
        REQUIRE(r.body["responses"].size() == 2);
        CHECK(r.body["responses"][0] == svc.handle_score(req("hello", "hello")).body);
        CHECK(r.body["responses"][1] == svc.handle_score(req("cat", "c[[a]]t")).body);
    }
    SUBCASE("per-item errors stay in place") {
        const json batch = {{"requests", {req("hello", "hello"), req("x", "[[x"), {{"target", "a"}}}}};
        const auto r = svc.handle_batch(batch);
        REQUIRE(r.status == 200);
        const auto& out = r.body["responses"];
        CHECK(out[0]["reward"].get<double>() == 1.0);
        CHECK(out[1]["error"]["code"] == "parse");
        CHECK(out[1]["error"]["offset"] == 0);
        CHECK(out[2]["error"]["field"] == "requests[2].prediction");
    }
    SUBCASE("limit") {
        json items = json::array();
        for (int i = 0; i < 257; ++i) items.push_back(req("a", "a"));
        auto r = svc.handle_batch({{"requests", items}});
        CHECK(r.status == 413);
        CHECK(r.body["error"]["limit"] == 256);
        CHECK(r.body["error"]["size"] == 257);
        items.erase(items.begin());
        CHECK(svc.handle_batch({{"requests", items}}).status == 200);

        const RewardService small({RewardConfig{}, 2});
        r = small.handle_batch({{"requests", {req("a", "a"), req("a", "a"), req("a", "a")}}});
        CHECK(r.status == 413);
        CHECK(r.body["error"]["limit"] == 2);
    }
    SUBCASE("malformed batches") {
        CHECK(svc.handle_batch({{"requests", json::array()}}).status == 400);
        CHECK(svc.handle_batch({{"requests", 1}}).status == 400);
        CHECK(svc.handle_batch(json::array()).status == 400);
        CHECK(svc.handle_batch_body("[").status == 400);
    }
}

TEST_CASE("health") {
    const RewardService svc;
    const json h = svc.handle_health();
    CHECK(h["status"] == "ok");
    CHECK(h["omega"] == 5.0);
    CHECK(h["w_semantic"] == 0.5);
    CHECK(h["w_quality"] == 0.5);
    CHECK(h["version"] == std::string(kVersion));
    CHECK(svc.handle_health() == h);
    CHECK(RewardService({RewardConfig::evaluation()}).handle_health()["omega"] == 1.0);
}

TEST_CASE("invalid service config") {
    CHECK_THROWS_AS(RewardService({RewardConfig{0.0, 0.5, 0.5}}), ContractError);
    CHECK_THROWS_AS(RewardService({RewardConfig{}, 0}), ContractError);
}

TEST_CASE("concurrent handlers agree with sequential execution") {
    const RewardService svc;
    Rng rng(11);
    std::vector<json> requests;
    for (int i = 0; i < 400; ++i) requests.push_back(fixtures::random_request(rng, 24));
    std::vector<json> sequential;
    for (const auto& r : requests) sequential.push_back(svc.handle_score(r).body);

    std::vector<json> concurrent(requests.size());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < 4; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < requests.size(); i += 4) concurrent[i] = svc.handle_score(requests[i]).body;
        });
    for (auto& t : pool) t.join();
    CHECK(concurrent == sequential);
}

TEST_CASE("http endpoints") {
    HttpServer server{RewardService{}};
    const int port = server.bind("127.0.0.1", 0);
    std::thread loop([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/healthz");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["status"] == "ok");

    auto score = client.Post("/score", req("cat", "c[[a]]t").dump(), "application/json");
    REQUIRE(score);
    CHECK(score->status == 200);
    CHECK(json::parse(score->body)["n_anomalous"] == 1);

    auto bad = client.Post("/score", req("cat", "c[[at").dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);

    auto garbage = client.Post("/score", "nope", "application/json");
    REQUIRE(garbage);
    CHECK(garbage->status == 400);

    const json batch = {{"requests", {req("hello", "hello"), req("cat", "c[[a]]t")}}};
    auto b = client.Post("/score/batch", batch.dump(), "application/json");
    REQUIRE(b);
    CHECK(b->status == 200);
    CHECK(json::parse(b->body)["responses"].size() == 2);

    HttpServer clash{RewardService{}};
    CHECK_THROWS_AS(clash.bind("127.0.0.1", port), IoError);

    server.stop();
    loop.join();
}
