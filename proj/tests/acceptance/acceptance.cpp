// Runs the ten acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "oracles.hpp"
#include "requests.hpp"
#include "textpecker/edit_distance.hpp"
#include "textpecker/error.hpp"
#include "textpecker/hungarian.hpp"
#include "textpecker/marked_text.hpp"
#include "textpecker/metrics.hpp"
#include "textpecker/raster.hpp"
#include "textpecker/renderer.hpp"
#include "textpecker/scoring.hpp"
#include "textpecker/service.hpp"
#include "textpecker/stroke.hpp"
#include "textpecker/utf8.hpp"

using namespace textpecker;
namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail.clear();
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& s) {
        if (!pass) return;
        if (!detail.empty()) detail += ", ";
        detail += s;
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("textpecker_acceptance_" + std::to_string(getpid()) + "_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const GlyphDb& glyph_db() {
    static const GlyphDb db = GlyphDb::load(fs::path(TEXTPECKER_DATA_DIR) / "strokes.jsonl");
    return db;
}

const Corpus& corpus() {
    static const Corpus c = Corpus::load(fs::path(TEXTPECKER_DATA_DIR) / "corpus_zh.txt", glyph_db());
    return c;
}

// ---- 1

Outcome formula_fidelity() {
    Outcome o;
    o.require(std::abs(structural_score(1, 10, 5) - 0.5) <= 1e-12, "structural_score(1,10,5) != 0.5");
    o.require(std::abs(structural_score(3, 10, 5) - 0.0) <= 1e-12, "structural_score(3,10,5) != 0");
    o.require(std::abs(structural_score(2, 8, 1) - 0.75) <= 1e-12, "structural_score(2,8,1) != 0.75");
    o.require(RewardConfig{}.omega == 5.0 && RewardConfig::evaluation().omega == 1.0, "default omegas are not 5 and 1");
    o.note("0.5, 0.0, 0.75");
    return o;
}

// ---- 2

Outcome hungarian_oracle() {
    Outcome o;
    Rng rng(20240601);
    std::size_t mismatches = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        const std::size_t rows = 1 + rng.index(7), cols = 1 + rng.index(7);
        CostMatrix m(rows, cols);
        std::vector<std::vector<double>> c(rows, std::vector<double>(cols));
        // Small integer ranges force ties; dyadic fractions keep every sum exact.
        const bool ties = iter % 2 == 0;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t k = 0; k < cols; ++k)
                m(r, k) = c[r][k] = ties ? static_cast<double>(rng.integer(0, 3)) : static_cast<double>(rng.integer(0, 4096)) / 64.0;
        const auto got = hungarian_match(m);
        const auto want = oracle::brute_force_assignment(c);
        if (got.size() != std::min(rows, cols) || assignment_cost(m, got) != want.cost) ++mismatches;
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " of 1000 matrices disagree with brute force");
    o.note("1000/1000 costs equal the brute-force minimum");
    return o;
}

// ---- 3

Outcome ned_oracle() {
    Outcome o;
    const double kitten = ned(std::u32string_view(U"kitten"), std::u32string_view(U"sitting"));
    o.require(std::abs(kitten - 3.0 / 7.0) <= 1e-12, "ned(kitten, sitting) = " + fmt("%.17g", kitten));
    Rng rng(99);
    static constexpr std::u32string_view kAlphabets[] = {U"ab", U"abcdef", U"文本异常检测", U"abcdefghijklmnopqrstuvwxyz"};
    std::size_t bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto alphabet = kAlphabets[i % 4];
        const auto a = oracle::random_string(rng, 24, alphabet), b = oracle::random_string(rng, 24, alphabet);
        if (levenshtein(a, b) != oracle::levenshtein(a, b) || ned(a, b) != oracle::ned(a, b)) ++bad;
    }
    o.require(bad == 0, std::to_string(bad) + " of 1000 pairs differ from the DP oracle");
    o.note("3/7 and 1000/1000 pairs exact");
    return o;
}

// ---- 4

// Exhaustive S_E: every matching of cardinality min(|T|, |P|), distances summed over a common
// denominator so the minimum is exact.
double exhaustive_semantic(const std::vector<std::u32string>& t, const std::vector<std::u32string>& p) {
    const std::size_t longest = std::max(t.size(), p.size());
    if (longest == 0) return 1.0;
    std::uint64_t den = 1;
    for (const auto& a : t)
        for (const auto& b : p)
            if (const std::size_t len = std::max(a.size(), b.size())) den = std::lcm(den, static_cast<std::uint64_t>(len));
    auto scaled = [&](const std::u32string& a, const std::u32string& b) -> std::uint64_t {
        const std::size_t len = std::max(a.size(), b.size());
        return len ? oracle::levenshtein(a, b) * (den / len) : 0;
    };
    const bool t_small = t.size() <= p.size();
    const auto& small = t_small ? t : p;
    const auto& large = t_small ? p : t;
    std::vector<std::size_t> perm(large.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::uint64_t best = UINT64_MAX;
    do {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < small.size(); ++i) sum += scaled(small[i], large[perm[i]]);
        best = std::min(best, sum);
        std::reverse(perm.begin() + static_cast<std::ptrdiff_t>(small.size()), perm.end());
    } while (std::next_permutation(perm.begin(), perm.end()));
    const std::uint64_t whole = den * longest;
    const std::uint64_t lost = best + den * (large.size() - small.size());
    return lost >= whole ? 0.0 : static_cast<double>(whole - lost) / static_cast<double>(whole);
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& w : v) s += (s.empty() ? "" : " ") + w;
    return s;
}

Outcome semantic_worked_case() {
    Outcome o;
    const std::vector<std::string> hw{"hello", "world"};
    const double got = semantic_score(hw, parse_marked("hallo", Language::En)).score;
    const double want = exhaustive_semantic({U"hello", U"world"}, {U"hallo"});
    o.require(std::abs(got - 0.4) <= 1e-12, "S_E(hello world | hallo) = " + fmt("%.17g", got));
    o.require(std::abs(want - 0.4) <= 1e-12, "exhaustive enumeration gives " + fmt("%.17g", want));

    Rng rng(31337);
    static constexpr std::u32string_view kAlphabet = U"abcde";
    std::size_t oracle_bad = 0, perm_bad = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<std::string> t, p;
        std::vector<std::u32string> tu, pu;
        for (std::size_t i = 0, n = rng.index(7); i < n; ++i) {
            tu.push_back(U"w" + oracle::random_string(rng, 6, kAlphabet));
            t.push_back(utf8::encode(tu.back()));
        }
        for (std::size_t i = 0, n = rng.index(7); i < n; ++i) {
            pu.push_back(U"w" + oracle::random_string(rng, 6, kAlphabet));
            p.push_back(utf8::encode(pu.back()));
        }
        const double base = semantic_score(t, parse_marked(join(p), Language::En)).score;
        if (std::abs(base - exhaustive_semantic(tu, pu)) > 1e-12) ++oracle_bad;
        auto t2 = t, p2 = p;
        for (std::size_t i = t2.size(); i > 1; --i) std::swap(t2[i - 1], t2[rng.index(i)]);
        for (std::size_t i = p2.size(); i > 1; --i) std::swap(p2[i - 1], p2[rng.index(i)]);
        if (semantic_score(t2, parse_marked(join(p2), Language::En)).score != base) ++perm_bad;
    }
    o.require(oracle_bad == 0, std::to_string(oracle_bad) + " random cases differ from exhaustive enumeration");
    o.require(perm_bad == 0, std::to_string(perm_bad) + " of 1000 shuffles changed the score");
    o.note("S_E = 0.4, 1000/1000 shuffles exact, 1000/1000 random cases match enumeration");
    return o;
}

// ---- 5

std::string with_anomalies(std::size_t k) {
    std::string s;
    for (std::size_t i = 0; i < k; ++i) s += "[[a]]";
    return s + "bc";
}

Outcome tsap_rule() {
    Outcome o;
    const std::pair<std::size_t, std::size_t> fixture[] = {{2, 2}, {2, 5}, {0, 1}, {1, 0}, {0, 0}};
    std::vector<EvalRecord> records;
    for (const auto& [g, p] : fixture) {
        EvalRecord r;
        r.id = std::to_string(records.size());
        r.gt = parse_marked(with_anomalies(g), Language::En);
        r.pred = parse_marked(with_anomalies(p), Language::En);
        records.push_back(std::move(r));
    }
    const auto m = tsap_metrics(records, 0.7);
    o.require(m.precision == 1.0 / 3.0 && m.recall == 1.0 / 3.0 && m.f1 == 1.0 / 3.0,
              "P/R/F1 = " + fmt("%.17g", m.precision) + "/" + fmt("%.17g", m.recall) + "/" + fmt("%.17g", m.f1));
    std::size_t bad = 0;
    for (std::size_t g = 1; g <= 100; ++g) bad += tsap_match(g, g, 0.7) ? 0 : 1;
    o.require(bad == 0, std::to_string(bad) + " counts fail tsap_match(g, g, 0.7)");
    o.note("P = R = F1 = 1/3, g = g matches for 1..100");
    return o;
}

// ---- 6

bool near(Point a, Point b, double tol) { return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol; }

bool inside(const Polyline& s, double dx, double dy, double em) {
    return std::all_of(s.points.begin(), s.points.end(), [&](Point p) {
        return p.x + dx >= 0.0 && p.x + dx <= em && p.y + dy >= 0.0 && p.y + dy <= em;
    });
}

Outcome stroke_operators() {
    Outcome o;
    const GlyphDb& db = glyph_db();
    const auto& chars = db.characters();
    Rng rng(6);

    std::size_t count_bad = 0, swap_bad = 0, restore_bad = 0, swaps = 0, clamped = 0;
    for (int iter = 0; iter < 2000; ++iter) {
        const StrokeGlyph& g = *db.find(chars[rng.index(chars.size())]);
        const std::size_t n = g.strokes.size();
        if (n >= 2) {
            const std::size_t k = static_cast<std::size_t>(rng.integer(1, static_cast<std::int64_t>(n - 1)));
            count_bad += op_delete(g, rng, k).glyph.strokes.size() == n - k ? 0 : 1;
            count_bad += op_swap(g, rng).glyph.strokes.size() == n ? 0 : 1;
        }
        count_bad += op_insert(g, db, rng).glyph.strokes.size() == n + 1 ? 0 : 1;

        if (n < 2) continue;
        const std::size_t i = rng.index(n);
        std::size_t j = rng.index(n - 1);
        if (j >= i) ++j;
        const Point ci = centroid(g.strokes[i]), cj = centroid(g.strokes[j]);
        // Moves that would leave the em square are clamped; exchange is exact only without clamping.
        if (!inside(g.strokes[i], cj.x - ci.x, cj.y - ci.y, g.em) || !inside(g.strokes[j], ci.x - cj.x, ci.y - cj.y, g.em)) {
            ++clamped;
            continue;
        }
        ++swaps;
        const auto once = swap_strokes(g, i, j);
        if (!near(centroid(once.glyph.strokes[i]), cj, 1e-6) || !near(centroid(once.glyph.strokes[j]), ci, 1e-6)) ++swap_bad;
        const auto twice = swap_strokes(once.glyph, i, j);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t p = 0; p < g.strokes[s].points.size(); ++p)
                if (!near(twice.glyph.strokes[s].points[p], g.strokes[s].points[p], 1e-6)) {
                    ++restore_bad;
                    s = n;
                    break;
                }
    }
    o.require(count_bad == 0, std::to_string(count_bad) + " stroke-count deltas wrong");
    o.require(swap_bad == 0, std::to_string(swap_bad) + " swaps did not exchange centroids");
    o.require(restore_bad == 0, std::to_string(restore_bad) + " double swaps did not restore the glyph");

    std::array<std::size_t, 3> applied{}, feasible{};
    for (int draw = 0; draw < 10000; ++draw) {
        const StrokeGlyph& g = *db.find(chars[rng.index(chars.size())]);
        const auto r = compose_anomaly(g, db, rng, {0.4, 0.4, 0.4});
        for (std::size_t k = 0; k < 3; ++k) feasible[k] += r.feasible[k];
        for (const auto& op : r.log.operations) ++applied[static_cast<std::size_t>(op.kind)];
    }
    std::string rates;
    for (std::size_t k = 0; k < 3; ++k) {
        const double rate = static_cast<double>(applied[k]) / static_cast<double>(feasible[k]);
        o.require(std::abs(rate - 0.4) <= 0.02, std::string(to_string(static_cast<EditKind>(k))) + " rate " + fmt("%.4f", rate));
        rates += (k ? "/" : "") + fmt("%.3f", rate);
    }
    o.note("deltas exact, " + std::to_string(swaps) + " swaps exchanged and restored (" + std::to_string(clamped) +
           " clamped pairs skipped), rates del/ins/swap " + rates);
    return o;
}

// ---- 7

Outcome renderer_bookkeeping() {
    Outcome o;
    EngineConfig cfg;
    cfg.seed = 2024;
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    const Manifest ma = synthesize_dataset(cfg, glyph_db(), corpus(), 100, a);
    const Manifest mb = synthesize_dataset(cfg, glyph_db(), corpus(), 100, b);
    const std::string la = slurp(a / "labels.jsonl"), lb = slurp(b / "labels.jsonl");
    o.require(!la.empty() && la == lb, "label files differ between runs");
    o.require(ma.image_digests == mb.image_digests, "image digests differ between runs");
    std::size_t disk_bad = 0;
    for (const auto& [file, digest] : ma.image_digests) {
        const std::string bytes = slurp(b / file);
        disk_bad += sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size())) == digest ? 0 : 1;
    }
    o.require(disk_bad == 0, std::to_string(disk_bad) + " images on disk do not match their digest");

    std::map<std::string, std::pair<std::size_t, std::size_t>> image_counts, box_sums;
    std::istringstream lines(la);
    for (std::string line; std::getline(lines, line);) {
        const json r = json::parse(line);
        const auto counts = std::make_pair(r["anomalous"].get<std::size_t>(), r["total"].get<std::size_t>());
        if (r["level"] == "image") {
            image_counts[r["image"]] = counts;
        } else {
            auto& s = box_sums[r["image"]];
            s.first += counts.first, s.second += counts.second;
        }
    }
    o.require(image_counts.size() == 100, std::to_string(image_counts.size()) + " image records");
    o.require(image_counts == box_sums, "box counts do not sum to image counts");
    fs::remove_all(a);
    fs::remove_all(b);

    std::size_t texts = 0, anomalous = 0;
    for (std::uint64_t i = 0; texts < 10000; ++i) {
        const auto s = synthesize_sample(cfg, glyph_db(), corpus(), mix_seed(7777, i), SynthOptions{false});
        for (const auto& box : s.boxes) {
            if (texts == 10000) break;
            ++texts;
            anomalous += box.anomalous > 0;
        }
    }
    const double rate = static_cast<double>(anomalous) / static_cast<double>(texts);
    o.require(std::abs(rate - 0.5) <= 0.02, "anomalous-text rate " + fmt("%.4f", rate));
    o.note("labels and 100 digests identical, counts consistent, anomalous-text rate " + fmt("%.4f", rate));
    return o;
}

// ---- 8

Outcome transform_weighting() {
    Outcome o;
    EngineConfig cfg;
    std::array<std::size_t, kTransformKinds> kinds{};
    std::size_t n = 0;
    for (std::uint64_t i = 0; n < 10000; ++i) {
        const auto s = synthesize_sample(cfg, glyph_db(), corpus(), mix_seed(8888, i), SynthOptions{false});
        for (const auto& box : s.boxes)
            if (box.transform && n < 10000) {
                ++kinds[static_cast<std::size_t>(box.transform->kind)];
                ++n;
            }
    }
    const double rotate = static_cast<double>(kinds[static_cast<std::size_t>(TransformKind::Rotate)]) / n;
    const double skew_x = static_cast<double>(kinds[static_cast<std::size_t>(TransformKind::SkewX)]) / n;
    o.require(std::abs(rotate - 3.0 / 11.0) <= 0.02, "rotate " + fmt("%.4f", rotate));
    o.require(std::abs(skew_x - 2.0 / 11.0) <= 0.02, "skew_x " + fmt("%.4f", skew_x));
    o.note("rotate " + fmt("%.4f", rotate) + " (3/11 = 0.2727), skew_x " + fmt("%.4f", skew_x) + " (2/11 = 0.1818)");
    return o;
}

// ---- 9

Outcome service_equivalence() {
    Outcome o;
    const RewardService svc;
    Rng rng(909);
    std::vector<json> requests;
    for (int i = 0; i < 1000; ++i) requests.push_back(fixtures::random_request(rng, 64));

    std::vector<std::string> expected;
    for (const auto& r : requests) expected.push_back(svc.handle_score(r).body.dump());

    HttpServer server{RewardService{}};
    const int port = server.bind("127.0.0.1", 0);
    std::thread loop([&] { server.listen(); });

    auto post = [&](httplib::Client& c, const std::string& path, const std::string& body) {
        const auto res = c.Post(path, body, "application/json");
        return res ? res->body : std::string("<no response>");
    };

    // Sequential over HTTP.
    std::vector<std::string> sequential(requests.size());
    {
        httplib::Client c("127.0.0.1", port);
        c.set_tcp_nodelay(true);
        for (std::size_t i = 0; i < requests.size(); ++i) sequential[i] = post(c, "/score", requests[i].dump());
    }
    // Concurrent over HTTP: 8 clients, interleaved.
    std::vector<std::string> concurrent(requests.size());
    {
        std::vector<std::thread> clients;
        for (std::size_t t = 0; t < 8; ++t)
            clients.emplace_back([&, t] {
                httplib::Client c("127.0.0.1", port);
                c.set_tcp_nodelay(true);
                for (std::size_t i = t; i < requests.size(); i += 8) concurrent[i] = post(c, "/score", requests[i].dump());
            });
        for (auto& c : clients) c.join();
    }
    o.require(sequential == expected, "sequential HTTP responses differ from in-process scoring");
    o.require(concurrent == sequential, "concurrent responses differ from sequential execution");

    // Batch endpoint, random group sizes up to the default limit.
    std::size_t batch_bad = 0;
    {
        httplib::Client c("127.0.0.1", port);
        c.set_tcp_nodelay(true);
        for (std::size_t first = 0; first < requests.size();) {
            const std::size_t size = std::min<std::size_t>(1 + rng.index(kDefaultBatchLimit), requests.size() - first);
            json batch = {{"requests", json::array()}};
            for (std::size_t i = 0; i < size; ++i) batch["requests"].push_back(requests[first + i]);
            const json out = json::parse(post(c, "/score/batch", batch.dump()), nullptr, false);
            if (out.is_discarded() || !out.contains("responses") || out["responses"].size() != size) {
                ++batch_bad;
            } else {
                for (std::size_t i = 0; i < size; ++i) batch_bad += out["responses"][i].dump() == sequential[first + i] ? 0 : 1;
            }
            first += size;
        }
    }
    o.require(batch_bad == 0, std::to_string(batch_bad) + " batch items differ from single responses");

    // HTTP throughput on this host, for reference.
    std::vector<std::string> bodies;
    for (const auto& r : requests) bodies.push_back(r.dump());
    double http_rate = 0.0;
    {
        const unsigned clients_n = std::max(2u, std::thread::hardware_concurrency());
        std::atomic<std::size_t> done{0};
        const auto t0 = Clock::now();
        std::vector<std::thread> clients;
        for (unsigned t = 0; t < clients_n; ++t)
            clients.emplace_back([&, t] {
                httplib::Client c("127.0.0.1", port);
                c.set_tcp_nodelay(true);
                for (std::size_t i = t; i < 2 * bodies.size(); i += clients_n)
                    if (c.Post("/score", bodies[i % bodies.size()], "application/json")) ++done;
            });
        for (auto& c : clients) c.join();
        http_rate = done / std::chrono::duration<double>(Clock::now() - t0).count();
    }
    server.stop();
    loop.join();

    // Sustained scoring throughput of the request handler (JSON body in, JSON body out) on
    // every hardware thread for about two seconds.
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> scored{0};
    std::atomic<bool> stop{false};
    const auto t0 = Clock::now();
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            std::size_t local = 0;
            for (std::size_t i = w; !stop.load(std::memory_order_relaxed); i += workers, ++local)
                (void)svc.handle_score_body(bodies[i % bodies.size()]);
            scored += local;
        });
    std::this_thread::sleep_for(std::chrono::seconds(2));
    stop = true;
    for (auto& t : pool) t.join();
    const double rate = scored / std::chrono::duration<double>(Clock::now() - t0).count();
    o.require(rate >= 5000.0, "handler throughput " + fmt("%.0f", rate) + "/s below 5000/s");
    o.note("1000 concurrent = sequential = in-process, batches element-wise equal, handler throughput " +
           fmt("%.0f", rate) + "/s on " + std::to_string(workers) + " thread(s), HTTP " + fmt("%.0f", http_rate) + "/s");
    return o;
}

// ---- 10

Outcome dataset_round_trip() {
    Outcome o;
    EngineConfig cfg;
    cfg.seed = 10;
    const fs::path dir = scratch("round_trip");
    synthesize_dataset(cfg, glyph_db(), corpus(), 200, dir);
    const std::string labels = (dir / "labels.jsonl").string();

    json reports;
#ifdef TEXTPECKER_CLI
    const std::string cmd = std::string("'") + TEXTPECKER_CLI + "' eval --dataset '" + labels + "' --predictions '" + labels +
                            "' --format map";
    std::string out;
    if (FILE* p = popen(cmd.c_str(), "r")) {
        char buf[4096];
        for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
        o.require(pclose(p) == 0, "eval exited with an error");
    }
    reports = json::parse(out, nullptr, false);
#else
    reports = json::array();
    for (const auto level : {Level::Image, Level::Box})
        reports.push_back(to_json(evaluate_dataset(labels, kDefaultDelta, level, labels)));
#endif
    o.require(reports.is_array() && reports.size() == 2, "expected image and box reports");
    if (o.pass) {
        for (const auto& r : reports) {
            const std::string level = r["level"];
            const bool any = r["counts"]["tp"].get<std::size_t>() + r["counts"]["fn"].get<std::size_t>() > 0;
            const double want = any ? 1.0 : 0.0;
            o.require(r["tsap"]["precision"] == want && r["tsap"]["recall"] == want && r["tsap"]["f1"] == want,
                      level + " TSAP not exact");
            o.require(r["counts"]["fp"] == 0 && r["counts"]["fn"] == 0, level + " has FP/FN");
            o.require(r["ctr"]["recall"] == 1.0 && r["ctr"]["ned"] == 0.0, level + " CTR not exact");
            o.note(level + " " + std::to_string(r["counts"]["n_records"].get<std::size_t>()) + " records P=R=F1=1, CTR R=1 NED=0");
        }
    }
    fs::remove_all(dir);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "formula fidelity", 1, formula_fidelity},
        {2, "hungarian oracle equivalence", 30, hungarian_oracle},
        {3, "ned oracle", 10, ned_oracle},
        {4, "semantic score worked case and permutation invariance", 0, semantic_worked_case},
        {5, "tsap rule", 0, tsap_rule},
        {6, "stroke operators", 60, stroke_operators},
        {7, "renderer determinism and bookkeeping", 600, renderer_bookkeeping},
        {8, "transform weighting", 120, transform_weighting},
        {9, "service equivalence and throughput", 0, service_equivalence},
        {10, "dataset round trip", 0, dataset_round_trip},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.budget_s > 0 && secs >= c.budget_s) o.require(false, "took " + fmt("%.1f", secs) + " s, budget " + fmt("%.0f", c.budget_s) + " s");
        failed += o.pass ? 0 : 1;
        std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
