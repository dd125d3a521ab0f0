#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "backdisp/campaigns.hpp"
#include "backdisp/config.hpp"
#include "backdisp/parallel.hpp"
#include "backdisp/report.hpp"

using namespace backdisp;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / leaf;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

RunSettings settings_with(const std::vector<std::string>& overrides) {
    json cfg = default_config();
    for (const auto& o : overrides) apply_override(cfg, o);
    return parse_settings(cfg);
}

} // namespace

TEST_CASE("the shipped default configuration is itself valid") {
    RunSettings s = parse_settings(default_config());
    CHECK(s.dimension == 3);
    CHECK(s.campaign == "verify");
    CHECK(s.pv.delta == 0.5);
    CHECK(s.pv.eps_ladder.size() == 6);
    CHECK(s.direction.norm() == Catch::Approx(1.0));
    CHECK(s.seed == 12345);
    CHECK(s.out_dir == "runs/latest");
}

TEST_CASE("dot-path overrides parse JSON values and fall back to strings") {
    json cfg = default_config();
    apply_override(cfg, "pv.delta=0.25");
    CHECK(cfg["pv"]["delta"] == 0.25);
    apply_override(cfg, "eta.per_octave=7");
    CHECK(cfg["eta"]["per_octave"] == 7);
    apply_override(cfg, "epsilon_scan.beta_grid=[0.5,1.0]");
    CHECK(cfg["epsilon_scan"]["beta_grid"] == json::array({0.5, 1.0}));
    apply_override(cfg, "profile.label=power");
    CHECK(cfg["profile"]["label"] == "power"); // unquoted text lands as a string
    apply_override(cfg, "campaign=q2");
    CHECK(cfg["campaign"] == "q2");
    apply_override(cfg, "extra.nested.flag=true");
    CHECK(cfg["extra"]["nested"]["flag"] == true); // creates missing objects

    CHECK_THROWS_AS(apply_override(cfg, "no-equals-sign"), config_error);
    CHECK_THROWS_AS(apply_override(cfg, "=5"), config_error);
    CHECK_THROWS_AS(apply_override(cfg, "pv..delta=0.3"), config_error);
    CHECK_THROWS_AS(apply_override(cfg, "seed.subkey=1"), config_error); // crosses a scalar
}

TEST_CASE("config files overlay the defaults and failures are typed") {
    CHECK(load_config(std::nullopt) == default_config());
    CHECK_THROWS_AS(load_config(std::string("/nonexistent/dir/conf.json")), io_error);

    fs::path dir = fresh_dir("backdisp_cfg_test");
    fs::create_directories(dir);
    fs::path bad = dir / "bad.json";
    { std::ofstream(bad) << "{ not json ]"; }
    CHECK_THROWS_AS(load_config(bad.string()), config_error);

    fs::path good = dir / "good.json";
    { std::ofstream(good) << R"({"dimension": 2, "eta": {"per_octave": 5}})"; }
    json merged = load_config(good.string());
    CHECK(merged["dimension"] == 2);
    CHECK(merged["eta"]["per_octave"] == 5);
    CHECK(merged["eta"]["log2_r_min"] == 1.0); // untouched siblings survive the merge
    fs::remove_all(dir);
}

TEST_CASE("profile construction from configuration") {
    CHECK(make_profile(json{{"label", "power"}, {"s", 2.5}}, 3).label.rfind("power", 0) == 0);
    CHECK(make_profile(json{{"label", "gaussian"}, {"a", 0.2}}, 2).dim == 2);
    CHECK(make_profile(json{{"label", "ball"}, {"R", 1.0}}, 3).nominal_regularity == Catch::Approx(0.5));
    CHECK(make_profile(json{{"label", "bandlimited"}, {"rho0", 2.0}}, 3).fourier_support_radius.value() == 2.0);
    CHECK_THROWS_AS(make_profile(json{{"label", "sinc"}}, 3), config_error);
    CHECK_THROWS_AS(make_profile(json::array(), 3), config_error);
    CHECK_THROWS_AS(make_profile(json{{"label", "power"}, {"s", 0.5}}, 3), config_error);
}

TEST_CASE("settings validation rejects out-of-contract values") {
    CHECK_THROWS_AS(settings_with({"dimension=4"}), config_error);
    CHECK_THROWS_AS(settings_with({"dimension=2"}), config_error); // direction still 3-long
    CHECK_NOTHROW(settings_with({"dimension=2", "eta.direction=[1.0,0.0]"}));
    CHECK_THROWS_AS(settings_with({"threads=0"}), config_error);
    CHECK_THROWS_AS(settings_with({"pv.delta=1.5"}), config_error);
    CHECK_THROWS_AS(settings_with({"eta.per_octave=0"}), config_error);
    CHECK_THROWS_AS(settings_with({"cutoff_c0=-1"}), config_error);
    CHECK_THROWS_AS(settings_with({"verify.samples=0"}), config_error);
    json missing = default_config();
    missing.erase("pv");
    CHECK_THROWS_AS(parse_settings(missing), config_error);
}

TEST_CASE("geometric grids hit both endpoints with the requested density") {
    std::vector<double> g = geometric_grid(1.0, 3.0, 2);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == Catch::Approx(2.0));
    CHECK(g.back() == Catch::Approx(8.0));
    CHECK(g[1] == Catch::Approx(std::exp2(1.5)));
    CHECK(geometric_grid(2.0, 2.0, 4).size() == 1);
}

TEST_CASE("hash and formatting primitives are frozen") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("backdisp") == 0x1886d2de559df8b2ULL);
    CHECK(hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
    CHECK(hex64(0x1ULL) == "0000000000000001");

    for (double v : {0.1, 1.0 / 3.0, 1e300, -0.0, 5e-324, 2.2250738585072014e-308}) {
        std::string s = fmt_double(v);
        double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
        CHECK(std::signbit(back) == std::signbit(v));
    }
}

TEST_CASE("csv rendering appends the identity hash column and checks widths") {
    RunReport rep;
    rep.columns = {"alpha", "beta"};
    rep.rows = {{"1", "2"}, {"3", "4"}};
    std::string csv = render_csv(rep, "deadbeef00000000");
    CHECK(csv == "alpha,beta,config_hash\n1,2,deadbeef00000000\n3,4,deadbeef00000000\n");
    rep.rows.push_back({"only-one"});
    CHECK_THROWS_AS(render_csv(rep, "deadbeef00000000"), io_error);
}

TEST_CASE("persisted runs carry self-consistent hashes") {
    RunReport rep;
    rep.config_echo = default_config();
    rep.columns = {"x"};
    rep.rows = {{"42"}};
    rep.verdicts.push_back({"demo", true, "ok"});
    rep.notes.push_back("note");
    rep.wall_ms = 1.5;

    fs::path dir = fresh_dir("backdisp_persist_test");
    persist_run(rep, dir.string());
    REQUIRE(fs::exists(dir / "config.json"));
    REQUIRE(fs::exists(dir / "results.csv"));
    REQUIRE(fs::exists(dir / "summary.json"));

    json summary = json::parse(slurp(dir / "summary.json"));
    std::string csv = slurp(dir / "results.csv");
    CHECK(summary["results_hash"] == hex64(fnv1a64(csv)));
    CHECK(summary["rows"] == 1);
    CHECK(summary["all_pass"] == true);
    CHECK(summary["checks"][0]["name"] == "demo");
    CHECK(json::parse(slurp(dir / "config.json")) == rep.config_echo);

    // execution-only keys do not change the identity hash
    RunReport other = rep;
    other.config_echo["threads"] = 8;
    other.config_echo["out"] = "elsewhere";
    fs::path dir2 = fresh_dir("backdisp_persist_test2");
    persist_run(other, dir2.string());
    json summary2 = json::parse(slurp(dir2 / "summary.json"));
    CHECK(summary2["config_hash"] == summary["config_hash"]);
    CHECK(summary2["results_hash"] == summary["results_hash"]);
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("per-sample rng streams are deterministic and well ranged") {
    SampleRng a(7, 3), b(7, 3), c(7, 4);
    for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());
    bool differs = false;
    SampleRng a2(7, 3);
    for (int i = 0; i < 16; ++i) differs |= (a2.next() != c.next());
    CHECK(differs);

    SampleRng r(123, 0);
    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 100; ++i) {
        double v = r.uniform(-2.0, 5.0);
        CHECK(v >= -2.0);
        CHECK(v <= 5.0);
        double w = r.log_uniform(0.5, 32.0);
        CHECK(w >= 0.5);
        CHECK(w <= 32.0);
    }
}

TEST_CASE("scan output is byte-identical across worker counts") {
    auto run_with_threads = [&](int t, const std::string& leaf) {
        RunSettings s = settings_with({"campaign=q2", "eta.log2_r_min=1", "eta.log2_r_max=2",
                                       "eta.per_octave=1", "threads=" + std::to_string(t)});
        RunReport rep = run_q2_scan(s);
        fs::path dir = fresh_dir(leaf);
        persist_run(rep, dir.string());
        std::string csv = slurp(dir / "results.csv");
        fs::remove_all(dir);
        return csv;
    };
    std::string serial = run_with_threads(1, "backdisp_scan_t1");
    std::string parallel = run_with_threads(4, "backdisp_scan_t4");
    CHECK(serial == parallel);
    CHECK(serial.find("q2_paper_re") != std::string::npos);
}

TEST_CASE("the identity campaign passes end to end on a small budget") {
    RunSettings s = settings_with({"dimension=2", "eta.direction=[1.0,0.0]", "verify.samples=5"});
    RunReport rep = run_verify(s);
    for (const auto& v : rep.verdicts) {
        INFO(v.name << ": " << v.details);
        CHECK(v.pass);
    }
    CHECK(rep.all_pass());
    CHECK(rep.columns == std::vector<std::string>{"check", "metric", "threshold", "pass"});
    CHECK(rep.rows.size() == rep.verdicts.size());
}

TEST_CASE("unknown campaign names are configuration errors") {
    RunSettings s = parse_settings(default_config());
    s.campaign = "frobnicate";
    CHECK_THROWS_AS(run_campaign(s), config_error);
}

TEST_CASE("index-claiming parallel loop: slot writes match serial, errors surface") {
    const size_t N = 257;
    std::vector<double> serial(N, 0.0), threaded(N, 0.0);
    auto fill = [](std::vector<double>& out) {
        return [&out](size_t i) { out[i] = std::sqrt(static_cast<double>(i)) + 1.0; };
    };
    parallel_for(N, 1, fill(serial));
    parallel_for(N, 6, fill(threaded));
    CHECK(serial == threaded);
    CHECK(std::accumulate(serial.begin(), serial.end(), 0.0) > 0.0);

    // more workers than work
    std::atomic<int> hits{0};
    parallel_for(2, 16, [&](size_t) { hits.fetch_add(1); });
    CHECK(hits.load() == 2);

    CHECK_THROWS_AS(parallel_for(64, 4,
                                 [](size_t i) {
                                     if (i == 23) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}
