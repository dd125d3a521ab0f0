#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dispersion.hpp"
#include "errors.hpp"
#include "profiles.hpp"
#include "vec.hpp"

namespace backdisp {

using nlohmann::json;

inline json default_config() {
    return json{
        {"dimension", 3},
        {"campaign", "verify"},
        {"profile", {{"label", "gaussian"}, {"a", 0.2}}},
        {"eta",
         {{"direction", {1.0, 0.0, 0.0}},
          {"log2_r_min", 1.0},
          {"log2_r_max", 3.0},
          {"per_octave", 2}}},
        {"pv",
         {{"delta", 0.5},
          {"tau", 2.0},
          {"r_max", 8.0},
          {"n_r_inner", 24},
          {"n_r_outer", 16},
          {"sphere_order", 16},
          {"graded_levels", 0},
          {"eps_ladder", {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125}}}},
        {"cutoff_c0", 1.0},
        {"oracle", {{"count", 8}, {"log2_r_min", 1.0}, {"log2_r_max", 5.0}, {"median_tolerance", 0.05}}},
        {"epsilon_scan",
         {{"beta_grid", {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}},
          {"log2_r_min", 4.0},
          {"log2_r_max", 9.0},
          {"per_octave", 4},
          {"margin_tolerance", 0.15},
          {"min_r2", 0.9}}},
        {"verify", {{"samples", 60}}},
        {"test_hooks", {{"leckband_density_scale", 1.0}}},
        {"out", "runs/latest"},
        {"seed", 12345},
        {"threads", 1},
    };
}

// Applies one "dot.path=value" override. The value is parsed as JSON when
// possible (numbers, booleans, arrays), else taken as a raw string.
inline void apply_override(json& cfg, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("override must look like path.to.key=value: " + spec);
    std::string path = spec.substr(0, eq);
    std::string raw = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }

    json* node = &cfg;
    size_t pos = 0;
    while (true) {
        size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (key.empty()) throw config_error("override has an empty path segment: " + spec);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        if (!node->is_object() && !node->is_null())
            throw config_error("override path crosses a non-object value: " + spec);
        pos = dot + 1;
    }
}

inline json load_config(const std::optional<std::string>& path) {
    json cfg = default_config();
    if (path) {
        std::ifstream f(*path);
        if (!f) throw io_error("cannot read config file " + *path);
        json overlay;
        try {
            overlay = json::parse(f);
        } catch (const json::parse_error& e) {
            throw config_error("config file " + *path + " is not valid JSON: " + e.what());
        }
        cfg.merge_patch(overlay);
    }
    return cfg;
}

inline RadialFourierProfile make_profile(const json& spec, int dim) {
    if (!spec.is_object() || !spec.contains("label"))
        throw config_error("profile must be an object with a label");
    std::string label = spec.at("label").get<std::string>();
    try {
        if (label == "power") return power_profile(spec.value("s", 3.0), dim);
        if (label == "gaussian") return gaussian_profile(spec.value("a", 1.0), dim);
        if (label == "ball") return ball_indicator_profile(spec.value("R", 1.0), dim);
        if (label == "bandlimited")
            return bandlimited_profile(spec.value("rho0", 1.0), spec.value("m", 4), dim);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("profile parameters invalid: ") + e.what());
    }
    throw config_error("unknown profile label: " + label);
}

struct RunSettings {
    int dimension = 3;
    std::string campaign;
    json profile_spec;
    Vec direction = Vec(1.0, 0.0, 0.0);
    double eta_log2_min = 1.0, eta_log2_max = 3.0;
    int eta_per_octave = 2;
    PVConfig pv;
    double cutoff_c0 = 1.0;
    int oracle_count = 8;
    double oracle_log2_min = 1.0, oracle_log2_max = 5.0;
    double oracle_median_tol = 0.05;
    std::vector<double> beta_grid;
    double scan_log2_min = 4.0, scan_log2_max = 9.0;
    int scan_per_octave = 4;
    double scan_margin_tol = 0.15;
    double scan_min_r2 = 0.9;
    int verify_samples = 60;
    double leckband_scale_hook = 1.0;
    std::string out_dir;
    uint64_t seed = 12345;
    int threads = 1;
    json raw;
};

inline RunSettings parse_settings(const json& cfg) {
    RunSettings s;
    try {
        s.dimension = cfg.at("dimension").get<int>();
        if (s.dimension != 2 && s.dimension != 3)
            throw config_error("dimension must be 2 or 3");
        s.campaign = cfg.at("campaign").get<std::string>();
        s.profile_spec = cfg.at("profile");

        const json& eta = cfg.at("eta");
        auto dir = eta.at("direction").get<std::vector<double>>();
        if (static_cast<int>(dir.size()) != s.dimension)
            throw config_error("eta.direction length must match dimension");
        Vec d = Vec::zero(s.dimension);
        for (int i = 0; i < s.dimension; ++i) d[i] = dir[i];
        s.direction = d.unit();
        s.eta_log2_min = eta.at("log2_r_min").get<double>();
        s.eta_log2_max = eta.at("log2_r_max").get<double>();
        s.eta_per_octave = eta.at("per_octave").get<int>();
        if (s.eta_per_octave < 1) throw config_error("eta.per_octave must be positive");
        if (!(s.eta_log2_max >= s.eta_log2_min)) throw config_error("eta range is empty");

        const json& pv = cfg.at("pv");
        s.pv.delta = pv.at("delta").get<double>();
        s.pv.tau = pv.at("tau").get<double>();
        s.pv.r_max = pv.at("r_max").get<double>();
        s.pv.n_r_inner = pv.at("n_r_inner").get<int>();
        s.pv.n_r_outer = pv.at("n_r_outer").get<int>();
        s.pv.sphere_order = pv.at("sphere_order").get<int>();
        s.pv.graded_levels = pv.value("graded_levels", 0);
        s.pv.eps_ladder = pv.at("eps_ladder").get<std::vector<double>>();
        validate_pv(s.pv);

        s.cutoff_c0 = cfg.at("cutoff_c0").get<double>();
        if (!(s.cutoff_c0 > 0.0)) throw config_error("cutoff_c0 must be positive");

        const json& orc = cfg.at("oracle");
        s.oracle_count = orc.at("count").get<int>();
        s.oracle_log2_min = orc.at("log2_r_min").get<double>();
        s.oracle_log2_max = orc.at("log2_r_max").get<double>();
        s.oracle_median_tol = orc.at("median_tolerance").get<double>();
        if (s.oracle_count < 1) throw config_error("oracle.count must be positive");

        const json& sc = cfg.at("epsilon_scan");
        s.beta_grid = sc.at("beta_grid").get<std::vector<double>>();
        s.scan_log2_min = sc.at("log2_r_min").get<double>();
        s.scan_log2_max = sc.at("log2_r_max").get<double>();
        s.scan_per_octave = sc.at("per_octave").get<int>();
        s.scan_margin_tol = sc.at("margin_tolerance").get<double>();
        s.scan_min_r2 = sc.at("min_r2").get<double>();
        if (s.scan_per_octave < 1) throw config_error("epsilon_scan.per_octave must be positive");

        s.verify_samples = cfg.at("verify").at("samples").get<int>();
        if (s.verify_samples < 1) throw config_error("verify.samples must be positive");
        s.leckband_scale_hook = cfg.at("test_hooks").at("leckband_density_scale").get<double>();

        s.out_dir = cfg.at("out").get<std::string>();
        s.seed = cfg.at("seed").get<uint64_t>();
        s.threads = cfg.at("threads").get<int>();
        if (s.threads < 1) throw config_error("threads must be positive");
    } catch (const json::exception& e) {
        throw config_error(std::string("configuration malformed: ") + e.what());
    }
    s.raw = cfg;
    return s;
}

// Geometric grid 2^lo .. 2^hi with `per_octave` points per doubling,
// endpoints included.
inline std::vector<double> geometric_grid(double log2_lo, double log2_hi, int per_octave) {
    int count = static_cast<int>(std::round((log2_hi - log2_lo) * per_octave)) + 1;
    count = std::max(count, 1);
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i)
        g[i] = std::exp2(log2_lo + static_cast<double>(i) / per_octave);
    return g;
}

} // namespace backdisp
