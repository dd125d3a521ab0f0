#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace backdisp {

using nlohmann::json;

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

// Shortest-round-trip style formatting: %.17g reproduces every double
// exactly on read-back, which is what the byte-identity guarantee rests on.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

struct Verdict {
    std::string name;
    bool pass = true;
    std::string details;
};

struct RunReport {
    json config_echo;                        // effective configuration after merges
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;
    double wall_ms = 0.0;

    bool all_pass() const {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
};

namespace detail {

// Execution-only keys are excluded from the identity hash so that runs
// differing only in worker count or output directory share a hash (and
// produce byte-identical results.csv).
inline std::string config_identity_string(const json& cfg) {
    json c = cfg;
    c.erase("threads");
    c.erase("out");
    return c.dump();
}

inline void write_file_or_throw(const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw io_error("cannot open " + p.string() + " for writing");
    f << body;
    f.flush();
    if (!f) throw io_error("short write to " + p.string());
}

} // namespace detail

inline std::string render_csv(const RunReport& rep, const std::string& config_hash) {
    std::string out;
    for (size_t i = 0; i < rep.columns.size(); ++i) {
        out += rep.columns[i];
        out += ',';
    }
    out += "config_hash\n";
    for (const auto& row : rep.rows) {
        if (row.size() != rep.columns.size()) throw io_error("csv row width mismatch");
        for (const auto& cell : row) {
            out += cell;
            out += ',';
        }
        out += config_hash;
        out += '\n';
    }
    return out;
}

// Writes config.json, results.csv and summary.json under dir, creating it
// if needed. summary.json carries the verdicts and hashes of the other two
// files; wall time lives only there so results.csv stays deterministic.
inline void persist_run(const RunReport& rep, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory " + dir + ": " + ec.message());

    std::string config_body = rep.config_echo.dump(2) + "\n";
    std::string config_hash = hex64(fnv1a64(detail::config_identity_string(rep.config_echo)));
    std::string csv_body = render_csv(rep, config_hash);

    json summary;
    summary["config_hash"] = config_hash;
    summary["results_hash"] = hex64(fnv1a64(csv_body));
    summary["rows"] = rep.rows.size();
    summary["all_pass"] = rep.all_pass();
    json checks = json::array();
    for (const auto& v : rep.verdicts)
        checks.push_back({{"name", v.name}, {"pass", v.pass}, {"details", v.details}});
    summary["checks"] = checks;
    summary["notes"] = rep.notes;
    summary["wall_ms"] = rep.wall_ms;

    detail::write_file_or_throw(fs::path(dir) / "config.json", config_body);
    detail::write_file_or_throw(fs::path(dir) / "results.csv", csv_body);
    detail::write_file_or_throw(fs::path(dir) / "summary.json", summary.dump(2) + "\n");
}

// Deterministic per-sample generator: state is a hash of (seed, index), so
// sample i sees the same stream regardless of which worker draws it or in
// what order. Standard splitmix64 scrambling.
struct SampleRng {
    uint64_t state;

    SampleRng(uint64_t seed, uint64_t index)
        : state((seed + 0x9E3779B97F4A7C15ULL * (index + 1)) ^ 0xD1B54A32D192ED03ULL) {
        next();
        next();
    }

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
};

} // namespace backdisp
