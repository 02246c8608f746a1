#pragma once

// Run configuration: flat `key = value` files with [section] headers, strict
// about unknown sections and keys. Command-line flags override file values.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "twistlab/error.hpp"
#include "twistlab/families.hpp"

namespace twistlab {

// section -> key -> raw value
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;

inline const std::map<std::string, std::set<std::string>> &config_schema()
{
    static const std::map<std::string, std::set<std::string>> schema{
        {"family", {"family", "alpha", "omega", "eps", "phi", "psi", "c", "p", "q", "eps0", "slope", "a", "b"}},
        {"analysis",
         {"tol", "n", "nx", "ny", "bins", "window", "boundary", "max_iterations", "t_lo", "t_hi", "tongue_p",
          "tongue_q", "seeds", "steps", "max_iter", "radius", "curve_y1", "curve_y2", "curve_n", "curve_seeds",
          "seed", "threads", "assume_nonwandering"}},
        {"output", {"out", "csv"}},
    };
    return schema;
}

inline std::string section_of(const std::string &key)
{
    for (const auto &[sec, keys] : config_schema()) {
        if (keys.count(key) != 0) {
            return sec;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline ConfigTable parse_config_text(const std::string &text)
{
    ConfigTable table;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (config_schema().count(section) == 0) {
                throw ConfigError(where + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError(where + ": key outside of a section");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (config_schema().at(section).count(key) == 0) {
            throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
        }
        if (table[section].count(key) != 0) {
            throw ConfigError(where + ": duplicate key '" + key + "'");
        }
        table[section][key] = value;
    }
    return table;
}

inline ConfigTable load_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

struct RunConfig {
    std::optional<FamilySpec> family;

    double tol = 1e-6;
    std::size_t n = 100'000;
    std::size_t nx = 64;
    std::size_t ny = 64;
    std::size_t bins = 64;
    std::size_t window = 3;
    std::optional<int> boundary;
    std::size_t max_iterations = 100'000'000;

    double t_lo = 0.3;
    double t_hi = 0.7;
    std::int64_t tongue_p = 1;
    std::int64_t tongue_q = 2;

    std::size_t seeds = 40;
    std::size_t steps = 2000;

    std::size_t max_iter = 10'000;
    double radius = 1e-3;

    double curve_y1 = 0.2;
    double curve_y2 = 0.7;
    std::size_t curve_n = 2000;
    std::size_t curve_seeds = 1;

    std::uint64_t seed = 12345;
    unsigned threads = 0;
    std::vector<std::string> assume_nonwandering;

    std::string out;
    std::string csv;
};

namespace detail {

inline double to_real(const std::string &key, const std::string &v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) {
            throw ConfigError("");
        }
        return d;
    }
    catch (...) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline std::int64_t to_int(const std::string &key, const std::string &v)
{
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) {
            throw ConfigError("");
        }
        return d;
    }
    catch (...) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

inline std::size_t to_count(const std::string &key, const std::string &v)
{
    const auto d = to_int(key, v);
    if (d < 1) {
        throw ConfigError("key '" + key + "': must be >= 1");
    }
    return static_cast<std::size_t>(d);
}

inline double to_positive(const std::string &key, const std::string &v)
{
    const double d = to_real(key, v);
    if (!(d > 0.0)) {
        throw ConfigError("key '" + key + "': must be > 0");
    }
    return d;
}

} // namespace detail

inline unsigned threads_from_env()
{
    if (const char *v = std::getenv("TWISTLAB_THREADS")) {
        try {
            const long t = std::stol(v);
            if (t >= 0) {
                return static_cast<unsigned>(t);
            }
        }
        catch (...) {
        }
        throw ConfigError(std::string("TWISTLAB_THREADS: invalid value '") + v + "'");
    }
    return 0;
}

// Builds a RunConfig from a merged table (file values already overridden by flags).
inline RunConfig make_run_config(const ConfigTable &table)
{
    RunConfig cfg;
    cfg.threads = threads_from_env();
    auto get = [&](const std::string &sec, const std::string &key) -> std::optional<std::string> {
        auto s = table.find(sec);
        if (s == table.end()) {
            return std::nullopt;
        }
        auto k = s->second.find(key);
        if (k == s->second.end()) {
            return std::nullopt;
        }
        return k->second;
    };

    for (const auto &[sec, keys] : table) {
        if (config_schema().count(sec) == 0) {
            throw ConfigError("unknown section [" + sec + "]");
        }
        for (const auto &kv : keys) {
            if (config_schema().at(sec).count(kv.first) == 0) {
                throw ConfigError("unknown key '" + kv.first + "' in [" + sec + "]");
            }
        }
    }

    if (auto kind = get("family", "family")) {
        FamilySpec spec;
        spec.kind = family_kind_from_string(*kind);
        for (const auto &[key, value] : table.at("family")) {
            if (key == "family") {
                continue;
            }
            if (key == "phi" || key == "psi") {
                spec.options[key] = value;
            }
            else {
                spec.params[key] = detail::to_real(key, value);
            }
        }
        cfg.family = spec;
    }
    else if (table.count("family") != 0 && !table.at("family").empty()) {
        throw ConfigError("family parameters given without a family kind");
    }

    using namespace detail;
    if (auto v = get("analysis", "tol")) cfg.tol = to_positive("tol", *v);
    if (auto v = get("analysis", "n")) cfg.n = to_count("n", *v);
    if (auto v = get("analysis", "nx")) cfg.nx = to_count("nx", *v);
    if (auto v = get("analysis", "ny")) cfg.ny = to_count("ny", *v);
    if (auto v = get("analysis", "bins")) cfg.bins = to_count("bins", *v);
    if (auto v = get("analysis", "window")) cfg.window = to_count("window", *v);
    if (auto v = get("analysis", "boundary")) {
        const auto b = to_int("boundary", *v);
        if (b != 0 && b != 1) {
            throw ConfigError("key 'boundary': must be 0 or 1");
        }
        cfg.boundary = static_cast<int>(b);
    }
    if (auto v = get("analysis", "max_iterations")) cfg.max_iterations = to_count("max_iterations", *v);
    if (auto v = get("analysis", "t_lo")) cfg.t_lo = to_real("t_lo", *v);
    if (auto v = get("analysis", "t_hi")) cfg.t_hi = to_real("t_hi", *v);
    if (auto v = get("analysis", "tongue_p")) cfg.tongue_p = to_int("tongue_p", *v);
    if (auto v = get("analysis", "tongue_q")) {
        cfg.tongue_q = static_cast<std::int64_t>(to_count("tongue_q", *v));
    }
    if (auto v = get("analysis", "seeds")) cfg.seeds = to_count("seeds", *v);
    if (auto v = get("analysis", "steps")) cfg.steps = to_count("steps", *v);
    if (auto v = get("analysis", "max_iter")) cfg.max_iter = to_count("max_iter", *v);
    if (auto v = get("analysis", "radius")) cfg.radius = to_positive("radius", *v);
    if (auto v = get("analysis", "curve_y1")) cfg.curve_y1 = to_real("curve_y1", *v);
    if (auto v = get("analysis", "curve_y2")) cfg.curve_y2 = to_real("curve_y2", *v);
    if (auto v = get("analysis", "curve_n")) cfg.curve_n = to_count("curve_n", *v);
    if (auto v = get("analysis", "curve_seeds")) cfg.curve_seeds = to_count("curve_seeds", *v);
    if (auto v = get("analysis", "seed")) {
        const auto s = to_int("seed", *v);
        if (s < 0) {
            throw ConfigError("key 'seed': must be >= 0");
        }
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (auto v = get("analysis", "threads")) {
        const auto t = to_int("threads", *v);
        if (t < 0) {
            throw ConfigError("key 'threads': must be >= 0");
        }
        cfg.threads = static_cast<unsigned>(t);
    }
    if (auto v = get("analysis", "assume_nonwandering")) {
        std::istringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) {
                family_kind_from_string(item);
                cfg.assume_nonwandering.push_back(item);
            }
        }
    }
    if (auto v = get("output", "out")) cfg.out = *v;
    if (auto v = get("output", "csv")) cfg.csv = *v;
    if (cfg.t_lo > cfg.t_hi) {
        throw ConfigError("t_lo must not exceed t_hi");
    }
    return cfg;
}

// Overlays `top` on `base`.
inline ConfigTable merge_config(ConfigTable base, const ConfigTable &top)
{
    for (const auto &[sec, keys] : top) {
        for (const auto &[k, v] : keys) {
            base[sec][k] = v;
        }
    }
    return base;
}

} // namespace twistlab
