#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "qkdcopy/types.hpp"

namespace qkdcopy {

/// Configuration error carrying the offending key and, for file input, the
/// line number.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg) {}
};

enum class Subcommand { Qber, Sweep, MaxDist, Mc, Validate };

enum class OutputFormat { Csv, Json };

/// Fully resolved run configuration. Flags override file values; unknown keys
/// are rejected.
struct RunConfig {
    Subcommand subcommand = Subcommand::Qber;
    ProtocolVariant variant{Protocol::QubitBB84, {0, 1}};
    DetectorSpec det{0.59, 4.6e-4, 0.0};
    double alpha = 0.2;
    double length_km = 100.0;
    double threshold = 0.11;
    double start_km = 0.0;
    double stop_km = 0.0;
    double step_km = 10.0;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    bool stratified = true;
    RatePath path = RatePath::PaperSums;
    std::string out;            // empty = stdout
    std::string format;         // "csv", "json", or empty = per-command default

    void validate() const {
        variant.validate();
        det.validate();
        if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
        if (!(length_km >= 0.0)) throw ConfigError("length_km must be >= 0");
        if (!(threshold > 0.0 && threshold < 0.5)) throw ConfigError("threshold must be in (0, 0.5)");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (!(step_km > 0.0)) throw ConfigError("step_km must be > 0");
        if (start_km > stop_km) throw ConfigError("start_km must be <= stop_km");
        if (!format.empty() && format != "csv" && format != "json")
            throw ConfigError("format must be csv or json, got '" + format + "'");
    }

    OutputFormat resolved_format() const {
        if (format == "csv") return OutputFormat::Csv;
        if (format == "json") return OutputFormat::Json;
        return subcommand == Subcommand::Sweep ? OutputFormat::Csv : OutputFormat::Json;
    }
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for key '" + key + "': '" + value + "'", line);
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value, int line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw ConfigError("invalid unsigned integer for key '" + key + "': '" + value + "'", line);
    return v;
}

inline int parse_int(const std::string& key, const std::string& value, int line) {
    int v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw ConfigError("invalid integer for key '" + key + "': '" + value + "'", line);
    return v;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace detail

inline Protocol parse_protocol(const std::string& value, int line = 0) {
    if (value == "qubit") return Protocol::QubitBB84;
    if (value == "qutrit") return Protocol::QutritBB84;
    if (value == "tf") return Protocol::TwinField;
    throw ConfigError("variant must be qubit, qutrit, or tf, got '" + value + "'", line);
}

inline RatePath parse_rate_path(const std::string& value, int line = 0) {
    if (value == "paper-sums") return RatePath::PaperSums;
    if (value == "approx") return RatePath::Approx;
    if (value == "oracle") return RatePath::Oracle;
    throw ConfigError("path must be paper-sums, approx, or oracle, got '" + value + "'", line);
}

/// Apply a single key=value setting. Throws ConfigError on unknown keys or
/// malformed values.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                          int line = 0) {
    using namespace detail;
    if (key == "variant") cfg.variant.protocol = parse_protocol(value, line);
    else if (key == "d") cfg.variant.copy.d = parse_int(key, value, line);
    else if (key == "m") cfg.variant.copy.m = parse_int(key, value, line);
    else if (key == "eta") cfg.det.eta = parse_double(key, value, line);
    else if (key == "dark_p") cfg.det.dark_p = parse_double(key, value, line);
    else if (key == "p_opt") cfg.det.p_opt = parse_double(key, value, line);
    else if (key == "alpha") cfg.alpha = parse_double(key, value, line);
    else if (key == "length_km") cfg.length_km = parse_double(key, value, line);
    else if (key == "threshold") cfg.threshold = parse_double(key, value, line);
    else if (key == "start_km") cfg.start_km = parse_double(key, value, line);
    else if (key == "stop_km") cfg.stop_km = parse_double(key, value, line);
    else if (key == "step_km") cfg.step_km = parse_double(key, value, line);
    else if (key == "trials") cfg.trials = parse_u64(key, value, line);
    else if (key == "seed") cfg.seed = parse_u64(key, value, line);
    else if (key == "stratified") {
        if (value == "true" || value == "1") cfg.stratified = true;
        else if (value == "false" || value == "0") cfg.stratified = false;
        else throw ConfigError("stratified must be true/false/1/0, got '" + value + "'", line);
    }
    else if (key == "path") cfg.path = parse_rate_path(value, line);
    else if (key == "out") cfg.out = value;
    else if (key == "format") cfg.format = value;
    else throw ConfigError("unknown key '" + key + "'", line);
}

/// Parse a flat key=value config stream: one pair per line, '#' comments,
/// blank lines ignored.
inline void parse_config_stream(RunConfig& cfg, std::istream& in) {
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string s = detail::trim(raw);
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + s + "'", line);
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line);
        apply_setting(cfg, key, value, line);
    }
}

inline void parse_config_file(RunConfig& cfg, const std::string& file_path) {
    std::ifstream in(file_path);
    if (!in) throw ConfigError("cannot open config file '" + file_path + "'");
    parse_config_stream(cfg, in);
}

}  // namespace qkdcopy
