#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "qkdcopy/montecarlo.hpp"
#include "qkdcopy/runconfig.hpp"
#include "qkdcopy/sweep.hpp"
#include "qkdcopy/validate.hpp"

namespace qkdcopy {

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

/// Worker cap from QKDSIM_THREADS (0 or unset = auto).
inline unsigned worker_cap_from_env() {
    const char* env = std::getenv("QKDSIM_THREADS");
    if (!env) return 0;
    unsigned v = 0;
    auto [p, ec] = std::from_chars(env, env + std::string(env).size(), v);
    if (ec != std::errc{}) return 0;
    return v;
}

inline nlohmann::json config_json(const RunConfig& cfg) {
    return {
        {"variant", protocol_name(cfg.variant.protocol)},
        {"d", cfg.variant.copy.d},
        {"m", cfg.variant.copy.m},
        {"eta", cfg.det.eta},
        {"dark_p", cfg.det.dark_p},
        {"p_opt", cfg.det.p_opt},
        {"alpha", cfg.alpha},
    };
}

inline nlohmann::json rate_report_json(const RateReport& r) {
    nlohmann::json j = {
        {"sift_rate", r.sift_rate},
        {"error_rate", r.error_rate},
        {"path", rate_path_name(r.path)},
        {"qber_defined", r.qber_defined},
    };
    if (r.qber_defined)
        j["qber"] = r.qber;
    else
        j["qber"] = nullptr;
    return j;
}

inline nlohmann::json run_qber(const RunConfig& cfg) {
    double t = transmittance({cfg.alpha, cfg.length_km});
    auto rep = qber_by_path(cfg.variant, cfg.det, t, cfg.path);
    auto validity = validate_config(cfg.variant, cfg.det);
    nlohmann::json j = config_json(cfg);
    j["length_km"] = cfg.length_km;
    j["transmittance"] = t;
    j["report"] = rate_report_json(rep);
    j["regime_ok"] = validity.regime_ok;
    j["cap_ok"] = validity.cap_ok;
    return j;
}

inline std::string sweep_csv(const SweepResult& res) {
    std::string out = "distance_km,transmittance,qber,sift_rate,error_rate\n";
    for (const auto& row : res.rows) {
        out += format_double(row.distance_km);
        out += ',';
        out += format_double(row.transmittance);
        out += ',';
        out += format_double(row.qber);
        out += ',';
        out += format_double(row.sift_rate);
        out += ',';
        out += format_double(row.error_rate);
        out += '\n';
    }
    return out;
}

inline nlohmann::json sweep_json(const SweepResult& res) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : res.rows)
        rows.push_back({{"distance_km", row.distance_km},
                        {"transmittance", row.transmittance},
                        {"qber", row.qber},
                        {"sift_rate", row.sift_rate},
                        {"error_rate", row.error_rate}});
    return {{"rows", rows}, {"degenerate_points", res.degenerate_points}};
}

inline SweepResult run_sweep(const RunConfig& cfg) {
    SweepSpec spec{cfg.variant, cfg.det,     cfg.alpha,     cfg.start_km,
                   cfg.stop_km, cfg.step_km, cfg.threshold, cfg.path};
    return distance_sweep(spec);
}

inline nlohmann::json run_maxdist(const RunConfig& cfg) {
    auto res = max_distance(cfg.variant, cfg.det, cfg.alpha, cfg.threshold, cfg.path);
    if (!res.ok) throw std::runtime_error("maxdist: " + res.reason);
    nlohmann::json j = config_json(cfg);
    j["threshold"] = cfg.threshold;
    j["path"] = rate_path_name(cfg.path);
    j["distance_km"] = res.distance_km;
    return j;
}

inline nlohmann::json run_mc(const RunConfig& cfg) {
    double t = transmittance({cfg.alpha, cfg.length_km});
    McConfig mc{cfg.trials, cfg.seed, cfg.stratified, worker_cap_from_env()};
    auto est = mc_estimate(cfg.variant, cfg.det, t, mc);
    auto ci = qber_ci99(est, cfg.variant, t);
    nlohmann::json j = config_json(cfg);
    j["length_km"] = cfg.length_km;
    j["transmittance"] = t;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["stratified"] = cfg.stratified;
    j["report"] = rate_report_json(est.report);
    j["se_sift"] = est.se_sift;
    j["se_error"] = est.se_error;
    j["se_qber"] = est.se_qber;
    j["se_degenerate"] = est.se_degenerate;
    j["qber_ci99"] = {{"lo", ci.lo}, {"hi", ci.hi}};
    j["branches"] = {{"transmitted",
                      {{"trials", est.branches[0].trials},
                       {"keep0", est.branches[0].keep0},
                       {"keep1", est.branches[0].keep1}}},
                     {"lost",
                      {{"trials", est.branches[1].trials},
                       {"keep0", est.branches[1].keep0},
                       {"keep1", est.branches[1].keep1}}}};
    return j;
}

inline nlohmann::json run_validate(const RunConfig& cfg, bool* all_pass) {
    auto v = cross_validate(std::min<std::uint64_t>(cfg.trials, 500'000), cfg.seed,
                            worker_cap_from_env());
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : v.checks)
        checks.push_back(
            {{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"detail", c.detail}});
    if (all_pass) *all_pass = v.all_pass();
    return {{"checks", checks}, {"all_pass", v.all_pass()}};
}

/// Execute one command, writing the artifact to cfg.out (or `out` when no path
/// was given). Returns the process exit status.
inline int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        std::ofstream file;
        std::ostream* sink = &out;
        if (!cfg.out.empty()) {
            file.open(cfg.out, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file '" + cfg.out + "'");
            sink = &file;
        }
        switch (cfg.subcommand) {
            case Subcommand::Qber:
                *sink << run_qber(cfg).dump(2) << '\n';
                return 0;
            case Subcommand::Sweep: {
                auto res = run_sweep(cfg);
                if (cfg.resolved_format() == OutputFormat::Csv)
                    *sink << sweep_csv(res);
                else
                    *sink << sweep_json(res).dump(2) << '\n';
                if (res.degenerate_points > 0)
                    err << "note: skipped " << res.degenerate_points
                        << " grid points with degenerate sift\n";
                return 0;
            }
            case Subcommand::MaxDist:
                *sink << run_maxdist(cfg).dump(2) << '\n';
                return 0;
            case Subcommand::Mc:
                *sink << run_mc(cfg).dump(2) << '\n';
                return 0;
            case Subcommand::Validate: {
                bool all_pass = false;
                *sink << run_validate(cfg, &all_pass).dump(2) << '\n';
                return all_pass ? 0 : 1;
            }
        }
        return 1;
    } catch (const std::exception& e) {
        err << nlohmann::json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
}

}  // namespace qkdcopy
