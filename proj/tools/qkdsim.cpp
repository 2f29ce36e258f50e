#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkdcopy/run.hpp"

namespace {

struct FlagValues {
    std::vector<std::pair<std::string, std::string>> settings;
};

// Every config key doubles as a --flag; flag values override the config file.
void add_common_flags(CLI::App* app, FlagValues& flags) {
    static const char* keys[] = {"variant", "d",         "m",       "eta",     "dark_p",
                                 "p_opt",   "alpha",     "length_km", "threshold", "start_km",
                                 "stop_km", "step_km",   "trials",  "seed",    "stratified",
                                 "path",    "out",       "format"};
    for (const char* key : keys) {
        std::string k = key;
        app->add_option_function<std::string>(
            "--" + k, [&flags, k](const std::string& v) { flags.settings.emplace_back(k, v); });
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Copy-group single-photon-detector QKD simulator"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "flat key=value config file");

    FlagValues flags;
    struct Sub {
        const char* name;
        const char* desc;
        qkdcopy::Subcommand cmd;
    };
    const Sub subs[] = {
        {"qber", "compute one rate report at a fixed distance", qkdcopy::Subcommand::Qber},
        {"sweep", "distance sweep, CSV output", qkdcopy::Subcommand::Sweep},
        {"maxdist", "maximum distance at the QBER threshold", qkdcopy::Subcommand::MaxDist},
        {"mc", "Monte Carlo estimate with standard errors", qkdcopy::Subcommand::Mc},
        {"validate", "cross-validate analytic, oracle, and Monte Carlo paths",
         qkdcopy::Subcommand::Validate},
    };
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.desc);
        add_common_flags(sub, flags);
        sub->callback([&, cmd = s.cmd] {
            qkdcopy::RunConfig cfg;
            cfg.subcommand = cmd;
            try {
                if (!config_path.empty()) qkdcopy::parse_config_file(cfg, config_path);
                for (const auto& [key, value] : flags.settings)
                    qkdcopy::apply_setting(cfg, key, value);
            } catch (const std::exception& e) {
                std::cerr << nlohmann::json{{"error", e.what()}}.dump() << '\n';
                std::exit(1);
            }
            std::exit(qkdcopy::run_command(cfg, std::cout, std::cerr));
        });
    }

    CLI11_PARSE(app, argc, argv);
    return 0;
}
