// Command-line front end: runs scenario configs and figure presets and
// launches the acceptance suite.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tiltpump/experiments.hpp"

#ifndef TILTPUMP_ACCEPTANCE_BINARY
#define TILTPUMP_ACCEPTANCE_BINARY "tiltpump_acceptance"
#endif

namespace fs = std::filesystem;
using namespace tiltpump;

namespace {

struct CommonFlags {
    std::string out;
    int threads = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--out", f.out, "Output directory (default: $TILTPUMP_OUTPUT_ROOT/<name>)");
    cmd->add_option("--threads", f.threads, "Worker threads for scan-type scenarios")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "Reserved; all scenarios are deterministic");
    cmd->add_option("--set", f.overrides, "Override a config field, e.g. model.omega=0.05");
}

void apply_flags(ScenarioConfig& config, const CommonFlags& f) {
    for (const auto& o : f.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + o + "'");
        apply_override(config, o.substr(0, eq), o.substr(eq + 1));
    }
}

int execute(ScenarioConfig config, const CommonFlags& f) {
    apply_flags(config, f);
    validate_config(config);
    RunOptions opts;
    opts.out_dir = f.out.empty() ? default_output_root() / config.name : fs::path(f.out);
    opts.threads = f.threads;
    opts.seed = f.seed;
    const auto result = run_scenario(config, opts);

    std::cout << "scenario " << config.name << " (" << to_string(config.kind) << ") -> "
              << result.directory.string() << "\n";
    for (const auto& v : result.variants) {
        std::cout << "  [" << v.name << "]\n";
        for (const auto& [key, s] : v.scalars)
            std::cout << "    " << key << " = " << s.value << "\n";
        for (const auto& [key, fl] : v.flags)
            std::cout << "    " << key << " = " << (fl.value ? "true" : "false") << "\n";
    }
    for (const auto& d : result.diagnostics)
        std::cerr << "warning: " << d << "\n";
    std::cout << "summary: " << result.summary_path.string() << " (" << result.wall_clock_seconds
              << " s)\n";
    return 0;
}

fs::path acceptance_binary(const char* argv0) {
    const fs::path configured = TILTPUMP_ACCEPTANCE_BINARY;
    if (fs::exists(configured))
        return configured;
    std::error_code ec;
    const auto self = fs::canonical(argv0, ec);
    if (!ec) {
        for (const auto& candidate : {self.parent_path() / "tiltpump_acceptance",
                                      self.parent_path().parent_path() / "tests" /
                                          "tiltpump_acceptance"})
            if (fs::exists(candidate))
                return candidate;
    }
    return configured;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tilted superlattice pumping experiments"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a scenario from a TOML config file");
    run->add_option("config", config_path, "Scenario config (TOML)")->required()->check(CLI::ExistingFile);
    add_common(run, run_flags);

    CommonFlags preset_flags;
    std::string preset_name;
    bool dump = false;
    auto* preset = app.add_subcommand("preset", "Run a named figure preset");
    preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
    preset->add_flag("--dump", dump, "Print the preset as TOML instead of running it");
    add_common(preset, preset_flags);

    auto* list = app.add_subcommand("list-presets", "List the figure presets");

    std::vector<std::string> check_args;
    auto* check = app.add_subcommand("check", "Run the acceptance suite");
    check->add_option("args", check_args, "Arguments passed to the acceptance binary");
    check->allow_extras();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return execute(load_config(config_path), run_flags);
        if (*preset) {
            auto config = find_preset(preset_name);
            if (dump) {
                apply_flags(config, preset_flags);
                std::cout << to_toml(config);
                return 0;
            }
            return execute(config, preset_flags);
        }
        if (*list) {
            for (const auto& p : figure_presets())
                std::cout << p.name << "\t" << to_string(p.kind) << "\t" << p.description << "\n";
            return 0;
        }
        if (*check) {
            std::string cmd = "\"" + acceptance_binary(argv[0]).string() + "\"";
            for (const auto& a : check_args)
                cmd += " \"" + a + "\"";
            const int rc = std::system(cmd.c_str());
            return rc == 0 ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
