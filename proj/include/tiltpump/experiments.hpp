#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tiltpump/band_geometry.hpp"
#include "tiltpump/continuum.hpp"
#include "tiltpump/model.hpp"
#include "tiltpump/propagator.hpp"

namespace tiltpump {

/// Thrown for malformed or invalid scenario configurations.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ScenarioKind {
    drift_scan,
    variance_study,
    quantum_evolution,
    wannier_pump,
    irrational_longtime,
    continuum_pump,
    chern_map,
};

enum class PacketKind { gaussian, wannier };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& text);
std::vector<std::string> scenario_kind_names();

/// Named set of overrides applied on top of the base scenario. Each override
/// is a dotted key ("model.omega") and a TOML literal ("0.05", "\"10/3\"").
struct Variant {
    std::string name;
    std::vector<std::pair<std::string, std::string>> overrides;

    bool operator==(const Variant&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    ScenarioKind kind = ScenarioKind::drift_scan;
    std::string description;

    // [model]; model.omega_F is derived from ratio
    ModelParams model;
    RationalRatio ratio = RationalRatio::rational(0, 1);
    Band band = Band::lower;

    // [packet]
    PacketKind packet = PacketKind::gaussian;
    double sigma = 15.0;
    double j0 = 101.0;
    double k0 = 0.0;
    int wannier_cell = 50;

    // [run]
    int k_points = 64;
    int points_per_cycle = 4096;
    std::vector<int> p_values;
    double cycles = 1.0;         ///< horizon in modulation periods
    int steps_per_cycle = 2000;
    int samples_per_cycle = 200;
    Stepper stepper = Stepper::magnus4;
    bool record_momentum = false;
    int snapshot_every = 0;      ///< samples between density snapshots; 0 disables
    bool dt_check = false;
    int grid_k = 100;
    int grid_t = 100;

    // [continuum]
    ContinuumParams continuum;
    double continuum_dt = 0.05;
    SplitScheme continuum_scheme = SplitScheme::fourth_order;

    // [output]
    int precision = 12;

    std::vector<Variant> variants;

    /// The tight-binding parameters with omega_F = ratio * omega.
    ModelParams tilted_model() const { return with_ratio(model, ratio); }

    bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(const std::string& toml_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string to_toml(const ScenarioConfig& config);

/// Applies one dotted-key override. The value is read as a TOML literal and
/// falls back to a plain string ("model.ratio=10/3").
void apply_override(ScenarioConfig& config, const std::string& key, const std::string& value);

/// Base config with the variant's overrides applied (variants cleared).
ScenarioConfig resolve_variant(const ScenarioConfig& config, const Variant& variant);

/// Checks every parameter of the base scenario and of each variant.
/// Throws ConfigError with the offending key on failure.
void validate_config(const ScenarioConfig& config);

/// Named figure presets.
std::vector<ScenarioConfig> figure_presets();
ScenarioConfig find_preset(const std::string& name);

struct OutputFile {
    std::string path; ///< relative to the run directory
    std::string description;
    std::vector<std::string> columns;
    std::size_t rows = 0;
};

/// A summary value and the data file it was computed from.
struct SummaryValue {
    double value = 0.0;
    std::string source;
};

struct SummaryFlag {
    bool value = false;
    std::string source;
};

struct VariantResult {
    std::string name;
    std::map<std::string, SummaryValue> scalars;
    std::map<std::string, SummaryFlag> flags;
    std::vector<OutputFile> files;
};

struct RunOptions {
    std::filesystem::path out_dir;
    int threads = 1;
    std::uint64_t seed = 0; ///< reserved; every scenario is deterministic
};

struct RunResult {
    ScenarioConfig config;
    std::vector<VariantResult> variants;
    std::vector<std::string> diagnostics;
    double wall_clock_seconds = 0.0;
    std::filesystem::path directory;
    std::filesystem::path summary_path;
};

/// Validates the config, runs every variant and writes CSV files, the
/// config echo (config.toml) and summary.json into options.out_dir.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options);

/// Output root from TILTPUMP_OUTPUT_ROOT, else "runs".
std::filesystem::path default_output_root();

} // namespace tiltpump
