#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tiltpump/experiments.hpp"

using namespace tiltpump;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("tiltpump_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig tiny_scan() {
    ScenarioConfig c;
    c.name = "tiny";
    c.kind = ScenarioKind::drift_scan;
    c.ratio = RationalRatio::rational(10, 3);
    c.k_points = 8;
    c.points_per_cycle = 512;
    c.grid_k = 30;
    c.grid_t = 30;
    return c;
}

} // namespace

TEST(ScenarioKind, NamesRoundTrip) {
    for (const auto& n : scenario_kind_names())
        EXPECT_EQ(to_string(parse_scenario_kind(n)), n);
    EXPECT_THROW(parse_scenario_kind("bogus"), ConfigError);
}

TEST(Presets, EveryPresetRoundTripsThroughToml) {
    for (const auto& p : figure_presets()) {
        EXPECT_NO_THROW(validate_config(p)) << p.name;
        const auto back = parse_config(to_toml(p));
        EXPECT_EQ(back, p) << p.name << "\n" << to_toml(p);
    }
}

TEST(Presets, UnknownNameListsTheChoices) {
    try {
        find_preset("nope");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("fig3"), std::string::npos);
    }
}

TEST(Presets, CarryTheirParameterSets) {
    const auto f3 = find_preset("fig3");
    EXPECT_EQ(f3.ratio.p(), 4);
    EXPECT_EQ(f3.ratio.q(), 3);
    EXPECT_EQ(f3.cycles, 6.0);
    const auto s8 = find_preset("figS8");
    EXPECT_EQ(s8.model.Delta0, 20.0);
    EXPECT_EQ(s8.model.omega, 0.02);
    EXPECT_EQ(s8.variants.size(), 3u);
}

TEST(ParseConfig, EmptyConfigIsRejected) {
    EXPECT_THROW(parse_config(""), ConfigError);
}

TEST(ParseConfig, EmptyConfigWritesNothing) {
    const auto dir = scratch("empty");
    const auto file = fs::temp_directory_path() / "tiltpump_test_empty.toml";
    std::ofstream(file) << "";
    EXPECT_THROW(load_config(file), ConfigError);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(ParseConfig, RejectsUnknownKeysAndBadTypes) {
    EXPECT_THROW(parse_config("[scenario]\nkind = \"drift_scan\"\ncolour = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[scenario]\nkind = \"drift_scan\"\n[extra]\n"), ConfigError);
    EXPECT_THROW(parse_config("[scenario]\nkind = \"drift_scan\"\n[model]\nomega = \"x\"\n"),
                 ConfigError);
    EXPECT_THROW(parse_config("[scenario]\nkind = \"drift_scan\"\n[model]\nratio = \"2/4\"\n"),
                 ConfigError);
    EXPECT_THROW(parse_config("not toml ["), ConfigError);
}

TEST(ParseConfig, ReadsRatiosInEveryForm) {
    auto c = parse_config("[scenario]\nkind = \"drift_scan\"\n[model]\nratio = \"11/7\"\n");
    EXPECT_EQ(c.ratio.p(), 11);
    EXPECT_EQ(c.ratio.q(), 7);
    c = parse_config("[scenario]\nkind = \"drift_scan\"\n[model]\nratio = 4\n");
    EXPECT_EQ(c.ratio.p(), 4);
    c = parse_config("[scenario]\nkind = \"irrational_longtime\"\n[model]\nratio = 1.5\n");
    EXPECT_FALSE(c.ratio.is_rational());
}

TEST(Overrides, ApplyDottedKeys) {
    auto c = tiny_scan();
    apply_override(c, "model.omega", "0.05");
    apply_override(c, "model.ratio", "11/7");
    apply_override(c, "run.stepper", "midpoint");
    EXPECT_EQ(c.model.omega, 0.05);
    EXPECT_EQ(c.ratio.q(), 7);
    EXPECT_EQ(c.stepper, Stepper::midpoint);
    EXPECT_THROW(apply_override(c, "model.nothing", "1"), ConfigError);
}

TEST(Validate, CatchesOutOfRangeValues) {
    auto c = tiny_scan();
    c.k_points = 0;
    EXPECT_THROW(validate_config(c), ConfigError);
    c = tiny_scan();
    c.variants = {{"a", {{"model.omega", "0.0"}}}};
    EXPECT_THROW(validate_config(c), ConfigError);
    c = tiny_scan();
    c.variants = {{"a", {}}, {"a", {}}};
    EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(RunScenario, WritesCsvSummaryAndConfigEcho) {
    const auto dir = scratch("scan");
    RunOptions o;
    o.out_dir = dir;
    const auto r = run_scenario(tiny_scan(), o);
    ASSERT_EQ(r.variants.size(), 1u);
    EXPECT_TRUE(fs::exists(dir / "config.toml"));
    EXPECT_EQ(parse_config(slurp(dir / "config.toml")), tiny_scan());
    const auto summary = nlohmann::json::parse(slurp(r.summary_path));
    EXPECT_EQ(summary["schema_version"], 1);
    EXPECT_EQ(summary["kind"], "drift_scan");
    const auto& v = summary["variants"][0];
    for (const auto& [key, val] : v["scalars"].items()) {
        ASSERT_TRUE(val.contains("source")) << key;
        EXPECT_TRUE(fs::exists(dir / val["source"].get<std::string>())) << key;
    }
    for (const auto& f : v["files"]) {
        const auto text = slurp(dir / f["path"].get<std::string>());
        const auto header = text.substr(0, text.find('\n'));
        EXPECT_EQ(header.substr(0, header.find(',')), f["columns"][0].get<std::string>());
    }
    EXPECT_LT(std::abs(r.variants[0].scalars.at("max_deviation_from_chern").value), 1e-3);
}

TEST(RunScenario, IsDeterministic) {
    RunOptions o;
    o.out_dir = scratch("det1");
    const auto a = run_scenario(tiny_scan(), o);
    o.out_dir = scratch("det2");
    o.threads = 3;
    const auto b = run_scenario(tiny_scan(), o);
    for (const auto& f : a.variants[0].files)
        EXPECT_EQ(slurp(a.directory / f.path), slurp(b.directory / f.path)) << f.path;
}

TEST(RunScenario, ShortQuantumRunReportsDiagnostics) {
    ScenarioConfig c;
    c.name = "short";
    c.kind = ScenarioKind::quantum_evolution;
    c.model.L_sites = 120;
    c.ratio = RationalRatio::rational(4, 3);
    c.sigma = 8.0;
    c.j0 = 60.0;
    c.cycles = 0.2;
    c.steps_per_cycle = 500;
    c.samples_per_cycle = 50;
    c.record_momentum = true;
    RunOptions o;
    o.out_dir = scratch("quantum");
    const auto r = run_scenario(c, o);
    const auto& s = r.variants[0].scalars;
    EXPECT_LT(s.at("max_norm_drift").value, 1e-8);
    EXPECT_LT(s.at("max_semiclassical_gap").value, 0.3);
    EXPECT_FALSE(r.variants[0].flags.at("edge_warning").value);
}

TEST(RunScenario, RejectsInvalidConfigBeforeWriting) {
    auto c = tiny_scan();
    c.points_per_cycle = 0;
    RunOptions o;
    o.out_dir = scratch("invalid");
    EXPECT_THROW(run_scenario(c, o), ConfigError);
    EXPECT_FALSE(fs::exists(o.out_dir));
}
