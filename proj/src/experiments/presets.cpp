#include <algorithm>
#include <cmath>

#include "tiltpump/experiments.hpp"

namespace tiltpump {

namespace {

Variant variant(std::string name, std::vector<std::pair<std::string, std::string>> overrides) {
    std::stable_sort(overrides.begin(), overrides.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    return {std::move(name), std::move(overrides)};
}

ScenarioConfig base(const char* name, ScenarioKind kind, const char* description) {
    ScenarioConfig c;
    c.name = name;
    c.kind = kind;
    c.description = description;
    c.model = ModelParams{};
    c.model.J = -1.0;
    c.model.Delta0 = 2.0;
    c.model.delta0 = 0.8;
    c.model.omega = 0.03;
    c.model.phi0 = 0.0;
    c.model.L_sites = 300;
    return c;
}

ScenarioConfig fig2c() {
    auto c = base("fig2c", ScenarioKind::drift_scan,
                  "Drift of a Bloch state over q modulation cycles versus k0, with and without tilt");
    c.ratio = RationalRatio::rational(10, 3);
    c.k_points = 64;
    c.variants = {variant("tilted", {{"model.ratio", "'10/3'"}}),
                  variant("untilted", {{"model.ratio", "'0/1'"}})};
    return c;
}

ScenarioConfig fig3() {
    auto c = base("fig3", ScenarioKind::quantum_evolution,
                  "Quantized drifting Bloch oscillations of a Gaussian packet over two overall periods");
    c.ratio = RationalRatio::rational(4, 3);
    c.sigma = 15.0;
    c.j0 = 101.0;
    c.k0 = 0.0;
    c.cycles = 6.0;
    c.record_momentum = true;
    c.snapshot_every = 20;
    return c;
}

ScenarioConfig fig4() {
    auto c = base("fig4", ScenarioKind::quantum_evolution,
                  "Tilted topological pumping versus untilted geometric and Thouless pumping");
    c.model.omega = 0.05;
    c.ratio = RationalRatio::rational(10, 3);
    c.sigma = 15.0;
    c.j0 = 101.0;
    c.k0 = 0.0;
    c.cycles = 6.0;
    c.snapshot_every = 20;
    c.variants = {
        variant("topological", {}),
        variant("geometric", {{"model.ratio", "'0/1'"}, {"model.L_sites", "2000"},
                              {"packet.j0", "1001.0"}}),
        variant("thouless", {{"model.ratio", "'0/1'"},
                             {"model.L_sites", "2000"},
                             {"packet.kind", "'wannier'"},
                             {"packet.wannier_cell", "500"}}),
    };
    return c;
}

ScenarioConfig figS2() {
    auto c = base("figS2", ScenarioKind::variance_study,
                  "Spread of the drift per q d across k0 versus p for omega_F / omega = p / 3");
    c.ratio = RationalRatio::rational(1, 3);
    c.p_values = {1, 2, 4, 5, 7, 8, 10, 11};
    c.k_points = 64;
    return c;
}

ScenarioConfig figS4() {
    auto c = base("figS4", ScenarioKind::irrational_longtime,
                  "Long-time average drift for the golden-ratio tilt");
    c.model.omega = 0.01;
    c.ratio = RationalRatio::irrational((std::sqrt(5.0) + 1.0) / 2.0);
    c.j0 = 120.0;
    c.k0 = 0.0;
    c.cycles = 50.0;
    return c;
}

ScenarioConfig figS5() {
    auto c = base("figS5", ScenarioKind::quantum_evolution,
                  "Band occupations in the adiabatic and Landau-Zener regimes");
    c.j0 = 120.0;
    c.cycles = 3.0;
    c.ratio = RationalRatio::rational(13, 3);
    c.variants = {variant("adiabatic", {{"model.ratio", "'13/3'"}}),
                  variant("breakdown", {{"model.ratio", "'130/3'"}})};
    return c;
}

ScenarioConfig figS7() {
    auto c = base("figS7", ScenarioKind::quantum_evolution,
                  "Initial versus final width after 50 modulation periods at omega_F = 4 omega");
    c.ratio = RationalRatio::rational(4, 1);
    c.model.L_sites = 400;
    c.j0 = 101.0;
    c.cycles = 50.0;
    c.samples_per_cycle = 20;
    c.snapshot_every = 1000;
    c.variants = {variant("narrow", {{"packet.sigma", "1.5"}}),
                  variant("wide", {{"packet.sigma", "15.0"}})};
    return c;
}

ScenarioConfig figS8() {
    auto c = base("figS8", ScenarioKind::wannier_pump,
                  "Pumping of a flat-band Wannier state for three tilt ratios");
    c.model.Delta0 = 20.0;
    c.model.omega = 0.02;
    c.packet = PacketKind::wannier;
    c.wannier_cell = 50;
    c.cycles = 1.0;
    c.snapshot_every = 20;
    c.ratio = RationalRatio::rational(1, 2);
    c.variants = {
        variant("half", {{"model.ratio", "'1/2'"}}),
        variant("four", {{"model.ratio", "'4/1'"}}),
        variant("golden", {{"model.ratio", "1.618033988749895"}}),
    };
    return c;
}

ScenarioConfig appE() {
    auto c = base("appE", ScenarioKind::continuum_pump,
                  "Continuous-space superlattice pumping over one overall period");
    c.continuum = ContinuumParams{};
    c.cycles = 3.0;
    c.continuum_dt = 0.05;
    return c;
}

} // namespace

std::vector<ScenarioConfig> figure_presets() {
    return {fig2c(), fig3(), fig4(), figS2(), figS4(), figS5(), figS7(), figS8(), appE()};
}

ScenarioConfig find_preset(const std::string& name) {
    for (auto& p : figure_presets())
        if (p.name == name)
            return p;
    std::string list;
    for (const auto& p : figure_presets())
        list += (list.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown preset '" + name + "' (available: " + list + ")");
}

} // namespace tiltpump
