#include <gtest/gtest.h>

#include <cmath>

#include "tiltpump/continuum.hpp"
#include "tiltpump/model.hpp"

using namespace tiltpump;

namespace {

// Trap-dominated box: the lattice is switched (almost) off so the harmonic
// oscillator gives closed-form references. Kinetic term k^2 / pi^2 means a
// mass m = pi^2 / 2.
ContinuumParams harmonic() {
    ContinuumParams c;
    c.Vs = 1e-12;
    c.Vl = 1e-12;
    c.omega = 0.01;
    c.F_over_homega = 1.0;
    c.box_cells = 32;
    c.points_per_cell = 16;
    c.trap_gamma = 1e-2;
    c.trap_x0 = 5.0;
    return c;
}

constexpr double mass = std::numbers::pi * std::numbers::pi / 2;

const GroundStateResult& harmonic_ground() {
    static const GroundStateResult g = continuum_ground_state(harmonic());
    return g;
}

} // namespace

TEST(ContinuumParams, ValidatesGridAndDepths) {
    EXPECT_NO_THROW(ContinuumParams{}.validate());
    auto bad = [](auto mutate) {
        ContinuumParams c;
        mutate(c);
        EXPECT_THROW(c.validate(), ParameterError);
    };
    bad([](ContinuumParams& c) { c.Vs = 0.0; });
    bad([](ContinuumParams& c) { c.Vl = -1.0; });
    bad([](ContinuumParams& c) { c.omega = 0.0; });
    bad([](ContinuumParams& c) { c.points_per_cell = 24; });
    bad([](ContinuumParams& c) { c.trap_gamma = -1.0; });
}

TEST(ContinuumGrid, IsCentredOnTheTrap) {
    const auto c = harmonic();
    const auto x = continuum_grid(c);
    ASSERT_EQ(static_cast<int>(x.size()), c.points());
    EXPECT_NEAR(x.front(), c.trap_x0 - 32.0, 1e-12);
    EXPECT_NEAR(x[1] - x[0], c.dx(), 1e-15);
}

TEST(GroundState, MatchesTheHarmonicOscillator) {
    const auto c = harmonic();
    const auto& g = harmonic_ground();
    const double w = std::sqrt(c.trap_gamma / mass);
    EXPECT_NEAR(g.energy, 0.5 * w, 1e-6);
    EXPECT_NEAR(g.width, std::sqrt(1.0 / (2.0 * mass * w)), 1e-4);
    EXPECT_NEAR(g.centroid, c.trap_x0, 1e-8);
    EXPECT_NEAR(continuum_norm(g.state, c), 1.0, 1e-12);
    ASSERT_EQ(g.stages.size(), 3u);
    for (const auto& s : g.stages)
        EXPECT_LT(s.relative_change_per_step, 1e-12);
    EXPECT_NEAR(continuum_trap_energy(g.state, c), g.energy, 1e-12);
}

TEST(GroundState, NeedsATrapAndAStepBudget) {
    auto c = harmonic();
    c.trap_gamma = 0.0;
    EXPECT_THROW(continuum_ground_state(c), ParameterError);
    GroundStateOptions o;
    o.max_steps_per_stage = 100;
    EXPECT_THROW(continuum_ground_state(harmonic(), o), ConvergenceError);
    o = {};
    o.dt_schedule = {};
    EXPECT_THROW(continuum_ground_state(harmonic(), o), ParameterError);
}

TEST(ContinuumEvolve, AcceleratesUnderTheTilt) {
    const auto c = harmonic();
    ContinuumEvolveOptions o;
    o.t_end = 50.0;
    o.dt = 0.01;
    const auto tr = continuum_evolve(harmonic_ground().state, c, o);
    const double expected = -c.force() * o.t_end * o.t_end / (2.0 * mass);
    EXPECT_NEAR(tr.positions.back() - tr.positions.front(), expected, 1e-4);
    for (double n : tr.norms)
        EXPECT_NEAR(n, 1.0, 1e-10);
    EXPECT_NEAR(tr.times.back(), o.t_end, 1e-12);
    EXPECT_FALSE(tr.edge_warning);
}

TEST(ContinuumEvolve, ZeroDurationKeepsTheState) {
    ContinuumEvolveOptions o;
    o.t_end = 0.0;
    const auto& g = harmonic_ground();
    const auto tr = continuum_evolve(g.state, harmonic(), o);
    ASSERT_EQ(tr.times.size(), 1u);
    EXPECT_EQ(tr.final_state.psi, g.state.psi);
}

TEST(ContinuumEvolve, RejectsMismatchedInput) {
    ContinuumEvolveOptions o;
    o.t_end = 1.0;
    ContinuumState s;
    s.psi.assign(10, 0.0);
    EXPECT_THROW(continuum_evolve(s, harmonic(), o), ParameterError);
    o.dt = -1.0;
    EXPECT_THROW(continuum_evolve(harmonic_ground().state, harmonic(), o), ParameterError);
}

TEST(ContinuumEvolve, NonFiniteStateThrows) {
    auto s = harmonic_ground().state;
    s.psi[7] = {std::nan(""), 0.0};
    ContinuumEvolveOptions o;
    o.t_end = 1.0;
    EXPECT_THROW(continuum_evolve(s, harmonic(), o), NumericalError);
}

TEST(ContinuumEvolve, FourthOrderSplittingBeatsStrang) {
    auto c = harmonic();
    c.Vs = 0.5;
    c.Vl = 0.3;
    c.omega = 0.2;
    const auto& g = harmonic_ground();
    auto final_x = [&](SplitScheme s, double dt) {
        ContinuumEvolveOptions o;
        o.t_end = 20.0;
        o.dt = dt;
        o.scheme = s;
        return continuum_evolve(g.state, c, o).positions.back();
    };
    const double ref = final_x(SplitScheme::fourth_order, 0.001);
    const double e2 = std::abs(final_x(SplitScheme::strang, 0.02) - ref);
    const double e2h = std::abs(final_x(SplitScheme::strang, 0.01) - ref);
    const double e4 = std::abs(final_x(SplitScheme::fourth_order, 0.02) - ref);
    const double e4h = std::abs(final_x(SplitScheme::fourth_order, 0.01) - ref);
    EXPECT_NEAR(std::log2(e2 / e2h), 2.0, 0.3);
    EXPECT_NEAR(std::log2(e4 / e4h), 4.0, 0.5);
    EXPECT_LT(e4, e2);
}
