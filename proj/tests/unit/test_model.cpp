#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tiltpump/model.hpp"

using namespace tiltpump;

TEST(ModelParams, DefaultsAreTheStandardPumpValues) {
    ModelParams p;
    EXPECT_EQ(p.J, -1.0);
    EXPECT_EQ(p.delta0, 0.8);
    EXPECT_EQ(p.Delta0, 2.0);
    EXPECT_EQ(p.d, 2);
    EXPECT_EQ(p.L_sites, 300);
    EXPECT_EQ(p.cells(), 150);
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.modulation_period(), 2 * std::numbers::pi / 0.03, 1e-12);
    EXPECT_TRUE(std::isinf(p.bloch_period()));
}

TEST(ModelParams, RejectsInvalidValues) {
    auto bad = [](auto mutate) {
        ModelParams p;
        mutate(p);
        EXPECT_THROW(p.validate(), ParameterError);
    };
    bad([](ModelParams& p) { p.omega = 0.0; });
    bad([](ModelParams& p) { p.L_sites = 301; });
    bad([](ModelParams& p) { p.L_sites = 2; });
    bad([](ModelParams& p) { p.d = 3; });
    bad([](ModelParams& p) { p.J = std::nan(""); });
    bad([](ModelParams& p) { p.delta0 = 0.0; });
    bad([](ModelParams& p) { p.Delta0 = 0.0; });
    bad([](ModelParams& p) { p.J = 0.0; });
}

TEST(RationalRatio, ChecksCoprimality) {
    EXPECT_THROW(RationalRatio::rational(2, 4), ParameterError);
    EXPECT_THROW(RationalRatio::rational(1, 0), ParameterError);
    EXPECT_THROW(RationalRatio::rational(3, -1), ParameterError);
    const auto r = RationalRatio::rational(10, 3);
    EXPECT_EQ(r.p(), 10);
    EXPECT_EQ(r.q(), 3);
    EXPECT_TRUE(r.is_rational());
    EXPECT_NEAR(r.value(), 10.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.overall_period(0.03), 3 * 2 * std::numbers::pi / 0.03, 1e-9);
    EXPECT_NO_THROW(RationalRatio::rational(0, 1));
}

TEST(RationalRatio, IrrationalHasNoOverallPeriod) {
    const auto g = RationalRatio::irrational((1 + std::sqrt(5.0)) / 2);
    EXPECT_FALSE(g.is_rational());
    EXPECT_THROW(g.overall_period(0.01), ParameterError);
    EXPECT_THROW(RationalRatio::irrational(INFINITY), ParameterError);
}

TEST(ModelParams, WithRatioSetsTiltFrequency) {
    ModelParams p;
    const auto q = with_ratio(p, RationalRatio::rational(4, 3));
    EXPECT_NEAR(q.omega_F, 0.04, 1e-15);
    EXPECT_NEAR(q.bloch_period(), std::numbers::pi / 0.04, 1e-12);
}

TEST(RealSpaceHamiltonian, MatchesSiteFormula) {
    ModelParams p;
    p.L_sites = 40;
    p.omega_F = 0.07;
    p.phi0 = 0.3;
    for (double t : {0.0, 3.7, 51.0}) {
        const Eigen::MatrixXd ref = oracle::real_space(p, t);
        const auto dense = build_real_space_hamiltonian(p, t);
        EXPECT_LT((dense - ref.cast<std::complex<double>>()).norm(), 1e-13);
        EXPECT_LT((dense - dense.adjoint()).norm(), 1e-15);
        const auto tri = build_tridiagonal_hamiltonian(p, t);
        ASSERT_EQ(tri.size(), 40u);
        ASSERT_EQ(tri.off_diagonal.size(), 39u);
        for (int j = 0; j < 40; ++j)
            EXPECT_NEAR(tri.diagonal[j], ref(j, j), 1e-13);
        for (int j = 0; j < 39; ++j)
            EXPECT_NEAR(tri.off_diagonal[j], ref(j, j + 1), 1e-13);
    }
}

TEST(BlochField, MatchesFourierTransformOfTheLattice) {
    ModelParams p;
    p.omega_F = 0.04;
    for (double k : {-1.2, -0.4, 0.0, 0.9, 1.5}) {
        for (double t : {0.0, 20.0, 133.0}) {
            const auto h = bloch_field(k, t, p);
            const auto H = oracle::tilted_bloch_matrix(k, t, p);
            EXPECT_NEAR(h.z, H(0, 0).real(), 1e-13);
            EXPECT_NEAR(h.x, H(0, 1).real(), 1e-13);
            EXPECT_NEAR(h.y, -H(0, 1).imag(), 1e-13);
            EXPECT_NEAR(h.norm(), std::sqrt(h.x * h.x + h.y * h.y + h.z * h.z), 1e-14);
        }
    }
}

TEST(BlochField, UntiltedIgnoresTheTilt) {
    ModelParams p;
    p.omega_F = 0.3;
    const auto a = bloch_field_untilted(0.4, 12.0, p);
    p.omega_F = 0.0;
    const auto b = bloch_field(0.4, 12.0, p);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.z, b.z);
}

TEST(WrapToZone, MapsIntoHalfOpenZone) {
    const double pi = std::numbers::pi;
    EXPECT_NEAR(wrap_to_zone(0.0), 0.0, 1e-15);
    EXPECT_NEAR(wrap_to_zone(pi / 2), -pi / 2, 1e-15);
    EXPECT_NEAR(wrap_to_zone(-pi / 2), -pi / 2, 1e-15);
    EXPECT_NEAR(wrap_to_zone(pi), 0.0, 1e-12);
    EXPECT_NEAR(wrap_to_zone(-0.1 - 3 * pi), -0.1, 1e-12);
    for (double k = -20; k < 20; k += 0.37) {
        const double w = wrap_to_zone(k);
        EXPECT_GE(w, -pi / 2);
        EXPECT_LT(w, pi / 2);
        EXPECT_NEAR(std::remainder(k - w, pi), 0.0, 1e-12);
    }
}
