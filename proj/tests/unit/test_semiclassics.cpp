#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "tiltpump/semiclassics.hpp"

using namespace tiltpump;

namespace {

ModelParams with(const RationalRatio& r) { return with_ratio(ModelParams{}, r); }

} // namespace

TEST(SemiclassicalDrift, MatchesTrapezoidOracle) {
    const auto p = with(RationalRatio::rational(10, 3));
    const double tau = 3 * p.modulation_period();
    for (double k0 : {-1.1, 0.0, 0.6}) {
        const auto d = semiclassical_drift(k0, p, Band::lower, tau);
        EXPECT_NEAR(d.total(), oracle::drift(k0, p, 0, tau, 6000), 1e-6) << k0;
    }
}

TEST(SemiclassicalDrift, ZeroSpanGivesZero) {
    const auto d = semiclassical_drift(0.3, ModelParams{}, Band::lower, 0.0);
    EXPECT_EQ(d.total(), 0.0);
    EXPECT_THROW(semiclassical_drift(0.3, ModelParams{}, Band::lower, -1.0), ParameterError);
}

TEST(SemiclassicalDrift, SeriesAccumulatesToTheSingleIntegral) {
    const auto p = with(RationalRatio::rational(4, 3));
    const double Tm = p.modulation_period();
    std::vector<double> times;
    for (int i = 0; i <= 12; ++i)
        times.push_back(i * Tm / 2);
    const auto s = semiclassical_drift_series(0.2, p, Band::lower, times);
    ASSERT_EQ(s.size(), times.size());
    EXPECT_EQ(s.front().total(), 0.0);
    EXPECT_NEAR(s.back().total(), semiclassical_drift(0.2, p, Band::lower, 6 * Tm).total(), 1e-9);
    EXPECT_THROW(semiclassical_drift_series(0.2, p, Band::lower, {1.0, 0.5}), ParameterError);
}

TEST(SemiclassicalDrift, DispersionIntegratesToZeroOverTheOverallPeriod) {
    for (auto r : {RationalRatio::rational(10, 3), RationalRatio::rational(11, 7)}) {
        const auto p = with(r);
        for (double k0 : {-1.5, -0.3, 0.8}) {
            const auto d = semiclassical_drift(k0, p, Band::lower, r.overall_period(p.omega));
            EXPECT_LT(std::abs(d.dispersion) / (r.q() * p.d), 1e-8) << r.p() << "/" << r.q();
        }
    }
}

TEST(SemiclassicalDrift, DispersionResidueShrinksWithThePeriod) {
    // Only Fourier harmonics commensurate with the closed (K, phi) orbit
    // survive, so the residue falls off exponentially in p + q.
    double previous = INFINITY;
    for (auto r : {RationalRatio::rational(1, 1), RationalRatio::rational(4, 3),
                   RationalRatio::rational(10, 3)}) {
        const auto p = with(r);
        const auto d = semiclassical_drift(0.4, p, Band::lower, r.overall_period(p.omega));
        const double residue = std::abs(d.dispersion) / (r.q() * p.d);
        EXPECT_LT(residue, previous);
        previous = residue;
    }
}

TEST(SemiclassicalDrift, CurvatureIntegralEqualsReducedChern) {
    const auto r = RationalRatio::rational(11, 7);
    const auto p = with(r);
    const double k0 = 0.37;
    const auto d = semiclassical_drift(k0, p, Band::lower, r.overall_period(p.omega));
    EXPECT_NEAR(d.curvature / p.d, reduced_chern(k0, p, r), 1e-10);
}

TEST(DriftScan, IsQuantizedForTenThirds) {
    const auto scan = drift_k_scan(ModelParams{}, Band::lower, RationalRatio::rational(10, 3), 64);
    ASSERT_EQ(scan.drifts.size(), 64u);
    EXPECT_NEAR(scan.k0_values.front(), -std::numbers::pi / 2, 1e-15);
    for (double v : scan.drift_per_qd())
        EXPECT_LT(std::abs(v - 1.0), 1e-3);
}

TEST(DriftScan, UpperBandPumpsBackwards) {
    const auto scan = drift_k_scan(ModelParams{}, Band::upper, RationalRatio::rational(11, 7), 8);
    for (double v : scan.drift_per_qd())
        EXPECT_NEAR(v, -1.0, 1e-10);
}

TEST(DriftScan, ThreadCountDoesNotChangeTheResult) {
    const auto r = RationalRatio::rational(10, 3);
    const auto a = drift_k_scan(ModelParams{}, Band::lower, r, 16, 1024, 1);
    const auto b = drift_k_scan(ModelParams{}, Band::lower, r, 16, 1024, 4);
    EXPECT_EQ(a.drifts, b.drifts);
}

TEST(DriftScan, UntiltedDriftDependsOnMomentum) {
    const auto scan = drift_k_scan(ModelParams{}, Band::lower, RationalRatio::rational(0, 1), 64);
    const auto v = scan.drift_per_qd();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    EXPECT_GT(*hi - *lo, 0.1);
}

TEST(QuantizationVariance, DecreasesWithP) {
    const std::vector<int> ps{1, 2, 4, 5, 7, 8, 10, 11};
    const auto rows = quantization_variance(ModelParams{}, Band::lower, 3, ps, 32, 1024, 4);
    ASSERT_EQ(rows.size(), ps.size());
    for (std::size_t i = 1; i < rows.size(); ++i)
        EXPECT_LT(rows[i].std_dev, rows[i - 1].std_dev) << rows[i].p;
    EXPECT_LT(log_linear_slope(rows), 0.0);
    for (const auto& r : rows)
        EXPECT_NEAR(r.variance, r.std_dev * r.std_dev, 1e-15);
}

TEST(QuantizationVariance, RejectsBadInput) {
    EXPECT_THROW(quantization_variance(ModelParams{}, Band::lower, 3, {3}, 8), ParameterError);
    EXPECT_THROW(quantization_variance(ModelParams{}, Band::lower, 3, {1}, 1), ParameterError);
}

TEST(LogLinearSlope, RecoversAnExponential) {
    std::vector<VarianceRow> rows;
    for (int p = 1; p <= 5; ++p) {
        VarianceRow r;
        r.p = p;
        r.std_dev = 3.0 * std::exp(-0.7 * p);
        rows.push_back(r);
    }
    EXPECT_NEAR(log_linear_slope(rows), -0.7, 1e-12);
}

TEST(LongTimeDrift, SeriesEndsAtTheSingleValue) {
    auto p = ModelParams{};
    p.omega = 0.01;
    p = with_ratio(p, RationalRatio::irrational((1 + std::sqrt(5.0)) / 2));
    const auto s = long_time_drift_series(0.0, p, Band::lower, 5, 1024);
    ASSERT_EQ(s.size(), 5u);
    const auto one = long_time_average_drift(0.0, p, Band::lower, 5, 1024);
    EXPECT_NEAR(s.back().normalized, one.normalized, 1e-9);
    EXPECT_NEAR(one.normalized, one.dispersion_part + one.curvature_part, 1e-12);
}
