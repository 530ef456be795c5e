#include "tiltpump/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "quadrature.hpp"
#include "tiltpump/parallel.hpp"

namespace tiltpump {

namespace {

constexpr double kPi = std::numbers::pi;

long intervals_for(double span, const ModelParams& params, int points_per_cycle) {
    if (points_per_cycle < 2)
        throw ParameterError("points_per_cycle must be >= 2");
    if (params.omega == 0.0)
        return points_per_cycle;
    const double cycles = span / params.modulation_period();
    long n = static_cast<long>(std::ceil(cycles * points_per_cycle - 1e-9));
    n = std::max<long>(n, 2);
    return n + (n % 2);
}

DriftComponents integrate(double k0, const ModelParams& params, Band band, double a, double b,
                          int points_per_cycle) {
    if (b <= a)
        return {};
    const long n = intervals_for(b - a, params, points_per_cycle);
    DriftComponents c;
    c.dispersion = detail::simpson(
        [&](double t) { return dispersion_slope(k0, t, params, band); }, a, b, n);
    c.curvature = detail::simpson(
        [&](double t) { return berry_curvature(k0, t, params, band); }, a, b, n);
    return c;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Moments moments(const std::vector<double>& v) {
    Moments m;
    if (v.empty())
        return m;
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double x : v)
        m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(v.size());
    return m;
}

} // namespace

DriftComponents semiclassical_drift(double k0, const ModelParams& params, Band band, double tau,
                                    int points_per_cycle) {
    if (tau < 0.0)
        throw ParameterError("tau must be >= 0");
    return integrate(k0, params, band, 0.0, tau, points_per_cycle);
}

std::vector<DriftComponents> semiclassical_drift_series(double k0, const ModelParams& params,
                                                        Band band, const std::vector<double>& times,
                                                        int points_per_cycle) {
    std::vector<DriftComponents> out;
    out.reserve(times.size());
    DriftComponents acc;
    double prev = 0.0;
    for (double t : times) {
        if (t < prev)
            throw ParameterError("drift series times must be non-decreasing and >= 0");
        const auto piece = integrate(k0, params, band, prev, t, points_per_cycle);
        acc.dispersion += piece.dispersion;
        acc.curvature += piece.curvature;
        out.push_back(acc);
        prev = t;
    }
    return out;
}

std::vector<double> DriftScan::drift_per_qd() const {
    std::vector<double> out(drifts.size());
    const double q = ratio.is_rational() ? ratio.q() : 1.0;
    for (std::size_t i = 0; i < drifts.size(); ++i)
        out[i] = drifts[i] / q;
    return out;
}

DriftScan drift_k_scan(const ModelParams& params, Band band, const RationalRatio& ratio, int Nk0,
                       int points_per_cycle, int threads) {
    if (Nk0 < 1)
        throw ParameterError("drift_k_scan needs Nk0 >= 1");
    DriftScan scan;
    scan.params = with_ratio(params, ratio);
    scan.ratio = ratio;
    scan.tau = ratio.overall_period(params.omega);
    scan.k0_values.resize(Nk0);
    scan.drifts.resize(Nk0);
    scan.dispersion_parts.resize(Nk0);
    scan.curvature_parts.resize(Nk0);
    for (int i = 0; i < Nk0; ++i)
        scan.k0_values[i] = -kPi / 2 + kPi * i / Nk0;

    const double d = params.d;
    parallel_for(static_cast<std::size_t>(Nk0), threads, [&](std::size_t i) {
        const auto c =
            semiclassical_drift(scan.k0_values[i], scan.params, band, scan.tau, points_per_cycle);
        scan.drifts[i] = c.total() / d;
        scan.dispersion_parts[i] = c.dispersion / d;
        scan.curvature_parts[i] = c.curvature / d;
    });
    return scan;
}

std::vector<VarianceRow> quantization_variance(const ModelParams& params, Band band, int q,
                                               const std::vector<int>& p_list, int Nk0,
                                               int points_per_cycle, int threads) {
    if (Nk0 < 2)
        throw ParameterError("quantization_variance needs Nk0 >= 2");
    std::vector<RationalRatio> ratios;
    for (int p : p_list)
        ratios.push_back(RationalRatio::rational(p, q)); // validates co-primality up front

    std::vector<VarianceRow> rows;
    for (const auto& ratio : ratios) {
        const auto scan = drift_k_scan(params, band, ratio, Nk0, points_per_cycle, threads);
        std::vector<double> total = scan.drift_per_qd();
        std::vector<double> reduced(scan.curvature_parts.size());
        for (std::size_t i = 0; i < reduced.size(); ++i)
            reduced[i] = scan.curvature_parts[i] / q;
        const auto mt = moments(total);
        const auto mr = moments(reduced);
        VarianceRow row;
        row.p = ratio.p();
        row.q = q;
        row.mean = mt.mean;
        row.variance = mt.variance;
        row.std_dev = std::sqrt(mt.variance);
        row.reduced_mean = mr.mean;
        row.reduced_variance = mr.variance;
        row.reduced_std_dev = std::sqrt(mr.variance);
        rows.push_back(row);
    }
    return rows;
}

double log_linear_slope(const std::vector<VarianceRow>& rows, bool reduced) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        const double s = reduced ? r.reduced_std_dev : r.std_dev;
        if (s > 0.0) {
            xs.push_back(r.p);
            ys.push_back(std::log(s));
        }
    }
    if (xs.size() < 2)
        throw ParameterError("need at least two rows with nonzero spread for a slope");
    const auto mx = moments(xs);
    const auto my = moments(ys);
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        sxy += (xs[i] - mx.mean) * (ys[i] - my.mean);
    return sxy / (mx.variance * static_cast<double>(xs.size()));
}

LongTimeDrift long_time_average_drift(double k0, const ModelParams& params, Band band,
                                      int N_cycles, int points_per_cycle) {
    if (N_cycles < 1)
        throw ParameterError("N_cycles must be >= 1");
    const double tau = N_cycles * params.modulation_period();
    const auto c = semiclassical_drift(k0, params, band, tau, points_per_cycle);
    const double norm = N_cycles * static_cast<double>(params.d);
    return {N_cycles, c.total() / norm, c.dispersion / norm, c.curvature / norm};
}

std::vector<LongTimeDrift> long_time_drift_series(double k0, const ModelParams& params, Band band,
                                                  int N_cycles, int points_per_cycle) {
    if (N_cycles < 1)
        throw ParameterError("N_cycles must be >= 1");
    std::vector<double> times(N_cycles);
    for (int n = 1; n <= N_cycles; ++n)
        times[n - 1] = n * params.modulation_period();
    const auto series = semiclassical_drift_series(k0, params, band, times, points_per_cycle);
    std::vector<LongTimeDrift> out;
    out.reserve(series.size());
    for (int n = 1; n <= N_cycles; ++n) {
        const auto& c = series[n - 1];
        const double norm = n * static_cast<double>(params.d);
        out.push_back({n, c.total() / norm, c.dispersion / norm, c.curvature / norm});
    }
    return out;
}

} // namespace tiltpump
