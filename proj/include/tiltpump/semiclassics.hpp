#pragma once

#include <vector>

#include "tiltpump/band_geometry.hpp"
#include "tiltpump/model.hpp"

namespace tiltpump {

inline constexpr int default_points_per_cycle = 4096;

/// Displacement (in sites) of a Bloch state split into its two velocity terms.
struct DriftComponents {
    double dispersion = 0.0; ///< integral of d eps / dk
    double curvature = 0.0;  ///< integral of the Berry curvature
    double total() const noexcept { return dispersion + curvature; }
};

/// Displacement int_0^tau v_g(k0, t) dt of a Bloch state starting at k0.
/// Composite Simpson with points_per_cycle points per modulation period.
DriftComponents semiclassical_drift(double k0, const ModelParams& params, Band band, double tau,
                                    int points_per_cycle = default_points_per_cycle);

/// Cumulative displacement at each of the (non-decreasing, >= 0) times.
std::vector<DriftComponents> semiclassical_drift_series(
    double k0, const ModelParams& params, Band band, const std::vector<double>& times,
    int points_per_cycle = default_points_per_cycle);

struct DriftScan {
    std::vector<double> k0_values;
    std::vector<double> drifts;            ///< Delta X(tau) / d
    std::vector<double> dispersion_parts;  ///< dispersion contribution / d
    std::vector<double> curvature_parts;   ///< curvature contribution / d
    double tau = 0.0;
    ModelParams params;
    RationalRatio ratio;

    /// drifts / q: the displacement in units of q d.
    std::vector<double> drift_per_qd() const;
};

/// Drift over tau = q T_m at Nk0 uniform k0 in [-pi/2, pi/2).
/// omega_F is taken from the ratio.
DriftScan drift_k_scan(const ModelParams& params, Band band, const RationalRatio& ratio, int Nk0,
                       int points_per_cycle = default_points_per_cycle, int threads = 1);

struct VarianceRow {
    int p = 0;
    int q = 1;
    double mean = 0.0;           ///< mean over k0 of Delta X(q T_m) / (q d)
    double std_dev = 0.0;        ///< its standard deviation
    double variance = 0.0;
    double reduced_mean = 0.0;   ///< same statistics for C_red / q (curvature only)
    double reduced_std_dev = 0.0;
    double reduced_variance = 0.0;
};

/// k0-ensemble statistics of the quantized drift for omega_F / omega = p / q.
/// Throws ParameterError for non-co-prime pairs or Nk0 < 2.
std::vector<VarianceRow> quantization_variance(const ModelParams& params, Band band, int q,
                                               const std::vector<int>& p_list, int Nk0,
                                               int points_per_cycle = default_points_per_cycle,
                                               int threads = 1);

/// Slope of log(std) against p by least squares. Rows with std == 0 are skipped.
double log_linear_slope(const std::vector<VarianceRow>& rows, bool reduced = false);

struct LongTimeDrift {
    int cycles = 0;
    double normalized = 0.0;       ///< Delta X(N T_m) / (N d)
    double dispersion_part = 0.0;  ///< dispersion contribution / (N d)
    double curvature_part = 0.0;   ///< curvature contribution / (N d)
};

/// Delta X(N T_m) / (N d) with omega_F taken from params (any real ratio).
LongTimeDrift long_time_average_drift(double k0, const ModelParams& params, Band band,
                                      int N_cycles,
                                      int points_per_cycle = default_points_per_cycle);

/// The same quantity for N = 1 .. N_cycles in one pass.
std::vector<LongTimeDrift> long_time_drift_series(double k0, const ModelParams& params, Band band,
                                                  int N_cycles,
                                                  int points_per_cycle = default_points_per_cycle);

} // namespace tiltpump
