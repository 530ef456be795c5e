#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "tiltpump/model.hpp"

namespace tiltpump {

enum class Band { lower = -1, upper = +1 };

constexpr double sign_of(Band b) noexcept { return b == Band::lower ? -1.0 : 1.0; }
constexpr Band other(Band b) noexcept { return b == Band::lower ? Band::upper : Band::lower; }

/// Two-component amplitude over the (even, odd) sublattices.
using Spinor = Eigen::Vector2cd;

/// Phase convention for eigenspinors.
///
/// second_real: (h_x - i h_y) / (eps - h_z), 1) normalized, second component
///              real positive. Singular where eps = h_z.
/// first_real:  (1, (h_x + i h_y) / (eps + h_z)) normalized, first component
///              real positive. Singular where eps = -h_z.
/// automatic:   second_real unless |eps - h_z| <= seam_threshold.
enum class Gauge { automatic, second_real, first_real };

inline constexpr double default_gap_tol = 1e-9;
inline constexpr double gauge_seam_threshold = 1e-8;

struct BandEnergies {
    double lower = 0.0;
    double upper = 0.0;
};

struct BandPoint {
    double k = 0.0;
    double t = 0.0;
    BlochField field;
    BandEnergies energies;
    Spinor lower_spinor;
    Spinor upper_spinor;
    double lower_curvature = 0.0;
    double upper_curvature = 0.0;
};

/// F_n(k, t) sampled on the (k, t) torus, k in [-pi/2, pi/2), t in [0, T_m).
struct CurvatureGrid {
    int Nk = 0;
    int Nt = 0;
    Band band = Band::lower;
    std::vector<double> k_values;
    std::vector<double> t_values;
    std::vector<double> values; ///< row-major, values[ik * Nt + it]

    double at(int ik, int it) const { return values[static_cast<std::size_t>(ik) * Nt + it]; }
};

/// (eps_-, eps_+) = -/+ |h(k - omega_F t, phi(t))|. Throws DegeneracyError
/// when eps_+ < gap_tol.
BandEnergies band_energies(double k, double t, const ModelParams& params,
                           double gap_tol = default_gap_tol);

/// Normalized eigenspinor of h . sigma at (k, t).
Spinor eigenstate(double k, double t, const ModelParams& params, Band band,
                  Gauge gauge = Gauge::automatic, double gap_tol = default_gap_tol);

/// Eigenspinor of h . sigma for a given field; building block of eigenstate().
Spinor eigenstate_for_field(const BlochField& h, Band band, Gauge gauge = Gauge::automatic,
                            double gap_tol = default_gap_tol);

/// The gauge that Gauge::automatic resolves to at this field.
Gauge resolved_gauge(const BlochField& h, Band band);

/// Sublattice amplitudes of the lattice Bloch state psi_s = e^{+iks} u_s at
/// physical quasimomentum K and phase phi.
///
/// h . sigma generates states with real-space phase e^{-iks}; for the e^{+iks}
/// convention used when Fourier-analysing lattice wavefunctions the
/// eigenvector is the complex conjugate of eigenstate_for_field().
Spinor lattice_spinor(double K, double phi, const ModelParams& params, Band band,
                      double gap_tol = default_gap_tol);

/// Closed-form Berry curvature
///   F_+- = +-2 J delta0 omega Delta0 [1 - cos^2 phi cos^2 K] / |h|^3,
/// K = k - omega_F t. Units: sites per unit time.
double berry_curvature(double k, double t, const ModelParams& params, Band band,
                       double gap_tol = default_gap_tol);

/// d eps_n / dk (analytic).
double dispersion_slope(double k, double t, const ModelParams& params, Band band,
                        double gap_tol = default_gap_tol);

/// Anomalous-velocity-corrected group velocity: d eps_n / dk + F_n.
double group_velocity(double k, double t, const ModelParams& params, Band band,
                      double gap_tol = default_gap_tol);

BandPoint evaluate_band_point(double k, double t, const ModelParams& params,
                              double gap_tol = default_gap_tol);

/// Link-variable (plaquette phase) Chern number on the untilted (k, t) torus.
/// Throws ParameterError for Nk or Nt < 20 and DegeneracyError when the gap
/// closes on a grid point.
int chern_number_fhs(const ModelParams& params, Band band, int Nk, int Nt,
                     double gap_tol = default_gap_tol);

/// Real-valued plaquette sum / 2 pi before rounding; useful for diagnostics.
double chern_flux_fhs(const ModelParams& params, Band band, int Nk, int Nt,
                      double gap_tol = default_gap_tol);

CurvatureGrid curvature_grid(const ModelParams& params, Band band, int Nk, int Nt,
                             double gap_tol = default_gap_tol);

/// Reduced Chern number (1/d) int_0^{q T_m} F_n(k0, t) dt with
/// omega_F = ratio * omega. Composite Simpson with Nt_per_cycle points per
/// modulation period, refined by step halving until two successive estimates
/// agree to 1e-10.
double reduced_chern(double k0, const ModelParams& params, const RationalRatio& ratio,
                     Band band = Band::lower, int Nt_per_cycle = 2048);

} // namespace tiltpump
