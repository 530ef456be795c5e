#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tiltpump/band_geometry.hpp"
#include "tiltpump/model.hpp"
#include "tiltpump/propagator.hpp"

namespace tiltpump {

inline constexpr int edge_guard_sites = 5;
inline constexpr double edge_guard_threshold = 1e-6;

struct LatticeState {
    Eigen::VectorXcd amplitudes;
    double time = 0.0;

    double norm() const { return amplitudes.norm(); }
};

/// psi_j = N exp(-(j - j0)^2 / (4 sigma^2)) u_{band, j}(k0, 0) e^{i k0 j}.
/// Requires [j0 - 6 sigma, j0 + 6 sigma] to lie inside the chain.
LatticeState prepare_gaussian(const ModelParams& params, double sigma, double j0, double k0,
                              Band band = Band::lower);

/// Equal-weight superposition of the band's Bloch states on the L/2-point
/// momentum grid, phased to peak on the odd site 2R + 1 of cell R.
LatticeState prepare_wannier(const ModelParams& params, int R, Band band = Band::lower);

/// Quasimomenta k_m = -pi/2 + pi m / cells, m = 0 .. cells - 1.
std::vector<double> momentum_grid(int cells);

/// Sublattice amplitudes alpha_e(k_m), alpha_o(k_m) of a lattice state.
struct SublatticeAmplitudes {
    Eigen::VectorXcd even;
    Eigen::VectorXcd odd;
};

SublatticeAmplitudes sublattice_amplitudes(const Eigen::VectorXcd& psi);

/// |alpha_e(k_m)|^2 + |alpha_o(k_m)|^2 on the momentum grid.
std::vector<double> momentum_density(const LatticeState& state);

struct BandOccupation {
    double lower = 0.0;
    double upper = 0.0;
};

/// Weights of the state on the instantaneous lower and upper bands at time t.
BandOccupation band_occupations(const LatticeState& state, const ModelParams& params, double t);

double centroid(const Eigen::VectorXcd& psi);
double spatial_width(const Eigen::VectorXcd& psi);
/// Larger of the two densities summed over the outermost `sites` sites.
double edge_density(const Eigen::VectorXcd& psi, int sites = edge_guard_sites);

struct EvolveOptions {
    double t_end = 0.0;
    double dt = 0.0;            ///< 0 selects T_m / 2000 (rounded so t_end is hit exactly)
    int sample_every = 0;       ///< steps between samples; 0 selects 200 samples per T_m
    bool record_momentum = false;
    bool record_occupations = true;
    int snapshot_every = 0;     ///< samples between stored amplitude vectors; 0 disables
    Stepper stepper = Stepper::magnus4;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<double> widths;
    std::vector<double> norms;
    std::vector<BandOccupation> occupations;
    std::vector<double> momentum_values;
    std::vector<std::vector<double>> momentum_density;
    std::vector<double> snapshot_times;
    std::vector<Eigen::VectorXcd> snapshots;
    double dt = 0.0;
    long steps = 0;
    double max_edge_density = 0.0;
    bool edge_warning = false;
    LatticeState final_state;
};

/// Unitary evolution from state.time to state.time + t_end. Throws
/// NumericalError when the state becomes non-finite.
Trajectory evolve(const LatticeState& state, const ModelParams& params,
                  const EvolveOptions& options);

/// X(t) - X(0)
std::vector<double> displacement(const Trajectory& trajectory);
/// W(t) - W(0)
std::vector<double> width_change(const Trajectory& trajectory);

struct DtConvergence {
    double dt = 0.0;
    double displacement = 0.0;       ///< Delta X(t_end) with dt
    double halved_displacement = 0.0; ///< Delta X(t_end) with dt / 2
    double change = 0.0;
    bool converged = false;
};

/// Runs the evolution with dt and dt / 2 and compares the final displacement.
DtConvergence check_dt_convergence(const LatticeState& state, const ModelParams& params,
                                   EvolveOptions options, double tolerance = 1e-4);

} // namespace tiltpump
