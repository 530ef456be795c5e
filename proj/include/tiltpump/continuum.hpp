#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace tiltpump {

/// Thrown when imaginary-time relaxation exhausts its step budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimensionless continuum superlattice with energies in recoil units E_r,
/// lengths in short-lattice spacings a and time in hbar / E_r:
///
///   H = -(1/pi^2) d^2/dx^2 - (Vs/2) cos(2 pi x) - (Vl/2) cos(pi x - omega t - phi0) + F x,
///
/// F = F_over_homega * omega. The preparation trap (gamma/2)(x - x0)^2
/// replaces the tilt while relaxing to the ground state.
struct ContinuumParams {
    double Vs = 2.0;
    double Vl = 1.0;
    double omega = 0.002;
    double F_over_homega = 10.0 / 3.0;
    double phi0 = std::numbers::pi / 2;
    int box_cells = 256;        ///< long-lattice periods (2a each) in the box
    int points_per_cell = 32;   ///< grid points per long-lattice period
    double trap_gamma = 1e-5;
    double trap_x0 = 112.0;

    /// Throws ParameterError on non-positive depths, omega == 0, or a grid
    /// size that is not a power of two.
    void validate() const;

    int points() const noexcept { return box_cells * points_per_cell; }
    double box_length() const noexcept { return 2.0 * box_cells; }
    double dx() const noexcept { return box_length() / points(); }
    /// Grid origin; the box is centred on trap_x0.
    double x_min() const noexcept { return trap_x0 - 0.5 * box_length(); }
    double force() const noexcept { return F_over_homega * omega; }
    double modulation_period() const noexcept { return 2.0 * std::numbers::pi / omega; }

    bool operator==(const ContinuumParams&) const = default;
};

struct ContinuumState {
    std::vector<std::complex<double>> psi; ///< normalized so that sum |psi|^2 dx = 1
    double time = 0.0;
};

struct ImaginaryTimeStage {
    double dt = 0.0;
    long steps = 0;
    double energy = 0.0;
    double relative_change_per_step = 0.0;
};

struct GroundStateOptions {
    std::vector<double> dt_schedule{0.1, 0.01, 0.001};
    int block = 100;                   ///< steps between energy evaluations
    double tolerance = 1e-12;          ///< relative energy change per step
    long max_steps_per_stage = 2000000;
};

struct GroundStateResult {
    ContinuumState state;
    double energy = 0.0;
    double centroid = 0.0;
    double width = 0.0;
    std::vector<ImaginaryTimeStage> stages;
};

/// Imaginary-time split-step relaxation in the trap with the tilt off.
/// Throws ConvergenceError when a stage exceeds its step budget.
GroundStateResult continuum_ground_state(const ContinuumParams& params,
                                         const GroundStateOptions& options = {});

/// strang:       V(t+dt)/2, T, V(t)/2; second order.
/// fourth_order: triple-jump composition of three Strang steps.
enum class SplitScheme { strang, fourth_order };

struct ContinuumEvolveOptions {
    double t_end = 0.0;
    double dt = 0.05;
    SplitScheme scheme = SplitScheme::fourth_order;
    int sample_every = 0; ///< 0 selects about 200 samples per modulation period
};

struct ContinuumTrajectory {
    std::vector<double> times;
    std::vector<double> positions; ///< centroid in units of a
    std::vector<double> widths;
    std::vector<double> norms;
    double dt = 0.0;
    long steps = 0;
    double max_edge_density = 0.0; ///< probability in the outer 5% of the box
    bool edge_warning = false;
    ContinuumState final_state;
};

inline constexpr double continuum_edge_fraction = 0.05;
inline constexpr double continuum_edge_threshold = 1e-8;

/// Real-time split-step evolution with the tilt on and the trap off.
/// Throws NumericalError on non-finite amplitudes.
ContinuumTrajectory continuum_evolve(const ContinuumState& state, const ContinuumParams& params,
                                     const ContinuumEvolveOptions& options);

/// Grid coordinates x_i = x_min + i dx.
std::vector<double> continuum_grid(const ContinuumParams& params);
double continuum_norm(const ContinuumState& state, const ContinuumParams& params);
double continuum_centroid(const ContinuumState& state, const ContinuumParams& params);
double continuum_width(const ContinuumState& state, const ContinuumParams& params);
/// <psi| T + V |psi> with the trap on and the tilt off at t = state.time.
double continuum_trap_energy(const ContinuumState& state, const ContinuumParams& params);

} // namespace tiltpump
