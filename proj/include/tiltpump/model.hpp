#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tiltpump {

/// Thrown when model or run parameters violate their invariants.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when the two bands touch (or come closer than the gap tolerance).
class DegeneracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a time integration produces non-finite values.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tight-binding constants of the tilted, phase-modulated superlattice
///
///   H(t) = sum_j { [J + delta0 sin(pi j + phi(t))] a_j^dag a_{j+1} + h.c. }
///        + sum_j [Delta0 cos(pi j + phi(t)) + omega_F j] n_j,
///
/// with phi(t) = phi0 + omega t and hbar = 1. Sites are numbered from 0, so
/// site 0 is an "even" site and unit cell R holds sites 2R (even) and
/// 2R + 1 (odd).
struct ModelParams {
    double J = -1.0;
    double delta0 = 0.8;
    double Delta0 = 2.0;
    double omega = 0.03;
    double omega_F = 0.0;
    double phi0 = 0.0;
    int L_sites = 300;
    int d = 2;

    /// Throws ParameterError unless omega != 0, L_sites is even and >= 4,
    /// d == 2, every field is finite and the bands are gapped.
    void validate() const;

    double phase(double t) const noexcept { return phi0 + omega * t; }
    double modulation_period() const noexcept { return 2.0 * std::numbers::pi / omega; }
    /// pi / omega_F for a two-site cell; +inf without tilt.
    double bloch_period() const noexcept;
    int cells() const noexcept { return L_sites / d; }

    bool operator==(const ModelParams&) const = default;
};

/// omega_F / omega, either as a co-prime fraction p/q or as a plain real.
class RationalRatio {
public:
    RationalRatio() = default;

    /// Throws ParameterError unless q >= 1 and gcd(p, q) == 1.
    static RationalRatio rational(int p, int q);
    /// Irrational (or simply non-commensurate) ratio; no co-prime check.
    static RationalRatio irrational(double value);

    int p() const noexcept { return p_; }
    int q() const noexcept { return q_; }
    bool is_rational() const noexcept { return rational_; }
    double value() const noexcept;

    /// q * T_m for rational ratios. Throws ParameterError otherwise.
    double overall_period(double omega) const;

    bool operator==(const RationalRatio&) const = default;

private:
    int p_ = 0;
    int q_ = 1;
    bool rational_ = true;
    double value_ = 0.0;
};

/// Returns a copy of params with omega_F = ratio * omega.
ModelParams with_ratio(ModelParams params, const RationalRatio& ratio);

/// Real symmetric tridiagonal form of the open-chain Hamiltonian.
/// off_diagonal[j] couples sites j and j + 1.
struct TridiagonalHamiltonian {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;

    std::size_t size() const noexcept { return diagonal.size(); }
};

TridiagonalHamiltonian build_tridiagonal_hamiltonian(const ModelParams& params, double t);

/// Dense L_sites x L_sites Hermitian matrix with open boundaries.
Eigen::MatrixXcd build_real_space_hamiltonian(const ModelParams& params, double t);

/// Effective field (h_x, h_y, h_z) of H(k, t) = h . sigma in the sublattice
/// basis (even, odd).
struct BlochField {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const noexcept;
};

/// Field at reduced momentum K and modulation phase phi.
BlochField bloch_field_at(double K, double phi, const ModelParams& params) noexcept;

/// Tilted field: K = k - omega_F t, phi = phi(t).
BlochField bloch_field(double k, double t, const ModelParams& params) noexcept;

/// Same formula with omega_F = 0.
BlochField bloch_field_untilted(double k, double t, const ModelParams& params) noexcept;

/// Wraps k into the Brillouin zone [-pi/2, pi/2) of the two-site cell.
double wrap_to_zone(double k) noexcept;

} // namespace tiltpump
