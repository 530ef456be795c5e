#include "tiltpump/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace tiltpump {

namespace {

constexpr double kPi = std::numbers::pi;

// cos(pi j + phi) and sin(pi j + phi) without evaluating pi j in floating point.
inline double alternating(int j) noexcept { return (j % 2 == 0) ? 1.0 : -1.0; }

} // namespace

void ModelParams::validate() const {
    for (double v : {J, delta0, Delta0, omega, omega_F, phi0}) {
        if (!std::isfinite(v))
            throw ParameterError("model parameters must be finite");
    }
    if (omega == 0.0)
        throw ParameterError("omega must be nonzero (modulation period 2*pi/omega)");
    if (d != 2)
        throw ParameterError("unit-cell size d must be 2, got " + std::to_string(d));
    if (L_sites < 4 || L_sites % 2 != 0)
        throw ParameterError("L_sites must be even and >= 4, got " + std::to_string(L_sites));
    // |h| vanishes somewhere on the (k, phi) torus as soon as one of these is zero.
    if (J == 0.0 || delta0 == 0.0 || Delta0 == 0.0)
        throw ParameterError("J, delta0 and Delta0 must all be nonzero to keep the bands gapped");
}

double ModelParams::bloch_period() const noexcept {
    if (omega_F == 0.0)
        return std::numeric_limits<double>::infinity();
    return kPi / std::abs(omega_F);
}

RationalRatio RationalRatio::rational(int p, int q) {
    if (q < 1)
        throw ParameterError("ratio denominator q must be >= 1");
    if (std::gcd(p, q) != 1)
        throw ParameterError("p = " + std::to_string(p) + " and q = " + std::to_string(q) +
                             " are not co-prime");
    RationalRatio r;
    r.p_ = p;
    r.q_ = q;
    r.rational_ = true;
    r.value_ = static_cast<double>(p) / static_cast<double>(q);
    return r;
}

RationalRatio RationalRatio::irrational(double value) {
    if (!std::isfinite(value))
        throw ParameterError("ratio must be finite");
    RationalRatio r;
    r.p_ = 0;
    r.q_ = 0;
    r.rational_ = false;
    r.value_ = value;
    return r;
}

double RationalRatio::value() const noexcept { return value_; }

double RationalRatio::overall_period(double omega) const {
    if (!rational_)
        throw ParameterError("overall period is undefined for an irrational ratio");
    return q_ * 2.0 * kPi / omega;
}

ModelParams with_ratio(ModelParams params, const RationalRatio& ratio) {
    params.omega_F = ratio.value() * params.omega;
    return params;
}

TridiagonalHamiltonian build_tridiagonal_hamiltonian(const ModelParams& params, double t) {
    params.validate();
    const int n = params.L_sites;
    const double phi = params.phase(t);
    const double c = std::cos(phi);
    const double s = std::sin(phi);

    TridiagonalHamiltonian h;
    h.diagonal.resize(n);
    h.off_diagonal.resize(n - 1);
    for (int j = 0; j < n; ++j) {
        const double sign = alternating(j);
        h.diagonal[j] = params.Delta0 * sign * c + params.omega_F * j;
        if (j + 1 < n)
            h.off_diagonal[j] = params.J + params.delta0 * sign * s;
    }
    return h;
}

Eigen::MatrixXcd build_real_space_hamiltonian(const ModelParams& params, double t) {
    const auto tri = build_tridiagonal_hamiltonian(params, t);
    const auto n = static_cast<Eigen::Index>(tri.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        m(j, j) = tri.diagonal[j];
        if (j + 1 < n) {
            m(j, j + 1) = tri.off_diagonal[j];
            m(j + 1, j) = std::conj(m(j, j + 1));
        }
    }
    return m;
}

double BlochField::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

BlochField bloch_field_at(double K, double phi, const ModelParams& params) noexcept {
    return {2.0 * params.J * std::cos(K),
            2.0 * params.delta0 * std::sin(phi) * std::sin(K),
            params.Delta0 * std::cos(phi)};
}

BlochField bloch_field(double k, double t, const ModelParams& params) noexcept {
    return bloch_field_at(k - params.omega_F * t, params.phase(t), params);
}

BlochField bloch_field_untilted(double k, double t, const ModelParams& params) noexcept {
    return bloch_field_at(k, params.phase(t), params);
}

double wrap_to_zone(double k) noexcept {
    double w = std::fmod(k + kPi / 2.0, kPi);
    if (w < 0.0)
        w += kPi;
    return w - kPi / 2.0;
}

} // namespace tiltpump
