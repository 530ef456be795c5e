#include "tiltpump/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace tiltpump {

namespace {

using cd = std::complex<double>;

// y = (H - shift) / scale * x, tridiagonal.
void apply_scaled(const TridiagonalHamiltonian& H, double shift, double scale,
                  const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    const auto n = static_cast<Eigen::Index>(H.size());
    const double inv = 1.0 / scale;
    for (Eigen::Index i = 0; i < n; ++i) {
        cd v = (H.diagonal[i] - shift) * x[i];
        if (i > 0)
            v += H.off_diagonal[i - 1] * x[i - 1];
        if (i + 1 < n)
            v += H.off_diagonal[i] * x[i + 1];
        y[i] = v * inv;
    }
}

TridiagonalHamiltonian combine(const TridiagonalHamiltonian& a, double wa,
                               const TridiagonalHamiltonian& b, double wb) {
    TridiagonalHamiltonian c;
    c.diagonal.resize(a.diagonal.size());
    c.off_diagonal.resize(a.off_diagonal.size());
    for (std::size_t i = 0; i < a.diagonal.size(); ++i)
        c.diagonal[i] = wa * a.diagonal[i] + wb * b.diagonal[i];
    for (std::size_t i = 0; i < a.off_diagonal.size(); ++i)
        c.off_diagonal[i] = wa * a.off_diagonal[i] + wb * b.off_diagonal[i];
    return c;
}

} // namespace

void apply_tridiagonal_exponential(const TridiagonalHamiltonian& H, double tau,
                                   Eigen::VectorXcd& psi, double tol) {
    const std::size_t n = H.size();
    if (n == 0 || tau == 0.0)
        return;

    double lo = H.diagonal[0];
    double hi = H.diagonal[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0)
            r += std::abs(H.off_diagonal[i - 1]);
        if (i + 1 < n)
            r += std::abs(H.off_diagonal[i]);
        lo = std::min(lo, H.diagonal[i] - r);
        hi = std::max(hi, H.diagonal[i] + r);
    }
    const double shift = 0.5 * (hi + lo);
    const double scale = std::max(0.5 * (hi - lo), 1e-12);
    const double x = tau * scale;

    std::vector<double> coef;
    for (int k = 0;; ++k) {
        const double b = std::cyl_bessel_j(static_cast<double>(k), std::abs(x));
        coef.push_back(b);
        if (k > x && std::abs(b) < tol)
            break;
    }
    const double sgn = x < 0.0 ? -1.0 : 1.0;

    // exp(-i x s) = J_0(x) + 2 sum_k (-i)^k J_k(x) T_k(s)
    Eigen::VectorXcd t_prev = psi;
    Eigen::VectorXcd t_curr(psi.size());
    Eigen::VectorXcd t_next(psi.size());
    Eigen::VectorXcd acc = coef[0] * psi;
    apply_scaled(H, shift, scale, t_prev, t_curr);
    cd phase(0.0, -sgn);
    acc += 2.0 * coef[1] * phase * t_curr;
    for (std::size_t k = 2; k < coef.size(); ++k) {
        apply_scaled(H, shift, scale, t_curr, t_next);
        t_next = 2.0 * t_next - t_prev;
        phase *= cd(0.0, -sgn);
        acc += 2.0 * coef[k] * phase * t_next;
        std::swap(t_prev, t_curr);
        std::swap(t_curr, t_next);
    }
    psi = std::polar(1.0, -tau * shift) * acc;
}

void propagate_step(const ModelParams& params, double t, double dt, Stepper stepper,
                    Eigen::VectorXcd& psi) {
    switch (stepper) {
    case Stepper::frozen_start:
        apply_tridiagonal_exponential(build_tridiagonal_hamiltonian(params, t), dt, psi);
        return;
    case Stepper::midpoint:
        apply_tridiagonal_exponential(build_tridiagonal_hamiltonian(params, t + 0.5 * dt), dt, psi);
        return;
    case Stepper::magnus4: {
        const double r = std::sqrt(3.0) / 6.0;
        const double a1 = 0.25 + r;
        const double a2 = 0.25 - r;
        const auto h1 = build_tridiagonal_hamiltonian(params, t + (0.5 - r) * dt);
        const auto h2 = build_tridiagonal_hamiltonian(params, t + (0.5 + r) * dt);
        apply_tridiagonal_exponential(combine(h1, a1, h2, a2), dt, psi);
        apply_tridiagonal_exponential(combine(h1, a2, h2, a1), dt, psi);
        return;
    }
    }
}

} // namespace tiltpump
