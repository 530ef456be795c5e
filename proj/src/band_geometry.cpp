#include "tiltpump/band_geometry.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "quadrature.hpp"

namespace tiltpump {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

// Orientation of the (k, t) torus for the plaquette sum. Chosen so that the
// plaquette flux equals (1/2pi) * integral of berry_curvature(), which makes
// the lower band of J < 0, delta0 Delta0 > 0 carry C = +1.
constexpr double kTorusOrientation = -1.0;

void require_gap(const BlochField& h, double gap_tol, double k, double t) {
    const double e = h.norm();
    if (!(e >= gap_tol)) {
        std::ostringstream os;
        os << "band gap closes (|h| = " << e << " < " << gap_tol << ") at k = " << k
           << ", t = " << t;
        throw DegeneracyError(os.str());
    }
}

// eps - h_z for eps = s |h|, evaluated without cancellation.
double seam_denominator(const BlochField& h, double s) {
    const double e = h.norm();
    const double perp2 = h.x * h.x + h.y * h.y;
    // s e - h_z = s (e - |h_z|) = s perp^2 / (e + |h_z|) when sign(h_z) = s
    if (s * h.z > 0.0)
        return s * perp2 / (e + std::abs(h.z));
    return s * e - h.z;
}

} // namespace

BandEnergies band_energies(double k, double t, const ModelParams& params, double gap_tol) {
    const auto h = bloch_field(k, t, params);
    require_gap(h, gap_tol, k, t);
    const double e = h.norm();
    return {-e, e};
}

Gauge resolved_gauge(const BlochField& h, Band band) {
    const double s = sign_of(band);
    return std::abs(seam_denominator(h, s)) > gauge_seam_threshold ? Gauge::second_real
                                                                   : Gauge::first_real;
}

Spinor eigenstate_for_field(const BlochField& h, Band band, Gauge gauge, double gap_tol) {
    require_gap(h, gap_tol, std::nan(""), std::nan(""));
    const double s = sign_of(band);
    if (gauge == Gauge::automatic)
        gauge = resolved_gauge(h, band);

    Spinor u;
    if (gauge == Gauge::second_real) {
        const double den = seam_denominator(h, s);
        u << cd(h.x, -h.y) / den, 1.0;
    } else {
        // eps + h_z, again without cancellation
        const double den = -seam_denominator(h, -s);
        u << 1.0, cd(h.x, h.y) / den;
    }
    return u / u.norm();
}

Spinor eigenstate(double k, double t, const ModelParams& params, Band band, Gauge gauge,
                  double gap_tol) {
    const auto h = bloch_field(k, t, params);
    require_gap(h, gap_tol, k, t);
    return eigenstate_for_field(h, band, gauge, gap_tol);
}

Spinor lattice_spinor(double K, double phi, const ModelParams& params, Band band,
                      double gap_tol) {
    return eigenstate_for_field(bloch_field_at(K, phi, params), band, Gauge::automatic, gap_tol)
        .conjugate();
}

double berry_curvature(double k, double t, const ModelParams& params, Band band,
                       double gap_tol) {
    const double K = k - params.omega_F * t;
    const double phi = params.phase(t);
    const auto h = bloch_field_at(K, phi, params);
    require_gap(h, gap_tol, k, t);
    const double e = h.norm();
    const double c = std::cos(phi) * std::cos(K);
    return sign_of(band) * 2.0 * params.J * params.delta0 * params.omega * params.Delta0 *
           (1.0 - c * c) / (e * e * e);
}

double dispersion_slope(double k, double t, const ModelParams& params, Band band,
                        double gap_tol) {
    const double K = k - params.omega_F * t;
    const double phi = params.phase(t);
    const auto h = bloch_field_at(K, phi, params);
    require_gap(h, gap_tol, k, t);
    const double dhx = -2.0 * params.J * std::sin(K);
    const double dhy = 2.0 * params.delta0 * std::sin(phi) * std::cos(K);
    return sign_of(band) * (h.x * dhx + h.y * dhy) / h.norm();
}

double group_velocity(double k, double t, const ModelParams& params, Band band,
                      double gap_tol) {
    return dispersion_slope(k, t, params, band, gap_tol) +
           berry_curvature(k, t, params, band, gap_tol);
}

BandPoint evaluate_band_point(double k, double t, const ModelParams& params, double gap_tol) {
    BandPoint p;
    p.k = k;
    p.t = t;
    p.field = bloch_field(k, t, params);
    require_gap(p.field, gap_tol, k, t);
    p.energies = {-p.field.norm(), p.field.norm()};
    p.lower_spinor = eigenstate_for_field(p.field, Band::lower, Gauge::automatic, gap_tol);
    p.upper_spinor = eigenstate_for_field(p.field, Band::upper, Gauge::automatic, gap_tol);
    p.lower_curvature = berry_curvature(k, t, params, Band::lower, gap_tol);
    p.upper_curvature = berry_curvature(k, t, params, Band::upper, gap_tol);
    return p;
}

double chern_flux_fhs(const ModelParams& params, Band band, int Nk, int Nt, double gap_tol) {
    if (Nk < 20 || Nt < 20)
        throw ParameterError("chern_number_fhs needs Nk, Nt >= 20");
    if (params.omega == 0.0)
        throw ParameterError("chern_number_fhs needs a nonzero modulation frequency");

    ModelParams flat = params;
    flat.omega_F = 0.0;
    const double dk = kPi / Nk;
    const double Tm = flat.modulation_period();
    const double dt = Tm / Nt;

    // States on the grid; column ik = Nk is the zone-boundary image
    // u(k + pi) = sigma_z u(k) of column 0.
    std::vector<Spinor> u(static_cast<std::size_t>(Nk + 1) * Nt);
    auto at = [&](int ik, int it) -> Spinor& {
        return u[static_cast<std::size_t>(ik) * Nt + it];
    };
    for (int ik = 0; ik < Nk; ++ik) {
        const double k = -kPi / 2 + dk * ik;
        for (int it = 0; it < Nt; ++it) {
            const double t = dt * it;
            const auto h = bloch_field_untilted(k, t, flat);
            require_gap(h, gap_tol, k, t);
            at(ik, it) = eigenstate_for_field(h, band, Gauge::automatic, gap_tol);
        }
    }
    for (int it = 0; it < Nt; ++it) {
        Spinor img = at(0, it);
        img(1) = -img(1);
        at(Nk, it) = img;
    }

    auto link = [](const Spinor& a, const Spinor& b) {
        const cd z = a.dot(b); // a^dag b
        return z / std::abs(z);
    };

    double flux = 0.0;
    for (int ik = 0; ik < Nk; ++ik) {
        for (int it = 0; it < Nt; ++it) {
            const int jt = (it + 1) % Nt;
            const cd u1 = link(at(ik, it), at(ik + 1, it));
            const cd u2 = link(at(ik + 1, it), at(ik + 1, jt));
            const cd u3 = link(at(ik, jt), at(ik + 1, jt));
            const cd u4 = link(at(ik, it), at(ik, jt));
            flux += std::arg(u1 * u2 * std::conj(u3) * std::conj(u4));
        }
    }
    return kTorusOrientation * flux / (2.0 * kPi);
}

int chern_number_fhs(const ModelParams& params, Band band, int Nk, int Nt, double gap_tol) {
    return static_cast<int>(std::lround(chern_flux_fhs(params, band, Nk, Nt, gap_tol)));
}

CurvatureGrid curvature_grid(const ModelParams& params, Band band, int Nk, int Nt,
                             double gap_tol) {
    if (Nk < 1 || Nt < 1)
        throw ParameterError("curvature grid needs Nk, Nt >= 1");
    ModelParams flat = params;
    flat.omega_F = 0.0;
    CurvatureGrid g;
    g.Nk = Nk;
    g.Nt = Nt;
    g.band = band;
    const double Tm = flat.modulation_period();
    for (int ik = 0; ik < Nk; ++ik)
        g.k_values.push_back(-kPi / 2 + kPi * ik / Nk);
    for (int it = 0; it < Nt; ++it)
        g.t_values.push_back(Tm * it / Nt);
    g.values.reserve(static_cast<std::size_t>(Nk) * Nt);
    for (double k : g.k_values)
        for (double t : g.t_values)
            g.values.push_back(berry_curvature(k, t, flat, band, gap_tol));
    return g;
}

double reduced_chern(double k0, const ModelParams& params, const RationalRatio& ratio, Band band,
                     int Nt_per_cycle) {
    if (!ratio.is_rational())
        throw ParameterError("reduced_chern needs a rational omega_F / omega");
    if (Nt_per_cycle < 2)
        throw ParameterError("Nt_per_cycle must be >= 2");
    const auto tilted = with_ratio(params, ratio);
    const double tau = ratio.overall_period(params.omega);
    auto f = [&](double t) { return berry_curvature(k0, t, tilted, band); };
    const auto r = detail::refined_simpson(f, 0.0, tau, static_cast<long>(ratio.q()) * Nt_per_cycle,
                                           1e-10);
    return r.value / params.d;
}

} // namespace tiltpump
