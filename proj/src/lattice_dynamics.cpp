#include "tiltpump/lattice_dynamics.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "fft.hpp"

namespace tiltpump {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

void require_even_chain(const Eigen::VectorXcd& psi) {
    if (psi.size() < 2 || psi.size() % 2 != 0)
        throw ParameterError("lattice state needs an even number of sites");
}

struct Observables {
    double position = 0.0;
    double width = 0.0;
};

Observables observe(const Eigen::VectorXcd& psi) {
    double norm2 = 0.0;
    double first = 0.0;
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
        const double p = std::norm(psi[j]);
        norm2 += p;
        first += static_cast<double>(j) * p;
    }
    Observables o;
    o.position = first / norm2;
    double second = 0.0;
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
        const double dj = static_cast<double>(j) - o.position;
        second += dj * dj * std::norm(psi[j]);
    }
    o.width = std::sqrt(second / norm2);
    return o;
}

} // namespace

LatticeState prepare_gaussian(const ModelParams& params, double sigma, double j0, double k0,
                              Band band) {
    params.validate();
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw ParameterError("Gaussian width sigma must be positive");
    const double last = params.L_sites - 1;
    if (!(j0 - 6.0 * sigma >= 0.0 && j0 + 6.0 * sigma <= last)) {
        std::ostringstream os;
        os << "Gaussian centre j0 = " << j0 << " needs 6 sigma = " << 6.0 * sigma
           << " clearance inside sites [0, " << last << "]";
        throw ParameterError(os.str());
    }
    const Spinor u = lattice_spinor(k0, params.phase(0.0), params, band);
    LatticeState s;
    s.amplitudes.resize(params.L_sites);
    for (int j = 0; j < params.L_sites; ++j) {
        const double x = j - j0;
        s.amplitudes[j] = std::exp(-x * x / (4.0 * sigma * sigma)) * u(j % 2) *
                          std::polar(1.0, k0 * j);
    }
    s.amplitudes /= s.amplitudes.norm();
    return s;
}

LatticeState prepare_wannier(const ModelParams& params, int R, Band band) {
    params.validate();
    const int cells = params.cells();
    if (R < 0 || R >= cells) {
        std::ostringstream os;
        os << "Wannier cell R = " << R << " outside [0, " << cells - 1 << "]";
        throw ParameterError(os.str());
    }
    const auto ks = momentum_grid(cells);
    const double phi = params.phase(0.0);
    std::vector<Spinor> v;
    v.reserve(ks.size());
    for (double k : ks)
        v.push_back(lattice_spinor(k, phi, params, band));

    const double x = 2.0 * R + 1.0;
    LatticeState s;
    s.amplitudes = Eigen::VectorXcd::Zero(params.L_sites);
    for (int j = 0; j < params.L_sites; ++j) {
        cd acc = 0.0;
        for (std::size_t m = 0; m < ks.size(); ++m)
            acc += std::polar(1.0, ks[m] * (j - x)) * v[m](j % 2);
        s.amplitudes[j] = acc / static_cast<double>(cells);
    }
    s.amplitudes /= s.amplitudes.norm();
    return s;
}

std::vector<double> momentum_grid(int cells) {
    if (cells < 1)
        throw ParameterError("momentum grid needs at least one cell");
    std::vector<double> k(cells);
    for (int m = 0; m < cells; ++m)
        k[m] = -kPi / 2 + kPi * m / cells;
    return k;
}

SublatticeAmplitudes sublattice_amplitudes(const Eigen::VectorXcd& psi) {
    require_even_chain(psi);
    const auto cells = static_cast<std::size_t>(psi.size() / 2);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cells));
    const auto ks = momentum_grid(static_cast<int>(cells));

    detail::Fft1d fft(cells, FFTW_FORWARD);
    SublatticeAmplitudes a;
    a.even.resize(static_cast<Eigen::Index>(cells));
    a.odd.resize(static_cast<Eigen::Index>(cells));
    for (int b = 0; b < 2; ++b) {
        for (std::size_t n = 0; n < cells; ++n)
            fft[n] = (n % 2 == 0 ? 1.0 : -1.0) * psi[static_cast<Eigen::Index>(2 * n + b)];
        fft.execute();
        for (std::size_t m = 0; m < cells; ++m) {
            const cd v = fft[m] * scale;
            if (b == 0)
                a.even[m] = v;
            else
                a.odd[m] = v * std::polar(1.0, -ks[m]);
        }
    }
    return a;
}

namespace {

BandOccupation occupations_from(const SublatticeAmplitudes& a, const ModelParams& params,
                                double t) {
    const auto ks = momentum_grid(static_cast<int>(a.even.size()));
    const double phi = params.phase(t);
    BandOccupation occ;
    for (std::size_t m = 0; m < ks.size(); ++m) {
        Spinor alpha;
        alpha << a.even[m], a.odd[m];
        occ.lower += std::norm(lattice_spinor(ks[m], phi, params, Band::lower).dot(alpha));
        occ.upper += std::norm(lattice_spinor(ks[m], phi, params, Band::upper).dot(alpha));
    }
    return occ;
}

std::vector<double> density_from(const SublatticeAmplitudes& a) {
    std::vector<double> rho(static_cast<std::size_t>(a.even.size()));
    for (Eigen::Index m = 0; m < a.even.size(); ++m)
        rho[m] = std::norm(a.even[m]) + std::norm(a.odd[m]);
    return rho;
}

} // namespace

std::vector<double> momentum_density(const LatticeState& state) {
    return density_from(sublattice_amplitudes(state.amplitudes));
}

BandOccupation band_occupations(const LatticeState& state, const ModelParams& params, double t) {
    return occupations_from(sublattice_amplitudes(state.amplitudes), params, t);
}

double centroid(const Eigen::VectorXcd& psi) { return observe(psi).position; }

double spatial_width(const Eigen::VectorXcd& psi) { return observe(psi).width; }

double edge_density(const Eigen::VectorXcd& psi, int sites) {
    const auto n = psi.size();
    const auto m = std::min<Eigen::Index>(sites, n);
    double left = 0.0;
    double right = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        left += std::norm(psi[j]);
        right += std::norm(psi[n - 1 - j]);
    }
    return std::max(left, right);
}

Trajectory evolve(const LatticeState& state, const ModelParams& params,
                  const EvolveOptions& options) {
    params.validate();
    if (state.amplitudes.size() != params.L_sites)
        throw ParameterError("state size does not match L_sites");
    if (!(options.t_end >= 0.0) || !std::isfinite(options.t_end))
        throw ParameterError("t_end must be finite and >= 0");
    if (options.dt < 0.0 || options.sample_every < 0 || options.snapshot_every < 0)
        throw ParameterError("dt, sample_every and snapshot_every must be >= 0");

    const double Tm = params.modulation_period();
    const double dt0 = options.dt > 0.0 ? options.dt : Tm / 2000.0;
    const long steps =
        options.t_end > 0.0 ? std::max(1L, static_cast<long>(std::ceil(options.t_end / dt0 - 1e-9)))
                            : 0L;
    const double dt = steps > 0 ? options.t_end / static_cast<double>(steps) : dt0;
    const int every = options.sample_every > 0
                          ? options.sample_every
                          : std::max(1, static_cast<int>(std::lround(Tm / (200.0 * dt))));

    Trajectory tr;
    tr.dt = dt;
    tr.steps = steps;
    if (options.record_momentum)
        tr.momentum_values = momentum_grid(params.cells());

    Eigen::VectorXcd psi = state.amplitudes;
    const double t0 = state.time;
    long samples = 0;

    auto sample = [&](long step) {
        const double t = t0 + dt * static_cast<double>(step);
        const double norm = psi.norm();
        if (!std::isfinite(norm) || !psi.allFinite()) {
            std::ostringstream os;
            os << "lattice evolution produced non-finite amplitudes at t = " << t;
            throw NumericalError(os.str());
        }
        const auto obs = observe(psi);
        tr.times.push_back(t);
        tr.positions.push_back(obs.position);
        tr.widths.push_back(obs.width);
        tr.norms.push_back(norm);
        const double edge = edge_density(psi) / (norm * norm);
        tr.max_edge_density = std::max(tr.max_edge_density, edge);
        if (options.record_occupations || options.record_momentum) {
            const auto a = sublattice_amplitudes(psi);
            if (options.record_occupations)
                tr.occupations.push_back(occupations_from(a, params, t));
            if (options.record_momentum)
                tr.momentum_density.push_back(density_from(a));
        }
        if (options.snapshot_every > 0 && (samples % options.snapshot_every == 0 || step == steps)) {
            tr.snapshot_times.push_back(t);
            tr.snapshots.push_back(psi);
        }
        ++samples;
    };

    sample(0);
    for (long s = 1; s <= steps; ++s) {
        propagate_step(params, t0 + dt * static_cast<double>(s - 1), dt, options.stepper, psi);
        if (s % every == 0 || s == steps)
            sample(s);
    }

    tr.edge_warning = tr.max_edge_density >= edge_guard_threshold;
    tr.final_state.amplitudes = std::move(psi);
    tr.final_state.time = t0 + dt * static_cast<double>(steps);
    return tr;
}

std::vector<double> displacement(const Trajectory& trajectory) {
    if (trajectory.positions.empty())
        throw ParameterError("empty trajectory");
    std::vector<double> out;
    out.reserve(trajectory.positions.size());
    for (double x : trajectory.positions)
        out.push_back(x - trajectory.positions.front());
    return out;
}

std::vector<double> width_change(const Trajectory& trajectory) {
    if (trajectory.widths.empty())
        throw ParameterError("empty trajectory");
    std::vector<double> out;
    out.reserve(trajectory.widths.size());
    for (double w : trajectory.widths)
        out.push_back(w - trajectory.widths.front());
    return out;
}

DtConvergence check_dt_convergence(const LatticeState& state, const ModelParams& params,
                                   EvolveOptions options, double tolerance) {
    options.record_momentum = false;
    options.record_occupations = false;
    options.snapshot_every = 0;
    options.sample_every = std::numeric_limits<int>::max();
    const auto coarse = evolve(state, params, options);
    options.dt = coarse.dt / 2.0;
    const auto fine = evolve(state, params, options);

    DtConvergence c;
    c.dt = coarse.dt;
    c.displacement = coarse.positions.back() - coarse.positions.front();
    c.halved_displacement = fine.positions.back() - fine.positions.front();
    c.change = std::abs(c.displacement - c.halved_displacement);
    c.converged = c.change < tolerance;
    return c;
}

} // namespace tiltpump
