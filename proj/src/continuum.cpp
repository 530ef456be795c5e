#include "tiltpump/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "tiltpump/model.hpp"

namespace tiltpump {

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Kinetic energy k^2 / pi^2 on the FFT frequency grid.
std::vector<double> kinetic_spectrum(const ContinuumParams& p) {
    const int n = p.points();
    const double dk = 2.0 * kPi / p.box_length();
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) {
        const double k = dk * (i < n / 2 ? i : i - n);
        t[i] = k * k / (kPi * kPi);
    }
    return t;
}

// Time-independent part of the real-time potential: short lattice plus tilt.
std::vector<double> static_potential(const ContinuumParams& p, const std::vector<double>& x) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        v[i] = -0.5 * p.Vs * std::cos(2.0 * kPi * x[i]) + p.force() * x[i];
    return v;
}

std::vector<double> trap_potential(const ContinuumParams& p, const std::vector<double>& x) {
    std::vector<double> v(x.size());
    const double theta = p.phi0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - p.trap_x0;
        v[i] = -0.5 * p.Vs * std::cos(2.0 * kPi * x[i]) - 0.5 * p.Vl * std::cos(kPi * x[i] - theta) +
               0.5 * p.trap_gamma * dx * dx;
    }
    return v;
}

double weight_sum(const std::vector<cd>& psi, double dx) {
    double s = 0.0;
    for (const auto& z : psi)
        s += std::norm(z);
    return s * dx;
}

void normalize(std::vector<cd>& psi, double dx) {
    const double inv = 1.0 / std::sqrt(weight_sum(psi, dx));
    for (auto& z : psi)
        z *= inv;
}

// Applies a diagonal multiplier in momentum space: psi <- IFFT(m * FFT(psi)) / N.
class SpectralOperator {
public:
    explicit SpectralOperator(std::size_t n)
        : forward_(n, FFTW_FORWARD), backward_(n, FFTW_BACKWARD) {}

    template <class Multiplier>
    void apply(std::vector<cd>& psi, const Multiplier& m) {
        const std::size_t n = psi.size();
        std::copy(psi.begin(), psi.end(), forward_.data());
        forward_.execute();
        for (std::size_t i = 0; i < n; ++i)
            backward_[i] = forward_[i] * m[i];
        backward_.execute();
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            psi[i] = backward_[i] * inv;
    }

private:
    detail::Fft1d forward_;
    detail::Fft1d backward_;
};

double energy_of(const std::vector<cd>& psi, const std::vector<double>& kinetic,
                 const std::vector<double>& potential, double dx, SpectralOperator& op) {
    std::vector<cd> tpsi = psi;
    op.apply(tpsi, kinetic);
    double e = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        e += (std::conj(psi[i]) * tpsi[i]).real() + potential[i] * std::norm(psi[i]);
    return e * dx / weight_sum(psi, dx);
}

struct Moments {
    double mean = 0.0;
    double width = 0.0;
};

Moments moments(const std::vector<cd>& psi, const std::vector<double>& x) {
    double w = 0.0;
    double m1 = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        w += p;
        m1 += p * x[i];
    }
    Moments m;
    m.mean = m1 / w;
    double m2 = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double d = x[i] - m.mean;
        m2 += d * d * std::norm(psi[i]);
    }
    m.width = std::sqrt(m2 / w);
    return m;
}

double edge_weight(const std::vector<cd>& psi, double dx) {
    const std::size_t n = psi.size();
    const auto m = static_cast<std::size_t>(std::ceil(continuum_edge_fraction * n));
    double left = 0.0;
    double right = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        left += std::norm(psi[i]);
        right += std::norm(psi[n - 1 - i]);
    }
    return std::max(left, right) * dx;
}

} // namespace

void ContinuumParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(Vs > 0.0) || !(Vl > 0.0) || !finite(Vs) || !finite(Vl))
        throw ParameterError("continuum lattice depths Vs and Vl must be positive");
    if (omega == 0.0 || !finite(omega))
        throw ParameterError("continuum modulation frequency must be finite and nonzero");
    if (!finite(F_over_homega) || !finite(phi0) || !finite(trap_x0))
        throw ParameterError("continuum parameters must be finite");
    if (!(trap_gamma >= 0.0) || !finite(trap_gamma))
        throw ParameterError("trap strength gamma must be >= 0");
    if (box_cells < 1 || points_per_cell < 1 || !power_of_two(points())) {
        std::ostringstream os;
        os << "continuum grid of " << box_cells << " x " << points_per_cell
           << " points is not a power of two";
        throw ParameterError(os.str());
    }
}

std::vector<double> continuum_grid(const ContinuumParams& params) {
    std::vector<double> x(params.points());
    const double dx = params.dx();
    for (int i = 0; i < params.points(); ++i)
        x[i] = params.x_min() + dx * i;
    return x;
}

double continuum_norm(const ContinuumState& state, const ContinuumParams& params) {
    return std::sqrt(weight_sum(state.psi, params.dx()));
}

double continuum_centroid(const ContinuumState& state, const ContinuumParams& params) {
    return moments(state.psi, continuum_grid(params)).mean;
}

double continuum_width(const ContinuumState& state, const ContinuumParams& params) {
    return moments(state.psi, continuum_grid(params)).width;
}

double continuum_trap_energy(const ContinuumState& state, const ContinuumParams& params) {
    params.validate();
    const auto x = continuum_grid(params);
    SpectralOperator op(x.size());
    return energy_of(state.psi, kinetic_spectrum(params), trap_potential(params, x), params.dx(),
                     op);
}

GroundStateResult continuum_ground_state(const ContinuumParams& params,
                                         const GroundStateOptions& options) {
    params.validate();
    if (!(params.trap_gamma > 0.0))
        throw ParameterError("ground-state preparation needs a trap (gamma > 0)");
    if (options.dt_schedule.empty() || options.block < 1 || options.max_steps_per_stage < 1)
        throw ParameterError("invalid imaginary-time schedule");

    const auto x = continuum_grid(params);
    const double dx = params.dx();
    const std::size_t n = x.size();
    const auto kinetic = kinetic_spectrum(params);
    const auto potential = trap_potential(params, x);
    SpectralOperator op(n);

    std::vector<cd> psi(n);
    const double s0 = 10.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - params.trap_x0;
        psi[i] = std::exp(-d * d / (4.0 * s0 * s0));
    }
    normalize(psi, dx);

    GroundStateResult result;
    for (double dtau : options.dt_schedule) {
        if (!(dtau > 0.0))
            throw ParameterError("imaginary-time steps must be positive");
        std::vector<double> half(n);
        std::vector<double> kin(n);
        for (std::size_t i = 0; i < n; ++i) {
            half[i] = std::exp(-0.5 * dtau * potential[i]);
            kin[i] = std::exp(-dtau * kinetic[i]);
        }

        ImaginaryTimeStage stage;
        stage.dt = dtau;
        double e_prev = energy_of(psi, kinetic, potential, dx, op);
        bool done = false;
        while (!done) {
            if (stage.steps >= options.max_steps_per_stage) {
                std::ostringstream os;
                os << "imaginary-time stage dt = " << dtau << " did not converge in "
                   << stage.steps << " steps (E = " << e_prev
                   << ", relative change per step = " << stage.relative_change_per_step << ")";
                throw ConvergenceError(os.str());
            }
            for (int b = 0; b < options.block; ++b) {
                for (std::size_t i = 0; i < n; ++i)
                    psi[i] *= half[i];
                op.apply(psi, kin);
                for (std::size_t i = 0; i < n; ++i)
                    psi[i] *= half[i];
                normalize(psi, dx);
            }
            stage.steps += options.block;
            const double e = energy_of(psi, kinetic, potential, dx, op);
            if (!std::isfinite(e))
                throw NumericalError("imaginary-time relaxation produced a non-finite energy");
            stage.relative_change_per_step =
                std::abs(e - e_prev) / (std::abs(e) * static_cast<double>(options.block));
            done = stage.relative_change_per_step < options.tolerance;
            e_prev = e;
        }
        stage.energy = e_prev;
        result.stages.push_back(stage);
    }

    result.state.psi = std::move(psi);
    result.state.time = 0.0;
    result.energy = result.stages.back().energy;
    const auto m = moments(result.state.psi, x);
    result.centroid = m.mean;
    result.width = m.width;
    return result;
}

ContinuumTrajectory continuum_evolve(const ContinuumState& state, const ContinuumParams& params,
                                     const ContinuumEvolveOptions& options) {
    params.validate();
    if (state.psi.size() != static_cast<std::size_t>(params.points()))
        throw ParameterError("continuum state size does not match the grid");
    if (!(options.t_end >= 0.0) || !std::isfinite(options.t_end))
        throw ParameterError("t_end must be finite and >= 0");
    if (!(options.dt > 0.0) || options.sample_every < 0)
        throw ParameterError("dt must be positive and sample_every >= 0");

    const auto x = continuum_grid(params);
    const double dx = params.dx();
    const std::size_t n = x.size();
    const long steps =
        options.t_end > 0.0
            ? std::max(1L, static_cast<long>(std::ceil(options.t_end / options.dt - 1e-9)))
            : 0L;
    const double dt = steps > 0 ? options.t_end / static_cast<double>(steps) : options.dt;
    const int every =
        options.sample_every > 0
            ? options.sample_every
            : std::max(1, static_cast<int>(std::lround(params.modulation_period() / (200.0 * dt))));

    // Substep fractions of dt: one Strang step, or the triple jump.
    std::vector<double> fractions{1.0};
    if (options.scheme == SplitScheme::fourth_order) {
        const double c = std::cbrt(2.0);
        const double w1 = 1.0 / (2.0 - c);
        fractions = {w1, 1.0 - 2.0 * w1, w1};
    }
    const auto kinetic = kinetic_spectrum(params);
    std::vector<std::vector<cd>> kin(2, std::vector<cd>(n));
    for (std::size_t j = 0; j < std::min<std::size_t>(2, fractions.size()); ++j)
        for (std::size_t i = 0; i < n; ++i)
            kin[j][i] = std::polar(1.0, -fractions[j] * dt * kinetic[i]);
    const auto v0 = static_potential(params, x);
    std::vector<double> cx(n);
    std::vector<double> sx(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = std::cos(kPi * x[i]);
        sx[i] = std::sin(kPi * x[i]);
    }
    SpectralOperator op(n);

    // psi <- exp(-i tau V(t)) psi
    auto potential_phase = [&](std::vector<cd>& psi, double t, double tau) {
        const double theta = params.omega * t + params.phi0;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = v0[i] - 0.5 * params.Vl * (cx[i] * c + sx[i] * s);
            psi[i] *= std::polar(1.0, -tau * v);
        }
    };

    ContinuumTrajectory tr;
    tr.dt = dt;
    tr.steps = steps;
    std::vector<cd> psi = state.psi;
    const double t0 = state.time;

    auto sample = [&](long step) {
        const double t = t0 + dt * static_cast<double>(step);
        const double w = weight_sum(psi, dx);
        if (!std::isfinite(w)) {
            std::ostringstream os;
            os << "continuum evolution produced non-finite amplitudes at t = " << t;
            throw NumericalError(os.str());
        }
        const auto m = moments(psi, x);
        tr.times.push_back(t);
        tr.positions.push_back(m.mean);
        tr.widths.push_back(m.width);
        tr.norms.push_back(std::sqrt(w));
        tr.max_edge_density = std::max(tr.max_edge_density, edge_weight(psi, dx) / w);
    };

    // Half-step potential phases that meet at the same time are merged; the
    // outstanding one is flushed before each sample.
    sample(0);
    double pending = 0.0;
    for (long s = 1; s <= steps; ++s) {
        double t = t0 + dt * static_cast<double>(s - 1);
        for (std::size_t j = 0; j < fractions.size(); ++j) {
            const double tau = fractions[j] * dt;
            potential_phase(psi, t, pending + 0.5 * tau);
            op.apply(psi, kin[j == 1 ? 1 : 0]);
            t += tau;
            pending = 0.5 * tau;
        }
        if (s % every == 0 || s == steps) {
            potential_phase(psi, t, pending);
            pending = 0.0;
            sample(s);
        }
    }
    tr.edge_warning = tr.max_edge_density >= continuum_edge_threshold;
    tr.final_state.psi = std::move(psi);
    tr.final_state.time = t0 + dt * static_cast<double>(steps);
    return tr;
}

} // namespace tiltpump
