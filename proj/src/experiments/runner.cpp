#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "experiments/output.hpp"
#include "tiltpump/experiments.hpp"
#include "tiltpump/lattice_dynamics.hpp"
#include "tiltpump/semiclassics.hpp"

namespace tiltpump {

namespace {

constexpr double kPi = std::numbers::pi;

struct Context {
    std::filesystem::path dir;
    int precision = 12;
    int threads = 1;
    std::vector<std::string>* diagnostics = nullptr;
};

class Recorder {
public:
    Recorder(Context& ctx, VariantResult& result) : ctx_(ctx), result_(result) {}

    detail::CsvWriter csv(const std::string& stem, std::vector<std::string> columns,
                          std::string description) {
        return detail::CsvWriter(ctx_.dir, result_.name + "_" + stem + ".csv", std::move(columns),
                                 std::move(description), ctx_.precision);
    }
    const std::string& add(detail::CsvWriter& w) {
        result_.files.push_back(w.finish());
        return result_.files.back().path;
    }
    void scalar(const std::string& key, double v, const std::string& source) {
        result_.scalars[key] = {v, source};
    }
    void flag(const std::string& key, bool v, const std::string& source) {
        result_.flags[key] = {v, source};
    }
    void note(const std::string& msg) { ctx_.diagnostics->push_back(result_.name + ": " + msg); }

private:
    Context& ctx_;
    VariantResult& result_;
};

void write_chern_file(Recorder& rec, const ModelParams& params, int Nk, int Nt) {
    auto w = rec.csv("chern", {"band", "chern_number", "plaquette_flux", "grid_k", "grid_t"},
                     "Link-variable Chern numbers of both bands");
    double lower_flux = 0.0;
    double upper_flux = 0.0;
    for (Band b : {Band::lower, Band::upper}) {
        const double flux = chern_flux_fhs(params, b, Nk, Nt);
        (b == Band::lower ? lower_flux : upper_flux) = flux;
        w.row({sign_of(b), std::round(flux), flux, double(Nk), double(Nt)});
    }
    const std::string src = rec.add(w);
    rec.scalar("chern_lower", std::round(lower_flux), src);
    rec.scalar("chern_upper", std::round(upper_flux), src);
    rec.scalar("plaquette_flux_lower", lower_flux, src);
    rec.scalar("plaquette_flux_upper", upper_flux, src);
}

void run_drift_scan(const ScenarioConfig& c, Context& ctx, Recorder& rec) {
    const auto scan =
        drift_k_scan(c.model, c.band, c.ratio, c.k_points, c.points_per_cycle, ctx.threads);
    const int chern = chern_number_fhs(c.model, c.band, 50, 50);
    const double q = c.ratio.q();

    auto w = rec.csv("drift", {"k0", "drift_per_qd", "dispersion_per_qd", "curvature_per_qd"},
                     "Bloch-state drift over q T_m per q d versus initial quasimomentum");
    const auto per_qd = scan.drift_per_qd();
    double lo = per_qd.front(), hi = per_qd.front(), sum = 0.0, dev = 0.0, disp = 0.0;
    for (std::size_t i = 0; i < per_qd.size(); ++i) {
        w.row({scan.k0_values[i], per_qd[i], scan.dispersion_parts[i] / q,
               scan.curvature_parts[i] / q});
        lo = std::min(lo, per_qd[i]);
        hi = std::max(hi, per_qd[i]);
        sum += per_qd[i];
        dev = std::max(dev, std::abs(per_qd[i] - chern));
        disp = std::max(disp, std::abs(scan.dispersion_parts[i] / q));
    }
    const double mean = sum / per_qd.size();
    double var = 0.0;
    for (double v : per_qd)
        var += (v - mean) * (v - mean);
    const std::string src = rec.add(w);
    rec.scalar("mean_drift_per_qd", mean, src);
    rec.scalar("std_drift_per_qd", std::sqrt(var / per_qd.size()), src);
    rec.scalar("spread_drift_per_qd", hi - lo, src);
    rec.scalar("max_deviation_from_chern", dev, src);
    rec.scalar("max_abs_dispersion_per_qd", disp, src);
    rec.scalar("tau", scan.tau, src);

    write_chern_file(rec, c.model, 50, 50);
}

void run_variance(const ScenarioConfig& c, Context& ctx, Recorder& rec) {
    const int q = c.ratio.q();
    const auto rows = quantization_variance(c.model, c.band, q, c.p_values, c.k_points,
                                            c.points_per_cycle, ctx.threads);
    auto w = rec.csv("variance",
                     {"p", "q", "mean", "std_dev", "variance", "reduced_mean", "reduced_std_dev",
                      "reduced_variance"},
                     "k0-ensemble statistics of drift per q d for omega_F / omega = p / q");
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        w.row({double(r.p), double(r.q), r.mean, r.std_dev, r.variance, r.reduced_mean,
               r.reduced_std_dev, r.reduced_variance});
        if (i > 0 && r.std_dev >= rows[i - 1].std_dev)
            decreasing = false;
    }
    const std::string src = rec.add(w);
    if (rows.size() >= 2) {
        rec.scalar("log_std_slope", log_linear_slope(rows, false), src);
        rec.scalar("log_reduced_std_slope", log_linear_slope(rows, true), src);
    }
    rec.scalar("first_std_dev", rows.front().std_dev, src);
    rec.scalar("last_std_dev", rows.back().std_dev, src);
    rec.flag("std_dev_decreasing", decreasing, src);
}

std::size_t nearest_sample(const std::vector<double>& times, double t) {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin())
        return 0;
    if (it == times.end())
        return times.size() - 1;
    const auto i = static_cast<std::size_t>(it - times.begin());
    return (t - times[i - 1] <= times[i] - t) ? i - 1 : i;
}

void run_quantum(const ScenarioConfig& c, Context& ctx, Recorder& rec) {
    (void)ctx;
    const ModelParams params = c.tilted_model();
    const double Tm = params.modulation_period();
    const bool wannier = c.kind == ScenarioKind::wannier_pump || c.packet == PacketKind::wannier;
    const LatticeState state = wannier ? prepare_wannier(params, c.wannier_cell, c.band)
                                       : prepare_gaussian(params, c.sigma, c.j0, c.k0, c.band);

    EvolveOptions o;
    o.t_end = c.cycles * Tm;
    o.dt = Tm / c.steps_per_cycle;
    o.sample_every = std::max(1, c.steps_per_cycle / c.samples_per_cycle);
    o.record_momentum = c.record_momentum;
    o.snapshot_every = c.snapshot_every;
    o.stepper = c.stepper;
    const Trajectory tr = evolve(state, params, o);

    std::vector<double> semiclassical;
    if (!wannier)
        for (const auto& d : semiclassical_drift_series(c.k0, params, c.band, tr.times,
                                                        c.points_per_cycle))
            semiclassical.push_back(d.total());

    const auto dX = displacement(tr);
    const auto dW = width_change(tr);
    std::vector<std::string> cols = {"t",        "t_over_Tm", "X",       "dX",     "W",
                                     "dW",       "norm",      "P_lower", "P_upper"};
    if (!wannier)
        cols.push_back("dX_semiclassical");
    auto w = rec.csv("trajectory", cols,
                     "Centroid, width, norm and band occupations of the evolving lattice state");
    double max_upper = 0.0, min_lower = 1.0, max_norm = 0.0, max_gap = 0.0, max_dw = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        std::vector<double> row = {tr.times[i], tr.times[i] / Tm, tr.positions[i], dX[i],
                                   tr.widths[i], dW[i], tr.norms[i], tr.occupations[i].lower,
                                   tr.occupations[i].upper};
        if (!wannier) {
            row.push_back(semiclassical[i]);
            max_gap = std::max(max_gap, std::abs(dX[i] - semiclassical[i]));
        }
        w.row(row);
        max_upper = std::max(max_upper, tr.occupations[i].upper);
        min_lower = std::min(min_lower, tr.occupations[i].lower);
        max_norm = std::max(max_norm, std::abs(tr.norms[i] - 1.0));
        max_dw = std::max(max_dw, std::abs(dW[i]));
    }
    const std::string traj = rec.add(w);
    const double d = params.d;
    rec.scalar("t_end", tr.times.back(), traj);
    rec.scalar("dX_final", dX.back(), traj);
    rec.scalar("dX_final_per_d", dX.back() / d, traj);
    rec.scalar("dW_final", dW.back(), traj);
    rec.scalar("max_abs_dW", max_dw, traj);
    rec.scalar("max_upper_occupation", max_upper, traj);
    rec.scalar("min_lower_occupation", min_lower, traj);
    rec.scalar("max_norm_drift", max_norm, traj);
    rec.scalar("max_edge_density", tr.max_edge_density, traj);
    rec.flag("edge_warning", tr.edge_warning, traj);
    if (!wannier)
        rec.scalar("max_semiclassical_gap", max_gap, traj);
    if (tr.edge_warning)
        rec.note("density reached the chain edges (max edge density " +
                 detail::format_number(tr.max_edge_density, 3) + ")");


    auto cyc = rec.csv("cycles", {"cycle", "t", "dX", "dX_per_d"},
                       "Displacement at whole modulation periods");
    double first_cycle = std::nan("");
    for (int n = 0; n <= static_cast<int>(std::floor(c.cycles + 1e-9)); ++n) {
        const auto i = nearest_sample(tr.times, n * Tm);
        cyc.row({double(n), tr.times[i], dX[i], dX[i] / d});
        if (n == 1)
            first_cycle = dX[i] / d;
    }
    const std::string cycles_file = rec.add(cyc);
    if (!std::isnan(first_cycle))
        rec.scalar("dX_first_cycle_per_d", first_cycle, cycles_file);

    if (c.record_momentum) {
        auto m = rec.csv("momentum", {"t", "k", "density"},
                         "Quasimomentum density |alpha_e|^2 + |alpha_o|^2 per sample");
        const double spacing = kPi / params.cells();
        double worst = 0.0;
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            const auto& rho = tr.momentum_density[i];
            for (std::size_t k = 0; k < rho.size(); ++k)
                m.row({tr.times[i], tr.momentum_values[k], rho[k]});
            if (!wannier) {
                const auto peak = static_cast<std::size_t>(
                    std::max_element(rho.begin(), rho.end()) - rho.begin());
                const double expected = wrap_to_zone(c.k0 - params.omega_F * tr.times[i]);
                double gap = std::fmod(std::abs(tr.momentum_values[peak] - expected), kPi);
                gap = std::min(gap, kPi - gap);
                worst = std::max(worst, gap / spacing);
            }
        }
        const std::string src = rec.add(m);
        if (!wannier)
            rec.scalar("max_peak_momentum_error_spacings", worst, src);
    }

    if (c.snapshot_every > 0) {
        auto s = rec.csv("snapshots", {"t", "j", "density"}, "Site densities at snapshot times");
        for (std::size_t i = 0; i < tr.snapshots.size(); ++i)
            for (Eigen::Index j = 0; j < tr.snapshots[i].size(); ++j)
                s.row({tr.snapshot_times[i], double(j), std::norm(tr.snapshots[i][j])});
        rec.add(s);
    }

    if (c.dt_check) {
        const auto check = check_dt_convergence(state, params, o);
        auto dc = rec.csv("dt_check", {"dt", "dX_final"}, "Final displacement at dt and dt / 2");
        dc.row({check.dt, check.displacement});
        dc.row({check.dt / 2.0, check.halved_displacement});
        const std::string src = rec.add(dc);
        rec.scalar("dt_halving_change", check.change, src);
        rec.flag("dt_converged", check.converged, src);
    }
}

void run_longtime(const ScenarioConfig& c, Context&, Recorder& rec) {
    const ModelParams params = c.tilted_model();
    const int N = static_cast<int>(c.cycles);
    const auto series = long_time_drift_series(c.k0, params, c.band, N, c.points_per_cycle);
    auto w = rec.csv("longtime", {"cycles", "t", "drift_per_Nd", "dispersion_per_Nd",
                                  "curvature_per_Nd"},
                     "Semiclassical Delta X(N T_m) / (N d) and its two velocity terms");
    const double Tm = params.modulation_period();
    for (const auto& s : series)
        w.row({double(s.cycles), s.cycles * Tm, s.normalized, s.dispersion_part,
               s.curvature_part});
    const std::string src = rec.add(w);
    rec.scalar("drift_per_Nd_final", series.back().normalized, src);
    rec.scalar("dispersion_per_Nd_final", series.back().dispersion_part, src);
    rec.scalar("curvature_per_Nd_final", series.back().curvature_part, src);
    rec.scalar("drift_per_Nd_first", series.front().normalized, src);
}

void run_continuum(const ScenarioConfig& c, Context&, Recorder& rec) {
    const ContinuumParams& p = c.continuum;
    const auto gs = continuum_ground_state(p);

    auto it = rec.csv("imaginary_time", {"stage", "dt", "steps", "energy", "relative_change_per_step"},
                      "Imaginary-time relaxation stages");
    for (std::size_t i = 0; i < gs.stages.size(); ++i) {
        const auto& s = gs.stages[i];
        it.row({double(i), s.dt, double(s.steps), s.energy, s.relative_change_per_step});
    }
    const std::string it_src = rec.add(it);
    rec.scalar("ground_state_energy", gs.energy, it_src);

    auto g = rec.csv("ground_state", {"x", "density"}, "Trap ground-state density");
    const auto x = continuum_grid(p);
    for (std::size_t i = 0; i < x.size(); ++i)
        g.row({x[i], std::norm(gs.state.psi[i])});
    const std::string g_src = rec.add(g);
    rec.scalar("initial_centroid", gs.centroid, g_src);
    rec.scalar("initial_width", gs.width, g_src);

    ContinuumEvolveOptions o;
    o.t_end = c.cycles * p.modulation_period();
    o.dt = c.continuum_dt;
    o.scheme = c.continuum_scheme;
    const auto tr = continuum_evolve(gs.state, p, o);

    auto w = rec.csv("continuum", {"t", "t_over_Tm", "X", "dX", "W", "norm"},
                     "Centroid and width (units of a) of the continuum packet");
    const double Tm = p.modulation_period();
    double max_norm = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        w.row({tr.times[i], tr.times[i] / Tm, tr.positions[i],
               tr.positions[i] - tr.positions.front(), tr.widths[i], tr.norms[i]});
        max_norm = std::max(max_norm, std::abs(tr.norms[i] - 1.0));
    }
    const std::string src = rec.add(w);
    const double dX = tr.positions.back() - tr.positions.front();
    rec.scalar("dX_final", dX, src);
    rec.scalar("dX_per_cycle_d", dX / (2.0 * c.cycles), src);
    rec.scalar("max_norm_drift", max_norm, src);
    rec.scalar("max_edge_density", tr.max_edge_density, src);
    rec.flag("edge_warning", tr.edge_warning, src);
    if (tr.edge_warning)
        rec.note("continuum density reached the outer 5% of the box");

    if (c.dt_check) {
        auto half = o;
        half.dt = tr.dt / 2.0;
        const auto fine = continuum_evolve(gs.state, p, half);
        const double dX_fine = fine.positions.back() - fine.positions.front();
        auto dc = rec.csv("dt_check", {"dt", "dX_final"}, "Final displacement at dt and dt / 2");
        dc.row({tr.dt, dX});
        dc.row({fine.dt, dX_fine});
        const std::string dsrc = rec.add(dc);
        rec.scalar("dt_halving_change", std::abs(dX - dX_fine), dsrc);
    }
}

void run_chern_map(const ScenarioConfig& c, Context&, Recorder& rec) {
    const ModelParams params = c.model;
    const auto lower = curvature_grid(params, Band::lower, c.grid_k, c.grid_t);
    const auto upper = curvature_grid(params, Band::upper, c.grid_k, c.grid_t);
    auto w = rec.csv("curvature", {"k", "t", "F_lower", "F_upper"},
                     "Berry curvature of both bands on the (k, t) torus");
    for (int ik = 0; ik < c.grid_k; ++ik)
        for (int jt = 0; jt < c.grid_t; ++jt)
            w.row({lower.k_values[ik], lower.t_values[jt], lower.at(ik, jt), upper.at(ik, jt)});
    rec.add(w);
    write_chern_file(rec, params, c.grid_k, c.grid_t);
}

void run_single(const ScenarioConfig& c, Context& ctx, Recorder& rec) {
    switch (c.kind) {
    case ScenarioKind::drift_scan:
        return run_drift_scan(c, ctx, rec);
    case ScenarioKind::variance_study:
        return run_variance(c, ctx, rec);
    case ScenarioKind::quantum_evolution:
    case ScenarioKind::wannier_pump:
        return run_quantum(c, ctx, rec);
    case ScenarioKind::irrational_longtime:
        return run_longtime(c, ctx, rec);
    case ScenarioKind::continuum_pump:
        return run_continuum(c, ctx, rec);
    case ScenarioKind::chern_map:
        return run_chern_map(c, ctx, rec);
    }
}

} // namespace

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("TILTPUMP_OUTPUT_ROOT"); env && *env)
        return env;
    return "runs";
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    validate_config(config);
    if (options.out_dir.empty())
        throw ConfigError("no output directory given");
    if (options.threads < 1)
        throw ConfigError("threads must be >= 1");

    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    result.config = config;
    result.directory = options.out_dir;
    std::filesystem::create_directories(options.out_dir);
    detail::write_text_file(options.out_dir / "config.toml", to_toml(config));

    Context ctx;
    ctx.dir = options.out_dir;
    ctx.precision = config.precision;
    ctx.threads = options.threads;
    ctx.diagnostics = &result.diagnostics;

    std::vector<Variant> variants = config.variants;
    if (variants.empty())
        variants.push_back({"base", {}});
    for (const auto& v : variants) {
        const ScenarioConfig resolved = resolve_variant(config, v);
        VariantResult vr;
        vr.name = v.name;
        Recorder rec(ctx, vr);
        try {
            run_single(resolved, ctx, rec);
        } catch (const std::exception& e) {
            throw std::runtime_error("scenario '" + config.name + "', variant '" + v.name +
                                     "': " + e.what());
        }
        result.variants.push_back(std::move(vr));
    }

    result.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.summary_path = options.out_dir / "summary.json";
    detail::write_summary(result.summary_path, result, options);
    return result;
}

} // namespace tiltpump
