#pragma once

/// Experiment driver: builds the mesh and initial data, steps with a fixed
/// dt, records snapshots and per-step entropy budgets, and writes the CSV,
/// config-echo and gnuplot outputs. Output is byte-stable for a given config.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ecfv/entropy_diagnostics.hpp"
#include "ecfv/errors.hpp"
#include "ecfv/euler.hpp"
#include "ecfv/fluxes.hpp"
#include "ecfv/mesh.hpp"
#include "ecfv/time_integrators.hpp"

namespace ecfv {

/// 17 significant digits; round-trips every double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct InitialCondition {
    enum class Kind { receding, riemann };
    Kind kind = Kind::receding;
    RecedingIC receding{};
    PrimitiveState left{1.0, 0.0, 1.0};
    PrimitiveState right{0.125, 0.0, 0.1};

    std::string describe() const {
        if (kind == Kind::receding) {
            return "receding:" + format_double(receding.rho0) + "," + format_double(receding.p0) + "," +
                   format_double(receding.u0);
        }
        return "riemann:" + format_double(left.rho) + "," + format_double(left.u) + "," + format_double(left.p) + ";" +
               format_double(right.rho) + "," + format_double(right.u) + "," + format_double(right.p);
    }
};

struct RunConfig {
    Mesh1D mesh{};
    InitialCondition ic{};
    double gamma = 1.4;
    BoundaryKind bc = BoundaryKind::transmissive;

    FluxKind flux = FluxKind::ec_roe;
    std::size_t tadmor_order = kDefaultTadmorOrder;
    EcFluxKind es_base = EcFluxKind::roe;
    DissipationSpec dissipation{};
    bool roe_entropy_fix = false;

    TimeScheme time = TimeScheme::fe;
    NewtonConfig newton{};
    std::size_t quad_order = 16;  ///< intermediate state (ec-quadrature) and diagnostics

    double dt = 1e-3;
    double t_final = 0.18;
    std::vector<double> snapshot_times{};  ///< empty means {t_final}
    std::string output_dir = "out";
    bool diagnostics = true;

    NumericalFlux numerical_flux() const {
        NumericalFlux f;
        f.gas = GasModel(gamma);
        f.kind = flux;
        f.tadmor_order = tadmor_order;
        f.es_base = es_base;
        f.dissipation = dissipation;
        f.roe.entropy_fix = roe_entropy_fix;
        return f;
    }

    std::vector<double> resolved_snapshot_times() const {
        return snapshot_times.empty() ? std::vector<double>{t_final} : snapshot_times;
    }
};

inline std::string_view to_string(EcFluxKind k) {
    switch (k) {
        case EcFluxKind::roe: return "ec-roe";
        case EcFluxKind::chandrashekhar: return "ec-chandrashekhar";
        case EcFluxKind::kep_pu: return "ec-kep";
        case EcFluxKind::tadmor: return "ec-tadmor";
    }
    return "?";
}

inline std::string_view to_string(DissipationKind k) {
    switch (k) {
        case DissipationKind::none: return "none";
        case DissipationKind::scaled_identity: return "identity";
        case DissipationKind::scaled_temporal_jacobian: return "jacobian";
    }
    return "?";
}

/// Number of fixed steps to reach t_final (t_final within 1e-9 dt of a multiple counts as exact).
inline std::size_t step_count(double dt, double t_final) {
    const double ratio = t_final / dt;
    const double nearest = std::round(ratio);
    return static_cast<std::size_t>(std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio) ? nearest
                                                                                               : std::ceil(ratio));
}

inline void validate(const RunConfig& c) {
    build_mesh(c.mesh.x_min, c.mesh.x_max, c.mesh.n_cells);
    GasModel{c.gamma};
    validate(c.newton);
    if (!(c.dt > 0) || !std::isfinite(c.dt)) throw UsageError("dt must be positive");
    if (!(c.t_final >= c.dt * (1.0 - 1e-12))) throw UsageError("tfinal must be >= dt");
    for (double t : c.snapshot_times) {
        if (!(t >= 0 && t <= c.t_final * (1.0 + 1e-12))) throw UsageError("snapshot times must lie in [0, tfinal]");
    }
    if (c.quad_order < 2) throw UsageError("quad-order must be >= 2");
    if (c.tadmor_order < 1) throw UsageError("Tadmor flux quadrature order must be >= 1");
    if (!(c.dissipation.coefficient >= 0)) throw UsageError("es-coeff must be non-negative");
    if (c.ic.kind == InitialCondition::Kind::receding) {
        validate(c.ic.receding);
        if (c.mesh.n_cells % 2 != 0) throw UsageError("receding runs need an even number of cells");
    }
}

/// Serialized so the file can be fed back through --config. List-valued
/// entries are quoted so the config reader keeps them as one string.
inline std::string config_echo(const RunConfig& c) {
    std::ostringstream os;
    auto kv = [&](const char* k, const std::string& v) { os << k << '=' << v << '\n'; };
    kv("cells", std::to_string(c.mesh.n_cells));
    kv("xmin", format_double(c.mesh.x_min));
    kv("xmax", format_double(c.mesh.x_max));
    kv("dt", format_double(c.dt));
    kv("tfinal", format_double(c.t_final));
    kv("gamma", format_double(c.gamma));
    kv("flux", std::string(to_string(c.flux)));
    kv("time", std::string(to_string(c.time)));
    kv("ic", '"' + c.ic.describe() + '"');
    std::string snaps;
    for (double t : c.resolved_snapshot_times()) snaps += (snaps.empty() ? "" : ",") + format_double(t);
    kv("snapshots", '"' + snaps + '"');
    kv("out", c.output_dir);
    kv("bc", std::string(to_string(c.bc)));
    kv("newton-tol", format_double(c.newton.residual_tol));
    kv("max-newton", std::to_string(c.newton.max_iters));
    kv("quad-order", std::to_string(c.quad_order));
    kv("tadmor-order", std::to_string(c.tadmor_order));
    kv("es-coeff", format_double(c.dissipation.coefficient));
    kv("es-matrix", std::string(to_string(c.dissipation.kind)));
    kv("es-base", std::string(to_string(c.es_base)));
    kv("entropy-fix", c.roe_entropy_fix ? "true" : "false");
    kv("diagnostics", c.diagnostics ? "true" : "false");
    return os.str();
}

struct SnapshotRow {
    double x, rho, u, p, S;
};

struct Snapshot {
    double requested_time = 0.0;
    double time = 0.0;
    std::size_t step = 0;
    std::vector<SnapshotRow> rows;
};

struct RunArtifacts {
    std::vector<Snapshot> snapshots;
    std::vector<EntropyBudget> series;
    std::string config_echo;
    bool complete = false;
    std::string error;
    std::size_t steps_taken = 0;
    double wall_seconds = 0.0;
    std::size_t newton_iterations_total = 0;
    std::size_t newton_iterations_max = 0;

    ConservedState initial_totals{0, 0, 0};
    ConservedState final_totals{0, 0, 0};
    /// sum over steps of dt (f_right - f_left) at each scheme's flux level; one-level schemes only.
    ConservedState boundary_flux_integral{0, 0, 0};
    /// Largest per-step conservation defect, componentwise max.
    double max_conservation_defect = 0.0;
    /// Sum of the per-step defects: the global telescoping gap.
    ConservedState conservation_defect_sum{0, 0, 0};

    double cumulative_production() const {
        double s = 0.0;
        for (const auto& b : series) s += b.production;
        return s;
    }
};

inline Snapshot make_snapshot(const FieldArray& fields, const Mesh1D& mesh, const GasModel& g, double requested,
                              double t, std::size_t step) {
    Snapshot s{requested, t, step, {}};
    s.rows.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const auto w = cons_to_prim(fields[j], g);
        s.rows.push_back({mesh.center(j), w.rho, w.u, w.p, specific_entropy(w, g)});
    }
    return s;
}

inline FieldArray initial_field(const RunConfig& c, const GasModel& g) {
    if (c.ic.kind == InitialCondition::Kind::receding) return init_receding(c.mesh, c.ic.receding, g);
    return init_riemann(c.mesh, c.ic.left, c.ic.right, g);
}

/// Runs the experiment. Solver failures and blow-ups end the run early with
/// `complete == false` and whatever was recorded up to that point.
inline RunArtifacts run(const RunConfig& config) {
    validate(config);
    const auto t_start = std::chrono::steady_clock::now();
    const GasModel gas(config.gamma);
    const SpatialScheme space{config.mesh, config.bc, config.numerical_flux()};
    const IntegratorOptions integ{config.newton, config.quad_order};
    const BalanceOptions balance{config.quad_order};

    RunArtifacts art;
    art.config_echo = config_echo(config);

    TimeState state{initial_field(config, gas), 0.0, 0, std::nullopt};
    art.initial_totals = total_conserved(state.fields, config.mesh);

    auto requested = config.resolved_snapshot_times();
    std::vector<bool> taken(requested.size(), false);
    const double t_eps = 1e-9 * config.dt;
    auto take_snapshots = [&] {
        for (std::size_t i = 0; i < requested.size(); ++i) {
            if (!taken[i] && state.t >= requested[i] - t_eps) {
                art.snapshots.push_back(
                    make_snapshot(state.fields, config.mesh, gas, requested[i], state.t, state.step_index));
                taken[i] = true;
            }
        }
    };
    take_snapshots();

    const std::size_t n_steps = step_count(config.dt, config.t_final);
    try {
        for (std::size_t k = 0; k < n_steps; ++k) {
            StepStats stats;
            bool startup = false;
            TimeState next = advance(state, config.dt, config.time, space, gas, integ, &stats, &startup);
            next.t = static_cast<double>(next.step_index) * config.dt;
            art.newton_iterations_total += stats.newton_iterations;
            art.newton_iterations_max = std::max(art.newton_iterations_max, stats.newton_iterations);

            const TimeScheme used = startup ? TimeScheme::ec : config.time;
            const FieldArray* hist = needs_history(used) ? &*state.history : nullptr;
            const auto defect =
                step_conservation_defect(state.fields, next.fields, used, config.dt, space, gas, hist, balance);
            art.max_conservation_defect = std::max(art.max_conservation_defect, max_abs(defect));
            art.conservation_defect_sum = art.conservation_defect_sum + defect;
            if (!needs_history(used)) {
                art.boundary_flux_integral =
                    art.boundary_flux_integral + (defect - (total_conserved(next.fields, config.mesh) -
                                                            total_conserved(state.fields, config.mesh)));
            }
            if (config.diagnostics) {
                auto b = step_total_entropy_balance(state.fields, next.fields, used, config.dt, space, gas, hist,
                                                    balance);
                b.step_index = next.step_index;
                b.t = next.t;
                art.series.push_back(b);
            }
            state = std::move(next);
            art.steps_taken = state.step_index;
            take_snapshots();
        }
        art.complete = true;
    } catch (const std::runtime_error& e) {
        art.error = e.what();
    }
    art.final_totals = total_conserved(state.fields, config.mesh);
    art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return art;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + path.string());
    return os;
}

inline void finish_output(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw std::runtime_error("failed writing output file " + path.string());
}

}  // namespace detail

inline std::string snapshot_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", index);
    return buf;
}

/// Writes one snapshot file (`x,rho,u,p,S`).
inline void write_snapshot_csv(const Snapshot& snap, const std::filesystem::path& path) {
    auto os = detail::open_output(path);
    os << "x,rho,u,p,S\n";
    for (const auto& r : snap.rows) {
        os << format_double(r.x) << ',' << format_double(r.rho) << ',' << format_double(r.u) << ','
           << format_double(r.p) << ',' << format_double(r.S) << '\n';
    }
    detail::finish_output(os, path);
}

/// One file per snapshot in `dir`; returns the paths written.
inline std::vector<std::filesystem::path> write_snapshot_csv(const RunArtifacts& art,
                                                             const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> paths;
    for (std::size_t i = 0; i < art.snapshots.size(); ++i) {
        paths.push_back(dir / snapshot_file_name(i));
        write_snapshot_csv(art.snapshots[i], paths.back());
    }
    return paths;
}

inline void write_entropy_series_csv(const RunArtifacts& art, const std::filesystem::path& path) {
    auto os = detail::open_output(path);
    os << "step,t,total_U,total_rhoS,F_left,F_right,production\n";
    for (const auto& b : art.series) {
        os << b.step_index << ',' << format_double(b.t) << ',' << format_double(b.total_U) << ','
           << format_double(b.total_rhoS) << ',' << format_double(b.boundary_F_left) << ','
           << format_double(b.boundary_F_right) << ',' << format_double(b.production) << '\n';
    }
    detail::finish_output(os, path);
}

inline void write_config_echo(const RunArtifacts& art, const std::filesystem::path& path) {
    auto os = detail::open_output(path);
    os << art.config_echo;
    detail::finish_output(os, path);
}

/// Gnuplot script: a density/pressure/velocity/entropy panel per snapshot and
/// the cumulative entropy production curve.
inline std::string plot_script(const RunArtifacts& art, const std::string& series_file) {
    std::ostringstream os;
    os << "# gnuplot script; run from the output directory: gnuplot plot.gp\n";
    os << "set datafile separator ','\n";
    os << "set terminal pngcairo size 1200,900\n";
    for (std::size_t i = 0; i < art.snapshots.size(); ++i) {
        const auto csv = snapshot_file_name(i);
        const auto png = csv.substr(0, csv.size() - 4) + ".png";
        os << "\nset output '" << png << "'\n";
        os << "set multiplot layout 2,2 title 't = " << format_double(art.snapshots[i].time) << "'\n";
        const char* titles[] = {"Density", "Pressure", "Velocity", "Specific entropy"};
        const int cols[] = {2, 4, 3, 5};
        for (int k = 0; k < 4; ++k) {
            os << "set title '" << titles[k] << "'\n";
            os << "plot '" << csv << "' using 1:" << cols[k] << " with linespoints pt 7 ps 0.4 notitle\n";
        }
        os << "unset multiplot\n";
    }
    if (!art.series.empty()) {
        os << "\nset output 'entropy_production.png'\n";
        os << "set title 'Cumulative entropy production'\n";
        os << "set xlabel 't'\n";
        os << "cum = 0\n";
        os << "plot '" << series_file << "' using 2:(cum = cum + $7) with lines notitle\n";
    }
    return os.str();
}

inline void emit_plot_script(const RunArtifacts& art, const std::filesystem::path& path,
                             const std::string& series_file = "entropy_series.csv") {
    auto os = detail::open_output(path);
    os << plot_script(art, series_file);
    detail::finish_output(os, path);
}

/// Writes every artifact into `dir` (created if needed).
inline void write_outputs(const RunArtifacts& art, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_snapshot_csv(art, dir);
    if (!art.series.empty()) write_entropy_series_csv(art, dir / "entropy_series.csv");
    write_config_echo(art, dir / "config.txt");
    emit_plot_script(art, dir / "plot.gp");
    auto os = detail::open_output(dir / "run_stats.txt");
    os << "complete=" << (art.complete ? "true" : "false") << '\n'
       << "steps=" << art.steps_taken << '\n'
       << "wall_seconds=" << format_double(art.wall_seconds) << '\n'
       << "newton_iterations_total=" << art.newton_iterations_total << '\n'
       << "newton_iterations_max=" << art.newton_iterations_max << '\n'
       << "cumulative_production=" << format_double(art.cumulative_production()) << '\n';
    if (!art.error.empty()) os << "error=" << art.error << '\n';
    detail::finish_output(os, dir / "run_stats.txt");
}

}  // namespace ecfv
