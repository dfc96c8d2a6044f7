#pragma once

/// Command-line / config-file front end producing a RunConfig.
///
/// Config files use the same `key=value` lines the run writes as its config
/// echo, so a finished run can be replayed with `--config <dir>/config.txt`.
/// Flags given on the command line override values from the file.

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecfv/errors.hpp"
#include "ecfv/harness.hpp"

namespace ecfv {

/// Raw option values as CLI11 fills them.
struct CliOptions {
    std::size_t cells = 100;
    double xmin = -0.5;
    double xmax = 0.5;
    double dt = 0.0;
    double tfinal = 0.0;
    double gamma = 1.4;
    std::string flux;
    std::string time;
    std::string ic = "receding:1,0.4,0.5";
    std::string snapshots;
    std::string out = "out";
    std::string bc = "transmissive";
    double newton_tol = 1e-12;
    std::size_t max_newton = 50;
    std::size_t quad_order = 16;
    std::size_t tadmor_order = kDefaultTadmorOrder;
    double es_coeff = 0.5;
    std::string es_matrix = "jacobian";
    std::string es_base = "ec-roe";
    bool entropy_fix = false;
    bool diagnostics = true;
};

inline void add_cli_options(CLI::App& app, CliOptions& o) {
    app.set_config("--config", "", "Read key=value options from a file (command-line flags take precedence)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.add_option("--cells", o.cells, "Number of cells")->capture_default_str();
    app.add_option("--xmin", o.xmin, "Left domain bound")->capture_default_str();
    app.add_option("--xmax", o.xmax, "Right domain bound")->capture_default_str();
    app.add_option("--dt", o.dt, "Fixed time step")->required();
    app.add_option("--tfinal", o.tfinal, "Final time")->required();
    app.add_option("--gamma", o.gamma, "Ratio of specific heats")->capture_default_str();
    app.add_option("--flux", o.flux, "roe|ec-roe|ec-chandrashekhar|ec-kep|ec-tadmor|es")->required();
    app.add_option("--time", o.time, "fe|be|bdf2|leapfrog|ec|ec-quadrature")->required();
    app.add_option("--ic", o.ic, "receding:<rho0>,<p0>,<u0> or riemann:<rhoL,uL,pL;rhoR,uR,pR>")
        ->capture_default_str();
    app.add_option("--snapshots", o.snapshots, "Comma-separated snapshot times (default: tfinal)");
    app.add_option("--out", o.out, "Output directory")->capture_default_str();
    app.add_option("--bc", o.bc, "transmissive|periodic")->capture_default_str();
    app.add_option("--newton-tol", o.newton_tol, "Newton residual tolerance (infinity norm)")->capture_default_str();
    app.add_option("--max-newton", o.max_newton, "Maximum Newton iterations per step")->capture_default_str();
    app.add_option("--quad-order", o.quad_order, "Gauss-Legendre order for intermediate states and diagnostics")
        ->capture_default_str();
    app.add_option("--tadmor-order", o.tadmor_order, "Gauss-Legendre order of the ec-tadmor flux")
        ->capture_default_str();
    app.add_option("--es-coeff", o.es_coeff, "Dissipation coefficient of the es flux")->capture_default_str();
    app.add_option("--es-matrix", o.es_matrix, "identity|jacobian")->capture_default_str();
    app.add_option("--es-base", o.es_base, "EC flux underlying the es flux")->capture_default_str();
    app.add_option("--entropy-fix", o.entropy_fix, "Harten entropy fix for the classic Roe flux")
        ->capture_default_str();
    app.add_option("--diagnostics", o.diagnostics, "Record per-step entropy budgets")->capture_default_str();
}

namespace detail {

inline std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("invalid number '" + item + "' in --" + key);
        }
    }
    return out;
}

inline PrimitiveState parse_primitive(const std::string& text, const std::string& key) {
    const auto v = parse_number_list(text, key);
    if (v.size() != 3) throw UsageError("--" + key + " expects three values rho,u,p per state");
    return {v[0], v[1], v[2]};
}

inline InitialCondition parse_ic(const std::string& text) {
    InitialCondition ic;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "receding") {
        const auto v = parse_number_list(body, "ic");
        if (v.size() != 3) throw UsageError("--ic receding expects receding:<rho0>,<p0>,<u0>");
        ic.kind = InitialCondition::Kind::receding;
        ic.receding = {v[0], v[1], v[2]};
        return ic;
    }
    if (kind == "riemann") {
        const auto semi = body.find(';');
        if (semi == std::string::npos) throw UsageError("--ic riemann expects riemann:<rhoL,uL,pL;rhoR,uR,pR>");
        ic.kind = InitialCondition::Kind::riemann;
        ic.left = parse_primitive(body.substr(0, semi), "ic");
        ic.right = parse_primitive(body.substr(semi + 1), "ic");
        return ic;
    }
    throw UsageError("--ic must start with 'receding:' or 'riemann:' (got '" + text + "')");
}

inline EcFluxKind parse_ec_base(const std::string& name) {
    switch (parse_flux_kind(name)) {
        case FluxKind::ec_roe: return EcFluxKind::roe;
        case FluxKind::ec_chandrashekhar: return EcFluxKind::chandrashekhar;
        case FluxKind::ec_kep: return EcFluxKind::kep_pu;
        case FluxKind::ec_tadmor: return EcFluxKind::tadmor;
        default: throw UsageError("--es-base must name an EC flux (ec-roe, ec-chandrashekhar, ec-kep, ec-tadmor)");
    }
}

}  // namespace detail

/// Converts parsed option values into a validated RunConfig.
inline RunConfig resolve_config(const CliOptions& o) {
    RunConfig c;
    c.mesh = {o.xmin, o.xmax, o.cells};
    c.dt = o.dt;
    c.t_final = o.tfinal;
    c.gamma = o.gamma;
    c.flux = parse_flux_kind(o.flux);
    c.time = parse_time_scheme(o.time);
    c.ic = detail::parse_ic(o.ic);
    if (!o.snapshots.empty()) c.snapshot_times = detail::parse_number_list(o.snapshots, "snapshots");
    c.output_dir = o.out;
    if (o.bc == "transmissive") {
        c.bc = BoundaryKind::transmissive;
    } else if (o.bc == "periodic") {
        c.bc = BoundaryKind::periodic;
    } else {
        throw UsageError("--bc must be transmissive or periodic (got '" + o.bc + "')");
    }
    c.newton.residual_tol = o.newton_tol;
    c.newton.max_iters = o.max_newton;
    c.quad_order = o.quad_order;
    c.tadmor_order = o.tadmor_order;
    c.dissipation.coefficient = o.es_coeff;
    if (o.es_matrix == "identity") {
        c.dissipation.kind = DissipationKind::scaled_identity;
    } else if (o.es_matrix == "jacobian") {
        c.dissipation.kind = DissipationKind::scaled_temporal_jacobian;
    } else {
        throw UsageError("--es-matrix must be identity or jacobian (got '" + o.es_matrix + "')");
    }
    c.es_base = detail::parse_ec_base(o.es_base);
    c.roe_entropy_fix = o.entropy_fix;
    c.diagnostics = o.diagnostics;
    validate(c);
    return c;
}

/// Parses arguments (without the program name). Any problem, including a
/// missing required option or an unknown key, raises UsageError naming it.
inline RunConfig parse_config(std::vector<std::string> args) {
    CLI::App app{"ecfv"};
    CliOptions o;
    add_cli_options(app, o);
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    return resolve_config(o);
}

}  // namespace ecfv
