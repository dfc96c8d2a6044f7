#pragma once

/// Two-point interface fluxes. All fluxes take conserved states; any change of
/// variables happens inside. Entropy-conservative (EC) fluxes satisfy
///   (v_R - v_L)^T f = psi_R - psi_L,   psi = rho*u,
/// which is what ec_condition_residual measures.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "ecfv/errors.hpp"
#include "ecfv/euler.hpp"
#include "ecfv/means.hpp"
#include "ecfv/quadrature.hpp"

namespace ecfv {

inline FluxVector flux_ec_roe(const ConservedState& L, const ConservedState& R, const GasModel& g) {
    const auto wl = cons_to_prim(L, g);
    const auto wr = cons_to_prim(R, g);
    // z = (sqrt(rho/p), sqrt(rho/p) u, sqrt(rho p))
    const double z1l = std::sqrt(wl.rho / wl.p), z1r = std::sqrt(wr.rho / wr.p);
    const double z2l = z1l * wl.u, z2r = z1r * wr.u;
    const double z3l = std::sqrt(wl.rho * wl.p), z3r = std::sqrt(wr.rho * wr.p);

    const double z1 = arith_mean(z1l, z1r);
    const double z2 = arith_mean(z2l, z2r);
    const double z3 = arith_mean(z3l, z3r);
    const double z1_ln = log_mean(z1l, z1r);
    const double z3_ln = log_mean(z3l, z3r);
    const double gamma = g.gamma();

    const double f1 = z2 * z3_ln;
    const double f2 = (z3 + f1 * z2) / z1;
    const double f3 = (-f1 * ((1.0 + gamma) / (1.0 - gamma)) / z1_ln + f2 * z2) / (2.0 * z1);
    return {f1, f2, f3};
}

/// Kinetic-energy preserving EC flux built on z = (rho, u, rho/(2p)).
inline FluxVector flux_ec_chandrashekhar(const ConservedState& L, const ConservedState& R, const GasModel& g) {
    const auto wl = cons_to_prim(L, g);
    const auto wr = cons_to_prim(R, g);
    const double bl = 0.5 * wl.rho / wl.p, br = 0.5 * wr.rho / wr.p;

    const double rho = arith_mean(wl.rho, wr.rho);
    const double u = arith_mean(wl.u, wr.u);
    const double beta = arith_mean(bl, br);
    const double u2 = arith_mean(wl.u * wl.u, wr.u * wr.u);
    const double rho_ln = log_mean(wl.rho, wr.rho);
    const double beta_ln = log_mean(bl, br);

    const double f1 = rho_ln * u;
    const double f2 = rho / (2.0 * beta) + u * f1;
    const double f3 = (1.0 / (2.0 * g.gm1() * beta_ln) - 0.5 * u2) * f1 + u * f2;
    return {f1, f2, f3};
}

/// Kinetic-energy preserving EC flux built on z = (p, u, rho/(2p)).
inline FluxVector flux_ec_kep_pu(const ConservedState& L, const ConservedState& R, const GasModel& g) {
    const auto wl = cons_to_prim(L, g);
    const auto wr = cons_to_prim(R, g);
    const double bl = 0.5 * wl.rho / wl.p, br = 0.5 * wr.rho / wr.p;

    const double p = arith_mean(wl.p, wr.p);
    const double rho = arith_mean(wl.rho, wr.rho);
    const double u = arith_mean(wl.u, wr.u);
    const double beta = arith_mean(bl, br);
    const double u2 = arith_mean(wl.u * wl.u, wr.u * wr.u);
    const double p_ln = log_mean(wl.p, wr.p);
    const double beta_ln = log_mean(bl, br);
    const double gamma = g.gamma();

    const double f1 = 2.0 * beta * u * p_ln;
    const double f2 = rho / (2.0 * beta) + u * f1;
    const double f3 = f1 * (gamma / (g.gm1() * 2.0 * beta_ln) - 0.5 * u2) + f2 * u - p * u;
    return {f1, f2, f3};
}

inline constexpr std::size_t kDefaultTadmorOrder = 8;

/// Straight-path average of the physical flux in entropy variables,
/// integral_0^1 f(u(v_L + xi (v_R - v_L))) dxi, by Gauss-Legendre.
inline FluxVector flux_ec_tadmor_quadrature(const ConservedState& L, const ConservedState& R, const GasModel& g,
                                            std::size_t order = kDefaultTadmorOrder) {
    const auto vl = entropy_variables(L, g);
    const auto dv = entropy_variables(R, g) - vl;
    if (max_abs(dv) == 0.0) return exact_flux(L, g);
    return integrate(
        [&](double xi) {
            const auto v = vl + xi * dv;
            try {
                return exact_flux(entropy_vars_to_prim(v, g), g);
            } catch (const InvalidStateError& e) {
                throw PathInvalidError(std::string("Tadmor flux path leaves the admissible set: ") + e.what());
            }
        },
        0.0, 1.0, order);
}

struct RoeOptions {
    bool entropy_fix = false;
    double fix_fraction = 0.1;  ///< Harten delta as a fraction of the Roe sound speed
};

/// Roe's approximate Riemann solver flux with Roe-averaged eigensystem.
inline FluxVector flux_roe_classic(const ConservedState& L, const ConservedState& R, const GasModel& g,
                                   const RoeOptions& opt = {}) {
    const auto wl = cons_to_prim(L, g);
    const auto wr = cons_to_prim(R, g);
    const double hl = (L.ene + wl.p) / wl.rho;
    const double hr = (R.ene + wr.p) / wr.rho;
    const double sl = std::sqrt(wl.rho), sr = std::sqrt(wr.rho);
    const double u = (sl * wl.u + sr * wr.u) / (sl + sr);
    const double h = (sl * hl + sr * hr) / (sl + sr);
    const double a2 = g.gm1() * (h - 0.5 * u * u);
    if (!(a2 > 0)) throw InvalidStateError("Roe average has non-positive sound speed squared", a2);
    const double a = std::sqrt(a2);

    const double d1 = R.rho - L.rho, d2 = R.mom - L.mom, d3 = R.ene - L.ene;
    const double alpha2 = g.gm1() / a2 * (d1 * (h - u * u) + u * d2 - d3);
    const double alpha1 = (d1 * (u + a) - d2 - a * alpha2) / (2.0 * a);
    const double alpha3 = d1 - (alpha1 + alpha2);

    auto speed = [&](double lambda) {
        const double s = std::abs(lambda);
        if (!opt.entropy_fix) return s;
        const double delta = opt.fix_fraction * a;
        return s < delta ? 0.5 * (s * s + delta * delta) / delta : s;
    };
    const double k1 = speed(u - a) * alpha1;
    const double k2 = speed(u) * alpha2;
    const double k3 = speed(u + a) * alpha3;

    const auto fl = exact_flux(wl, g);
    const auto fr = exact_flux(wr, g);
    const std::array<double, 3> diss = {k1 + k2 + k3,
                                        k1 * (u - a) + k2 * u + k3 * (u + a),
                                        k1 * (h - u * a) + k2 * 0.5 * u * u + k3 * (h + u * a)};
    return {0.5 * (fl.f1 + fr.f1 - diss[0]), 0.5 * (fl.f2 + fr.f2 - diss[1]), 0.5 * (fl.f3 + fr.f3 - diss[2])};
}

enum class EcFluxKind { roe, chandrashekhar, kep_pu, tadmor };

enum class DissipationKind { none, scaled_identity, scaled_temporal_jacobian };

/// Q = alpha * I or alpha * H(v_mean), with alpha = coefficient * max(|u| + a).
struct DissipationSpec {
    DissipationKind kind = DissipationKind::scaled_temporal_jacobian;
    double coefficient = 0.5;
};

inline FluxVector flux_ec(EcFluxKind kind, const ConservedState& L, const ConservedState& R, const GasModel& g,
                          std::size_t tadmor_order = kDefaultTadmorOrder) {
    switch (kind) {
        case EcFluxKind::roe: return flux_ec_roe(L, R, g);
        case EcFluxKind::chandrashekhar: return flux_ec_chandrashekhar(L, R, g);
        case EcFluxKind::kep_pu: return flux_ec_kep_pu(L, R, g);
        case EcFluxKind::tadmor: return flux_ec_tadmor_quadrature(L, R, g, tadmor_order);
    }
    throw UsageError("unknown EC flux kind");
}

/// Dissipation matrix of an entropy-stable flux at one interface.
inline SymMatrix3 dissipation_matrix(const ConservedState& L, const ConservedState& R, const GasModel& g,
                                     const DissipationSpec& d) {
    if (!(d.coefficient >= 0)) throw UsageError("dissipation coefficient must be non-negative");
    SymMatrix3 Q;
    if (d.kind == DissipationKind::none || d.coefficient == 0.0) return Q;
    const auto wl = cons_to_prim(L, g);
    const auto wr = cons_to_prim(R, g);
    const double smax = std::max(std::abs(wl.u) + sound_speed(wl, g), std::abs(wr.u) + sound_speed(wr, g));
    const double alpha = d.coefficient * smax;
    if (d.kind == DissipationKind::scaled_identity) {
        Q.a00 = Q.a11 = Q.a22 = alpha;
        return Q;
    }
    const auto vmean = 0.5 * (entropy_variables(wl, g) + entropy_variables(wr, g));
    const auto H = temporal_jacobian(entropy_vars_to_prim(vmean, g), g);
    Q.a00 = alpha * H.a00;
    Q.a01 = alpha * H.a01;
    Q.a02 = alpha * H.a02;
    Q.a11 = alpha * H.a11;
    Q.a12 = alpha * H.a12;
    Q.a22 = alpha * H.a22;
    return Q;
}

/// f = f_EC - Q (v_R - v_L).
inline FluxVector flux_es(const ConservedState& L, const ConservedState& R, const GasModel& g, EcFluxKind ec,
                          const DissipationSpec& d, std::size_t tadmor_order = kDefaultTadmorOrder) {
    const auto fec = flux_ec(ec, L, R, g, tadmor_order);
    const auto Q = dissipation_matrix(L, R, g, d);
    const auto dv = entropy_variables(R, g) - entropy_variables(L, g);
    return fec - FluxVector::from_array(Q.apply(dv));
}

/// dv^T Q dv at one interface; the interface's share of the spatial entropy production.
inline double es_dissipation_rate(const ConservedState& L, const ConservedState& R, const GasModel& g,
                                  const DissipationSpec& d) {
    const auto dv = entropy_variables(R, g) - entropy_variables(L, g);
    return dissipation_matrix(L, R, g, d).quadratic_form(dv);
}

/// F_{j+1/2} = (v_L + v_R)^T f / 2 - (psi_L + psi_R) / 2.
inline double interface_entropy_flux(const ConservedState& L, const ConservedState& R, const FluxVector& f,
                                     const GasModel& g) {
    const auto vsum = entropy_variables(L, g) + entropy_variables(R, g);
    return 0.5 * dot(vsum, f) - 0.5 * (flux_potential(L) + flux_potential(R));
}

/// (v_R - v_L)^T f - (psi_R - psi_L); zero iff f is entropy conservative for this pair.
inline double ec_condition_residual(const ConservedState& L, const ConservedState& R, const FluxVector& f,
                                    const GasModel& g) {
    const auto dv = entropy_variables(R, g) - entropy_variables(L, g);
    return dot(dv, f) - (flux_potential(R) - flux_potential(L));
}

/// Round-off scale of ec_condition_residual: the residual is a sum of terms of
/// size |v_i f_i| that cancel, so it cannot be resolved below eps times this.
inline double ec_residual_scale(const ConservedState& L, const ConservedState& R, const FluxVector& f,
                                const GasModel& g) {
    const auto vl = entropy_variables(L, g);
    const auto vr = entropy_variables(R, g);
    double s = std::max({1.0, std::abs(flux_potential(L)), std::abs(flux_potential(R))});
    double terms = 0.0;
    for (std::size_t i = 0; i < 3; ++i) terms += std::max(std::abs(vl[i]), std::abs(vr[i])) * std::abs(f[i]);
    return std::max(s, terms);
}

/// Pressure part of a kinetic-energy preserving split f2 = p~ + u_mean f1.
inline double kep_pressure(const ConservedState& L, const ConservedState& R, const FluxVector& f) {
    const double u = arith_mean(L.mom / L.rho, R.mom / R.rho);
    return f.f2 - u * f.f1;
}

// ---------------------------------------------------------------------------
// Runtime-selectable flux used by the solver and the command line.

enum class FluxKind { roe, ec_roe, ec_chandrashekhar, ec_kep, ec_tadmor, es };

inline constexpr std::array<std::string_view, 6> kFluxNames = {"roe",    "ec-roe",    "ec-chandrashekhar",
                                                               "ec-kep", "ec-tadmor", "es"};

inline std::string_view to_string(FluxKind k) { return kFluxNames[static_cast<std::size_t>(k)]; }

inline FluxKind parse_flux_kind(std::string_view name) {
    for (std::size_t i = 0; i < kFluxNames.size(); ++i) {
        if (kFluxNames[i] == name) return static_cast<FluxKind>(i);
    }
    std::string valid;
    for (auto n : kFluxNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw UsageError("unknown flux '" + std::string(name) + "' (valid: " + valid + ")");
}

inline bool is_entropy_conservative(FluxKind k) {
    return k == FluxKind::ec_roe || k == FluxKind::ec_chandrashekhar || k == FluxKind::ec_kep ||
           k == FluxKind::ec_tadmor;
}

struct NumericalFlux {
    GasModel gas{};
    FluxKind kind = FluxKind::ec_roe;
    std::size_t tadmor_order = kDefaultTadmorOrder;
    EcFluxKind es_base = EcFluxKind::roe;
    DissipationSpec dissipation{};
    RoeOptions roe{};

    FluxVector operator()(const ConservedState& L, const ConservedState& R) const {
        switch (kind) {
            case FluxKind::roe: return flux_roe_classic(L, R, gas, roe);
            case FluxKind::ec_roe: return flux_ec_roe(L, R, gas);
            case FluxKind::ec_chandrashekhar: return flux_ec_chandrashekhar(L, R, gas);
            case FluxKind::ec_kep: return flux_ec_kep_pu(L, R, gas);
            case FluxKind::ec_tadmor: return flux_ec_tadmor_quadrature(L, R, gas, tadmor_order);
            case FluxKind::es: return flux_es(L, R, gas, es_base, dissipation, tadmor_order);
        }
        throw UsageError("unknown flux kind");
    }
};

}  // namespace ecfv
