#pragma once

/// Discrete entropy bookkeeping for the fully discrete schemes.
///
/// For one cell and two levels with dv = v^{n+1} - v^n and
/// v(xi) = (v^n + v^{n+1})/2 + xi dv, xi in [-1/2, 1/2]:
///   E_FE = int (1/2 + xi) dv^T H(v(xi)) dv dxi = U^{n+1} - U^n - (v^n)^T du
///   E_BE = int (1/2 - xi) dv^T H(v(xi)) dv dxi = (v^{n+1})^T du - (U^{n+1} - U^n)
/// Both are positive whenever the levels differ.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "ecfv/errors.hpp"
#include "ecfv/euler.hpp"
#include "ecfv/fluxes.hpp"
#include "ecfv/mesh.hpp"
#include "ecfv/quadrature.hpp"
#include "ecfv/time_integrators.hpp"

namespace ecfv {

struct QuadratureSpec {
    std::size_t order = 16;
};

inline void validate(const QuadratureSpec& q) {
    if (q.order < 2) throw UsageError("entropy-production quadrature needs order >= 2");
}

namespace detail {

/// int_{-1/2}^{1/2} (1/2 + side*xi) dv^T H(v(xi)) dv dxi
inline double weighted_path_integral(const EntropyVars& vn, const EntropyVars& vnp1, const GasModel& g,
                                     const QuadratureSpec& q, double side) {
    validate(q);
    const auto mid = 0.5 * (vn + vnp1);
    const auto dv = vnp1 - vn;
    return integrate(
        [&](double xi) {
            PrimitiveState w;
            try {
                w = entropy_vars_to_prim(mid + xi * dv, g);
            } catch (const InvalidStateError& e) {
                throw PathInvalidError(std::string("entropy-production path leaves the admissible set: ") + e.what());
            }
            return (0.5 + side * xi) * temporal_jacobian(w, g).quadratic_form(dv);
        },
        -0.5, 0.5, q.order);
}

}  // namespace detail

inline double entropy_prod_fe(const EntropyVars& vn, const EntropyVars& vnp1, const GasModel& g,
                              const QuadratureSpec& q = {}) {
    return detail::weighted_path_integral(vn, vnp1, g, q, +1.0);
}

inline double entropy_prod_be(const EntropyVars& vn, const EntropyVars& vnp1, const GasModel& g,
                              const QuadratureSpec& q = {}) {
    return detail::weighted_path_integral(vn, vnp1, g, q, -1.0);
}

/// (4/3) E_BE(v^{n+1}, v^{n+2}) - (1/3) E_BE(v^n, v^{n+2}); sign not known in general.
inline double entropy_prod_bdf2(const EntropyVars& vn, const EntropyVars& vnp1, const EntropyVars& vnp2,
                                const GasModel& g, const QuadratureSpec& q = {}) {
    return (4.0 / 3.0) * entropy_prod_be(vnp1, vnp2, g, q) - (1.0 / 3.0) * entropy_prod_be(vn, vnp2, g, q);
}

/// E_BE(v^{n-1}, v^n) - E_FE(v^n, v^{n+1}); sign not known in general.
inline double entropy_prod_leapfrog(const EntropyVars& vnm1, const EntropyVars& vn, const EntropyVars& vnp1,
                                    const GasModel& g, const QuadratureSpec& q = {}) {
    return entropy_prod_be(vnm1, vn, g, q) - entropy_prod_fe(vn, vnp1, g, q);
}

/// One step's global entropy balance.
///
/// production is the discrete analogue of d/dt int U + [F]: for one-level
/// schemes  P = dx sum_j (U_j^after - U_j^before) + dt (F_right - F_left),
/// with the boundary entropy fluxes taken at the level the scheme evaluates
/// its fluxes (n for FE, n+1 for BE, the intermediate state for EC).
struct EntropyBudget {
    std::size_t step_index = 0;
    double t = 0.0;
    double total_U = 0.0;
    double total_rhoS = 0.0;
    double boundary_F_left = 0.0;
    double boundary_F_right = 0.0;
    double production = 0.0;
};

/// dx sum U_j and dx sum rho_j S_j.
inline std::pair<double, double> entropy_totals(const FieldArray& fields, const Mesh1D& mesh, const GasModel& g) {
    double U = 0.0;
    double rhoS = 0.0;
    for (const auto& c : fields) {
        const auto w = cons_to_prim(c, g);
        const double S = specific_entropy(w, g);
        U += -w.rho * S / g.gm1();
        rhoS += w.rho * S;
    }
    return {mesh.dx() * U, mesh.dx() * rhoS};
}

/// Entropy fluxes through the two domain ends for the given flux-evaluation level.
template <InterfaceFlux Flux>
std::pair<double, double> boundary_entropy_fluxes(const FieldArray& level, const SpatialScheme<Flux>& space,
                                                  const GasModel& g) {
    const auto ext = apply_boundary(level, space.bc);
    const std::size_t n = level.size();
    const double left = interface_entropy_flux(ext[0], ext[1], space.flux(ext[0], ext[1]), g);
    const double right = interface_entropy_flux(ext[n], ext[n + 1], space.flux(ext[n], ext[n + 1]), g);
    return {left, right};
}

/// Per-cell mass/momentum/energy fluxes through the domain ends at a level.
template <InterfaceFlux Flux>
std::pair<FluxVector, FluxVector> boundary_fluxes(const FieldArray& level, const SpatialScheme<Flux>& space) {
    const auto ext = apply_boundary(level, space.bc);
    const std::size_t n = level.size();
    return {space.flux(ext[0], ext[1]), space.flux(ext[n], ext[n + 1])};
}

struct BalanceOptions {
    std::size_t ec_quadrature_order = kDefaultIntermediateOrder;  ///< intermediate state of ec-quadrature
};

/// Global entropy balance of one step from `before` to `after`.
///
/// Two-level schemes need `history` (u^n for BDF2 where before = u^{n+1},
/// u^{n-1} for leap-frog where before = u^n); their balances are
///   BDF2: dx sum (U^{n+2} - 4/3 U^{n+1} + 1/3 U^n) + (2/3) dt [F]^{n+2}
///   LF:   dx sum (U^{n+1} - U^{n-1}) + 2 dt [F]^n.
template <InterfaceFlux Flux>
EntropyBudget step_total_entropy_balance(const FieldArray& before, const FieldArray& after, TimeScheme ts, double dt,
                                         const SpatialScheme<Flux>& space, const GasModel& g,
                                         const FieldArray* history = nullptr, const BalanceOptions& opt = {}) {
    if (before.size() != after.size() || before.size() != space.mesh.n_cells) {
        throw UsageError("entropy balance: field sizes do not match the mesh");
    }
    if (needs_history(ts) && (history == nullptr || history->size() != before.size())) {
        throw UsageError("entropy balance: scheme " + std::string(to_string(ts)) + " needs the previous level");
    }
    const auto [U_after, rhoS_after] = entropy_totals(after, space.mesh, g);
    const double U_before = entropy_totals(before, space.mesh, g).first;

    EntropyBudget b;
    b.total_U = U_after;
    b.total_rhoS = rhoS_after;

    double dU = U_after - U_before;
    double weight = 1.0;
    std::pair<double, double> F;
    switch (ts) {
        case TimeScheme::fe: F = boundary_entropy_fluxes(before, space, g); break;
        case TimeScheme::be: F = boundary_entropy_fluxes(after, space, g); break;
        case TimeScheme::ec:
            F = boundary_entropy_fluxes(intermediate_field(before, after, g, IntermediateKind::closed_form), space, g);
            break;
        case TimeScheme::ec_quadrature:
            F = boundary_entropy_fluxes(
                intermediate_field(before, after, g, IntermediateKind::quadrature, opt.ec_quadrature_order), space, g);
            break;
        case TimeScheme::bdf2: {
            const double U_hist = entropy_totals(*history, space.mesh, g).first;
            dU = U_after - (4.0 / 3.0) * U_before + (1.0 / 3.0) * U_hist;
            weight = 2.0 / 3.0;
            F = boundary_entropy_fluxes(after, space, g);
            break;
        }
        case TimeScheme::leapfrog: {
            const double U_hist = entropy_totals(*history, space.mesh, g).first;
            dU = U_after - U_hist;
            weight = 2.0;
            F = boundary_entropy_fluxes(before, space, g);
            break;
        }
    }
    b.boundary_F_left = F.first;
    b.boundary_F_right = F.second;
    b.production = dU + weight * dt * (F.second - F.first);
    return b;
}

/// Conservation defect of one step: the scheme's discrete balance of
/// dx sum u minus the boundary-flux contribution, per component. Zero up to
/// round-off for explicit schemes and to solver tolerance for implicit ones.
template <InterfaceFlux Flux>
ConservedState step_conservation_defect(const FieldArray& before, const FieldArray& after, TimeScheme ts, double dt,
                                        const SpatialScheme<Flux>& space, const GasModel& g,
                                        const FieldArray* history = nullptr, const BalanceOptions& opt = {}) {
    if (needs_history(ts) && history == nullptr) {
        throw UsageError("conservation defect: scheme " + std::string(to_string(ts)) + " needs the previous level");
    }
    const auto& mesh = space.mesh;
    ConservedState change = total_conserved(after, mesh) - total_conserved(before, mesh);
    double weight = 1.0;
    std::pair<FluxVector, FluxVector> f;
    switch (ts) {
        case TimeScheme::fe: f = boundary_fluxes(before, space); break;
        case TimeScheme::be: f = boundary_fluxes(after, space); break;
        case TimeScheme::ec:
            f = boundary_fluxes(intermediate_field(before, after, g, IntermediateKind::closed_form), space);
            break;
        case TimeScheme::ec_quadrature:
            f = boundary_fluxes(
                intermediate_field(before, after, g, IntermediateKind::quadrature, opt.ec_quadrature_order), space);
            break;
        case TimeScheme::bdf2:
            change = total_conserved(after, mesh) - (4.0 / 3.0) * total_conserved(before, mesh) +
                     (1.0 / 3.0) * total_conserved(*history, mesh);
            weight = 2.0 / 3.0;
            f = boundary_fluxes(after, space);
            break;
        case TimeScheme::leapfrog:
            change = total_conserved(after, mesh) - total_conserved(*history, mesh);
            weight = 2.0;
            f = boundary_fluxes(before, space);
            break;
    }
    const auto net = f.second - f.first;
    return change + (weight * dt) * ConservedState{net.f1, net.f2, net.f3};
}

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};

namespace detail {

inline FieldArray first_fe_step_receding(const RecedingIC& ic, const Mesh1D& mesh, double dt, const GasModel& g) {
    const auto u0 = init_receding(mesh, ic, g);
    auto flux = [&g](const ConservedState& L, const ConservedState& R) { return flux_ec_roe(L, R, g); };
    const SpatialScheme space{mesh, BoundaryKind::transmissive, flux};
    return step_fe(TimeState{u0, 0.0, 0, std::nullopt}, dt, space, g).fields;
}

}  // namespace detail

/// One FE step with the EC Roe flux on receding data; in the first cell right
/// of the center returns lhs = S^1 - S^0 and rhs = (1 - gamma) E_FE / rho^1.
inline IdentityCheck first_step_s_jump_check(const RecedingIC& ic, const Mesh1D& mesh, double dt, const GasModel& g,
                                             const QuadratureSpec& q = {}) {
    const auto u1 = detail::first_fe_step_receding(ic, mesh, dt, g);
    const std::size_t r = center_right_cell(mesh);
    const auto c0 = prim_to_cons(ic.right(), g);
    const auto w0 = cons_to_prim(c0, g);
    const auto w1 = cons_to_prim(u1[r], g);
    const double e_fe = entropy_prod_fe(entropy_variables(w0, g), entropy_variables(w1, g), g, q);
    return {specific_entropy(w1, g) - specific_entropy(w0, g), (1.0 - g.gamma()) * e_fe / w1.rho};
}

/// Same configuration; lhs = rho^1 - rho^0 in the center-right cell, rhs = -(dt/dx) rho0 u0.
inline IdentityCheck density_first_step_check(const RecedingIC& ic, const Mesh1D& mesh, double dt,
                                              const GasModel& g) {
    const auto u1 = detail::first_fe_step_receding(ic, mesh, dt, g);
    const std::size_t r = center_right_cell(mesh);
    return {u1[r].rho - ic.rho0, -(dt / mesh.dx()) * ic.rho0 * ic.u0};
}

}  // namespace ecfv
