#pragma once

/// Time integrators for the finite-volume semi-discretization: forward and
/// backward Euler, BDF2, leap-frog, and an entropy-conservative implicit
/// scheme  u^{n+1} = u^n + dt R(u(v^{n+1/2}))  whose intermediate state is
/// either the closed form below or the straight-path quadrature average.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "ecfv/errors.hpp"
#include "ecfv/euler.hpp"
#include "ecfv/means.hpp"
#include "ecfv/mesh.hpp"
#include "ecfv/newton.hpp"
#include "ecfv/quadrature.hpp"

namespace ecfv {

enum class TimeScheme { fe, be, bdf2, leapfrog, ec, ec_quadrature };

inline constexpr std::array<std::string_view, 6> kTimeSchemeNames = {"fe",       "be", "bdf2",
                                                                     "leapfrog", "ec", "ec-quadrature"};

inline std::string_view to_string(TimeScheme s) { return kTimeSchemeNames[static_cast<std::size_t>(s)]; }

inline TimeScheme parse_time_scheme(std::string_view name) {
    for (std::size_t i = 0; i < kTimeSchemeNames.size(); ++i) {
        if (kTimeSchemeNames[i] == name) return static_cast<TimeScheme>(i);
    }
    std::string valid;
    for (auto n : kTimeSchemeNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw UsageError("unknown time scheme '" + std::string(name) + "' (valid: " + valid + ")");
}

inline bool needs_history(TimeScheme s) { return s == TimeScheme::bdf2 || s == TimeScheme::leapfrog; }

inline bool is_implicit(TimeScheme s) { return s != TimeScheme::fe && s != TimeScheme::leapfrog; }

struct TimeState {
    FieldArray fields;
    double t = 0.0;
    std::size_t step_index = 0;
    std::optional<FieldArray> history;  ///< previous level for two-level schemes
};

/// Solver bookkeeping reported by a step.
struct StepStats {
    std::size_t newton_iterations = 0;
    std::size_t backtracks = 0;
    double residual_norm = 0.0;
};

enum class IntermediateKind { closed_form, quadrature };

inline constexpr std::size_t kDefaultIntermediateOrder = 16;

/// Closed-form entropy-conservative intermediate state between two time levels:
///   v3 = -rho_mean / p_ln,  v2 = -u_mean v3,
///   v1 = (gamma rho_mean / rho_ln - S_mean)/(gamma-1) - u_mean v2 - mean(u^2) v3 / 2.
/// It satisfies v^T (u^{n+1} - u^n) = U^{n+1} - U^n exactly.
inline EntropyVars ec_intermediate_state(const ConservedState& un, const ConservedState& unp1, const GasModel& g) {
    const auto a = cons_to_prim(un, g);
    const auto b = cons_to_prim(unp1, g);
    const double rho = arith_mean(a.rho, b.rho);
    const double u = arith_mean(a.u, b.u);
    const double u2 = arith_mean(a.u * a.u, b.u * b.u);
    const double S = arith_mean(specific_entropy(a, g), specific_entropy(b, g));
    const double rho_ln = log_mean(a.rho, b.rho);
    const double p_ln = log_mean(a.p, b.p);

    const double v3 = -rho / p_ln;
    const double v2 = -u * v3;
    const double v1 = (g.gamma() * rho / rho_ln - S) / g.gm1() - u * v2 - 0.5 * u2 * v3;
    return {v1, v2, v3};
}

/// v^T (u^{n+1} - u^n) - (U^{n+1} - U^n); zero for an entropy-conservative intermediate state.
inline double tiec_residual(const ConservedState& un, const ConservedState& unp1, const EntropyVars& v,
                            const GasModel& g) {
    return dot(v, unp1 - un) - (math_entropy(unp1, g) - math_entropy(un, g));
}

/// Round-off scale of tiec_residual: the size of the terms that cancel in it.
inline double tiec_residual_scale(const ConservedState& un, const ConservedState& unp1, const EntropyVars& v,
                                  const GasModel& g) {
    double terms = 0.0;
    for (std::size_t i = 0; i < 3; ++i) terms += std::abs(v[i]) * std::max(std::abs(un[i]), std::abs(unp1[i]));
    return std::max({1.0, std::abs(math_entropy(un, g)), std::abs(math_entropy(unp1, g)), terms});
}

/// Gauss-Legendre average of map(u) over the straight conserved-state segment
/// from un to unp1. For a symmetric system (map = identity) this is the
/// arithmetic mean of the two levels.
template <class Map>
auto straight_path_average(const ConservedState& un, const ConservedState& unp1, Map&& map,
                           std::size_t order = kDefaultIntermediateOrder) {
    const auto mid = 0.5 * (un + unp1);
    const auto du = unp1 - un;
    return integrate([&](double xi) { return map(mid + xi * du); }, -0.5, 0.5, order);
}

/// Straight-path average of v over the conserved-state segment between two levels.
inline EntropyVars lefloch_intermediate_state(const ConservedState& un, const ConservedState& unp1,
                                              const GasModel& g, std::size_t order = kDefaultIntermediateOrder) {
    return straight_path_average(
        un, unp1,
        [&](const ConservedState& c) {
            try {
                return entropy_variables(c, g);
            } catch (const InvalidStateError& e) {
                throw PathInvalidError(std::string("intermediate-state path leaves the admissible set: ") + e.what());
            }
        },
        order);
}

inline EntropyVars intermediate_state(IntermediateKind kind, const ConservedState& un, const ConservedState& unp1,
                                      const GasModel& g, std::size_t order = kDefaultIntermediateOrder) {
    return kind == IntermediateKind::closed_form ? ec_intermediate_state(un, unp1, g)
                                                 : lefloch_intermediate_state(un, unp1, g, order);
}

/// Cellwise u(v^{n+1/2}).
inline FieldArray intermediate_field(const FieldArray& un, const FieldArray& unp1, const GasModel& g,
                                     IntermediateKind kind, std::size_t order = kDefaultIntermediateOrder) {
    if (un.size() != unp1.size()) throw UsageError("intermediate field: level sizes differ");
    FieldArray out(un.size());
    for (std::size_t j = 0; j < un.size(); ++j) {
        out[j] = entropy_vars_to_cons(intermediate_state(kind, un[j], unp1[j], g, order), g);
    }
    return out;
}

namespace detail {

inline Vector flatten(const FieldArray& f) {
    Vector x(static_cast<Eigen::Index>(3 * f.size()));
    for (std::size_t j = 0; j < f.size(); ++j) {
        x[3 * j] = f[j].rho;
        x[3 * j + 1] = f[j].mom;
        x[3 * j + 2] = f[j].ene;
    }
    return x;
}

inline FieldArray unflatten(const Vector& x) {
    FieldArray f(static_cast<std::size_t>(x.size()) / 3);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = {x[3 * j], x[3 * j + 1], x[3 * j + 2]};
    return f;
}

inline void check_admissible(const FieldArray& f, const GasModel& g, std::size_t step, const char* scheme) {
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (!is_admissible(f[j], g)) {
            throw BlowUpError(std::string(scheme) + " produced an inadmissible state in cell " + std::to_string(j) +
                                  " at step " + std::to_string(step),
                              step, j);
        }
    }
}

/// Solves `residual(u) = 0` with Newton from `guess`, using the block-tridiagonal FD Jacobian.
template <class Residual>
FieldArray implicit_solve(Residual&& residual, const FieldArray& guess, BoundaryKind bc, const NewtonConfig& cfg,
                          StepStats* stats) {
    const ResidualFn F = [&](const Vector& x) { return residual(unflatten(x)); };
    const JacobianFn J = [&](const Vector& x, const Vector& r0) {
        return fd_jacobian_block_tridiagonal(F, x, r0, guess.size(), 3, bc == BoundaryKind::periodic);
    };
    const auto res = newton_solve(F, flatten(guess), cfg, J);
    if (stats) *stats = {res.iterations, res.backtracks, res.residual_norm};
    return unflatten(res.x);
}

inline void check_dt(double dt) {
    if (!(dt >= 0) || !std::isfinite(dt)) throw UsageError("time step must be finite and non-negative");
}

}  // namespace detail

template <InterfaceFlux Flux>
TimeState step_fe(const TimeState& s, double dt, const SpatialScheme<Flux>& scheme, const GasModel& g,
                  StepStats* stats = nullptr) {
    detail::check_dt(dt);
    const auto rate = scheme.rhs(s.fields);
    TimeState out{s.fields, s.t + dt, s.step_index + 1, std::nullopt};
    for (std::size_t j = 0; j < out.fields.size(); ++j) out.fields[j] = out.fields[j] + dt * rate[j];
    detail::check_admissible(out.fields, g, out.step_index, "forward Euler");
    if (stats) *stats = {};
    return out;
}

/// Residual u - u^n - dt R(u) of backward Euler, flattened.
template <InterfaceFlux Flux>
Vector be_residual(const FieldArray& u, const FieldArray& un, double dt, const SpatialScheme<Flux>& scheme) {
    const auto rate = scheme.rhs(u);
    Vector r(static_cast<Eigen::Index>(3 * u.size()));
    for (std::size_t j = 0; j < u.size(); ++j) {
        for (std::size_t k = 0; k < 3; ++k) r[3 * j + k] = u[j][k] - un[j][k] - dt * rate[j][k];
    }
    return r;
}

template <InterfaceFlux Flux>
TimeState step_be(const TimeState& s, double dt, const SpatialScheme<Flux>& scheme, const GasModel& g,
                  const NewtonConfig& cfg = {}, StepStats* stats = nullptr) {
    detail::check_dt(dt);
    auto residual = [&](const FieldArray& u) { return be_residual(u, s.fields, dt, scheme); };
    auto next = detail::implicit_solve(residual, s.fields, scheme.bc, cfg, stats);
    detail::check_admissible(next, g, s.step_index + 1, "backward Euler");
    return {std::move(next), s.t + dt, s.step_index + 1, std::nullopt};
}

/// Residual u - (4/3)u^{n+1} + (1/3)u^n - (2/3) dt R(u).
template <InterfaceFlux Flux>
Vector bdf2_residual(const FieldArray& u, const FieldArray& unp1, const FieldArray& un, double dt,
                     const SpatialScheme<Flux>& scheme) {
    const auto rate = scheme.rhs(u);
    Vector r(static_cast<Eigen::Index>(3 * u.size()));
    for (std::size_t j = 0; j < u.size(); ++j) {
        for (std::size_t k = 0; k < 3; ++k) {
            r[3 * j + k] = u[j][k] - (4.0 / 3.0) * unp1[j][k] + (1.0 / 3.0) * un[j][k] - (2.0 / 3.0) * dt * rate[j][k];
        }
    }
    return r;
}

/// s.fields holds u^{n+1}, s.history holds u^n.
template <InterfaceFlux Flux>
TimeState step_bdf2(const TimeState& s, double dt, const SpatialScheme<Flux>& scheme, const GasModel& g,
                    const NewtonConfig& cfg = {}, StepStats* stats = nullptr) {
    detail::check_dt(dt);
    if (!s.history) throw UsageError("BDF2 needs a previous time level; take a startup step first");
    const auto& un = *s.history;
    auto residual = [&](const FieldArray& u) { return bdf2_residual(u, s.fields, un, dt, scheme); };
    auto next = detail::implicit_solve(residual, s.fields, scheme.bc, cfg, stats);
    detail::check_admissible(next, g, s.step_index + 1, "BDF2");
    return {std::move(next), s.t + dt, s.step_index + 1, s.fields};
}

/// u^{n+1} = u^{n-1} + 2 dt R(u^n); s.history holds u^{n-1}.
template <InterfaceFlux Flux>
TimeState step_leapfrog(const TimeState& s, double dt, const SpatialScheme<Flux>& scheme, const GasModel& g,
                        StepStats* stats = nullptr) {
    detail::check_dt(dt);
    if (!s.history) throw UsageError("leap-frog needs a previous time level; take a startup step first");
    const auto rate = scheme.rhs(s.fields);
    FieldArray next = *s.history;
    for (std::size_t j = 0; j < next.size(); ++j) next[j] = next[j] + (2.0 * dt) * rate[j];
    detail::check_admissible(next, g, s.step_index + 1, "leap-frog");
    if (stats) *stats = {};
    return {std::move(next), s.t + dt, s.step_index + 1, s.fields};
}

/// Residual u - u^n - dt R(u(v^{n+1/2}(u^n, u))).
template <InterfaceFlux Flux>
Vector ec_residual(const FieldArray& u, const FieldArray& un, double dt, const SpatialScheme<Flux>& scheme,
                   const GasModel& g, IntermediateKind kind, std::size_t order) {
    const auto rate = scheme.rhs(intermediate_field(un, u, g, kind, order));
    Vector r(static_cast<Eigen::Index>(3 * u.size()));
    for (std::size_t j = 0; j < u.size(); ++j) {
        for (std::size_t k = 0; k < 3; ++k) r[3 * j + k] = u[j][k] - un[j][k] - dt * rate[j][k];
    }
    return r;
}

template <InterfaceFlux Flux>
TimeState step_ec(const TimeState& s, double dt, const SpatialScheme<Flux>& scheme, const GasModel& g,
                  IntermediateKind kind = IntermediateKind::closed_form, const NewtonConfig& cfg = {},
                  std::size_t order = kDefaultIntermediateOrder, StepStats* stats = nullptr) {
    detail::check_dt(dt);
    auto residual = [&](const FieldArray& u) { return ec_residual(u, s.fields, dt, scheme, g, kind, order); };
    auto next = detail::implicit_solve(residual, s.fields, scheme.bc, cfg, stats);
    detail::check_admissible(next, g, s.step_index + 1, "entropy-conservative scheme");
    return {std::move(next), s.t + dt, s.step_index + 1, std::nullopt};
}

struct IntegratorOptions {
    NewtonConfig newton{};
    std::size_t quadrature_order = kDefaultIntermediateOrder;  ///< for ec-quadrature
};

/// Advances one step with `scheme`. Two-level schemes without history start
/// with one closed-form EC step; `startup` reports whether that happened.
template <InterfaceFlux Flux>
TimeState advance(const TimeState& s, double dt, TimeScheme ts, const SpatialScheme<Flux>& space, const GasModel& g,
                  const IntegratorOptions& opt = {}, StepStats* stats = nullptr, bool* startup = nullptr) {
    if (startup) *startup = false;
    if (needs_history(ts) && !s.history) {
        if (startup) *startup = true;
        auto next = step_ec(s, dt, space, g, IntermediateKind::closed_form, opt.newton, opt.quadrature_order, stats);
        next.history = s.fields;
        return next;
    }
    switch (ts) {
        case TimeScheme::fe: return step_fe(s, dt, space, g, stats);
        case TimeScheme::be: return step_be(s, dt, space, g, opt.newton, stats);
        case TimeScheme::bdf2: return step_bdf2(s, dt, space, g, opt.newton, stats);
        case TimeScheme::leapfrog: return step_leapfrog(s, dt, space, g, stats);
        case TimeScheme::ec:
            return step_ec(s, dt, space, g, IntermediateKind::closed_form, opt.newton, opt.quadrature_order, stats);
        case TimeScheme::ec_quadrature:
            return step_ec(s, dt, space, g, IntermediateKind::quadrature, opt.newton, opt.quadrature_order, stats);
    }
    throw UsageError("unknown time scheme");
}

}  // namespace ecfv
