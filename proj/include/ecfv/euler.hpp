#pragma once

/// Ideal-gas Euler algebra in 1D with the entropy pair
///   U = -rho*S/(gamma-1),  F = -rho*u*S/(gamma-1),  S = ln p - gamma ln rho.
/// Everything here is a pure function of its value arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>

#include "ecfv/errors.hpp"

namespace ecfv {

/// Three-component value types share elementwise arithmetic through this concept.
template <class T>
concept Triple = requires(const T& t, std::size_t i) {
    { t[i] } -> std::convertible_to<double>;
    { T::from_array(std::array<double, 3>{}) } -> std::same_as<T>;
};

struct ConservedState {
    double rho = 1.0;
    double mom = 0.0;
    double ene = 1.0;

    constexpr double operator[](std::size_t i) const { return i == 0 ? rho : (i == 1 ? mom : ene); }
    static constexpr ConservedState from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
    bool operator==(const ConservedState&) const = default;
};

struct PrimitiveState {
    double rho = 1.0;
    double u = 0.0;
    double p = 1.0;
};

struct EntropyVars {
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = -1.0;

    constexpr double operator[](std::size_t i) const { return i == 0 ? v1 : (i == 1 ? v2 : v3); }
    static constexpr EntropyVars from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
};

struct FluxVector {
    double f1 = 0.0;  ///< mass
    double f2 = 0.0;  ///< momentum
    double f3 = 0.0;  ///< energy

    constexpr double operator[](std::size_t i) const { return i == 0 ? f1 : (i == 1 ? f2 : f3); }
    static constexpr FluxVector from_array(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
};

template <Triple T>
constexpr std::array<double, 3> to_array(const T& t) {
    return {t[0], t[1], t[2]};
}

template <Triple T>
constexpr T operator+(const T& a, const T& b) {
    return T::from_array({a[0] + b[0], a[1] + b[1], a[2] + b[2]});
}

template <Triple T>
constexpr T operator-(const T& a, const T& b) {
    return T::from_array({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
}

template <Triple T>
constexpr T operator-(const T& a) {
    return T::from_array({-a[0], -a[1], -a[2]});
}

template <Triple T>
constexpr T operator*(double s, const T& a) {
    return T::from_array({s * a[0], s * a[1], s * a[2]});
}

template <Triple T>
constexpr T operator*(const T& a, double s) {
    return s * a;
}

template <Triple A, Triple B>
constexpr double dot(const A& a, const B& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <Triple T>
double max_abs(const T& a) {
    return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

class GasModel {
public:
    explicit GasModel(double gamma = 1.4) : gamma_(gamma) {
        if (!(gamma > 1.0)) {
            throw UsageError("gamma must be > 1, got " + std::to_string(gamma));
        }
    }

    double gamma() const noexcept { return gamma_; }
    double gm1() const noexcept { return gamma_ - 1.0; }

private:
    double gamma_;
};

/// Symmetric 3x3 matrix stored by its upper triangle.
struct SymMatrix3 {
    double a00 = 0, a01 = 0, a02 = 0, a11 = 0, a12 = 0, a22 = 0;

    double operator()(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        if (i == 0) return j == 0 ? a00 : (j == 1 ? a01 : a02);
        if (i == 1) return j == 1 ? a11 : a12;
        return a22;
    }

    template <Triple T>
    std::array<double, 3> apply(const T& x) const {
        return {a00 * x[0] + a01 * x[1] + a02 * x[2],
                a01 * x[0] + a11 * x[1] + a12 * x[2],
                a02 * x[0] + a12 * x[1] + a22 * x[2]};
    }

    template <Triple T>
    double quadratic_form(const T& x) const {
        const auto y = apply(x);
        return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    }

    /// True when an LDL^T/Cholesky factorization completes with positive pivots.
    bool is_positive_definite() const {
        const double d0 = a00;
        if (!(d0 > 0)) return false;
        const double l10 = a01 / d0;
        const double l20 = a02 / d0;
        const double d1 = a11 - l10 * a01;
        if (!(d1 > 0)) return false;
        const double l21 = (a12 - l20 * a01) / d1;
        const double d2 = a22 - l20 * a02 - l21 * l21 * d1;
        return d2 > 0;
    }
};

namespace detail {

inline std::string describe(const char* what, double value) {
    std::ostringstream os;
    os.precision(17);
    os << what << " (" << value << ")";
    return os.str();
}

}  // namespace detail

inline void check_primitive(const PrimitiveState& w) {
    if (!(w.rho > 0)) throw InvalidStateError(detail::describe("non-positive density", w.rho), w.rho);
    if (!(w.p > 0)) throw InvalidStateError(detail::describe("non-positive pressure", w.p), w.p);
}

inline PrimitiveState cons_to_prim(const ConservedState& c, const GasModel& g) {
    if (!(c.rho > 0)) throw InvalidStateError(detail::describe("non-positive density", c.rho), c.rho);
    const double u = c.mom / c.rho;
    const double p = g.gm1() * (c.ene - 0.5 * c.mom * u);
    if (!(p > 0)) throw InvalidStateError(detail::describe("non-positive pressure", p), p);
    return {c.rho, u, p};
}

inline ConservedState prim_to_cons(const PrimitiveState& w, const GasModel& g) {
    check_primitive(w);
    return {w.rho, w.rho * w.u, w.p / g.gm1() + 0.5 * w.rho * w.u * w.u};
}

/// Does not throw; used where a boolean admissibility answer is wanted.
inline bool is_admissible(const ConservedState& c, const GasModel& g) {
    if (!(c.rho > 0) || !std::isfinite(c.mom) || !std::isfinite(c.ene)) return false;
    const double p = g.gm1() * (c.ene - 0.5 * c.mom * c.mom / c.rho);
    return p > 0 && std::isfinite(p);
}

inline double sound_speed(const PrimitiveState& w, const GasModel& g) {
    return std::sqrt(g.gamma() * w.p / w.rho);
}

inline FluxVector exact_flux(const PrimitiveState& w, const GasModel& g) {
    const double ene = w.p / g.gm1() + 0.5 * w.rho * w.u * w.u;
    return {w.rho * w.u, w.rho * w.u * w.u + w.p, w.u * (ene + w.p)};
}

inline FluxVector exact_flux(const ConservedState& c, const GasModel& g) {
    return exact_flux(cons_to_prim(c, g), g);
}

inline double specific_entropy(const PrimitiveState& w, const GasModel& g) {
    check_primitive(w);
    return std::log(w.p) - g.gamma() * std::log(w.rho);
}

struct EntropyPair {
    double U = 0.0;
    double F = 0.0;
};

inline EntropyPair math_entropy_pair(const ConservedState& c, const GasModel& g) {
    const auto w = cons_to_prim(c, g);
    const double U = -w.rho * specific_entropy(w, g) / g.gm1();
    return {U, w.u * U};
}

inline double math_entropy(const ConservedState& c, const GasModel& g) {
    return math_entropy_pair(c, g).U;
}

inline EntropyVars entropy_variables(const PrimitiveState& w, const GasModel& g) {
    const double S = specific_entropy(w, g);
    const double beta = w.rho / w.p;
    return {(g.gamma() - S) / g.gm1() - 0.5 * beta * w.u * w.u, beta * w.u, -beta};
}

inline EntropyVars entropy_variables(const ConservedState& c, const GasModel& g) {
    return entropy_variables(cons_to_prim(c, g), g);
}

/// Closed-form inverse of entropy_variables.
inline PrimitiveState entropy_vars_to_prim(const EntropyVars& v, const GasModel& g) {
    if (!(v.v3 < 0)) {
        throw InvalidStateError(detail::describe("entropy variable v3 must be negative", v.v3), v.v3);
    }
    const double gamma = g.gamma();
    const double beta = -v.v3;  // rho/p
    const double u = v.v2 / beta;
    const double S = gamma - g.gm1() * (v.v1 + 0.5 * v.v2 * u);
    const double log_p = (S + gamma * std::log(beta)) / (1.0 - gamma);
    const double p = std::exp(log_p);
    const double rho = beta * p;
    if (!(rho > 0) || !(p > 0) || !std::isfinite(rho) || !std::isfinite(p)) {
        throw InvalidStateError(detail::describe("entropy variables map to an inadmissible state, p", p), p);
    }
    return {rho, u, p};
}

inline ConservedState entropy_vars_to_cons(const EntropyVars& v, const GasModel& g) {
    return prim_to_cons(entropy_vars_to_prim(v, g), g);
}

struct Potentials {
    double phi = 0.0;
    double psi = 0.0;
};

inline Potentials potentials(const ConservedState& c, const GasModel& g) {
    cons_to_prim(c, g);
    return {c.rho, c.mom};
}

/// psi = rho*u; shorthand used by the EC condition.
inline double flux_potential(const ConservedState& c) { return c.mom; }

/// H = du/dv.
inline SymMatrix3 temporal_jacobian(const PrimitiveState& w, const GasModel& g) {
    check_primitive(w);
    const double ene = w.p / g.gm1() + 0.5 * w.rho * w.u * w.u;  // rho*E
    const double h = (ene + w.p) / w.rho;                        // total enthalpy
    const double a2 = g.gamma() * w.p / w.rho;
    SymMatrix3 H;
    H.a00 = w.rho;
    H.a01 = w.rho * w.u;
    H.a02 = ene;
    H.a11 = w.rho * w.u * w.u + w.p;
    H.a12 = w.rho * h * w.u;
    H.a22 = w.rho * h * h - a2 * w.p / g.gm1();
    return H;
}

inline SymMatrix3 temporal_jacobian(const ConservedState& c, const GasModel& g) {
    return temporal_jacobian(cons_to_prim(c, g), g);
}

}  // namespace ecfv
