#pragma once

/// Uniform 1D mesh, cell fields, ghost cells, Riemann initial data and the
/// first-order finite-volume operator  du_j/dt = -(f_{j+1/2} - f_{j-1/2}) / dx.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include "ecfv/errors.hpp"
#include "ecfv/euler.hpp"
#include "ecfv/fluxes.hpp"

namespace ecfv {

struct Mesh1D {
    double x_min = -0.5;
    double x_max = 0.5;
    std::size_t n_cells = 100;

    double dx() const { return (x_max - x_min) / static_cast<double>(n_cells); }
    double center(std::size_t j) const { return x_min + (static_cast<double>(j) + 0.5) * dx(); }
    double interface(std::size_t k) const { return x_min + static_cast<double>(k) * dx(); }
    double midpoint() const { return 0.5 * (x_min + x_max); }
};

inline Mesh1D build_mesh(double x_min, double x_max, std::size_t n_cells) {
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        throw UsageError("mesh bounds must satisfy xmin < xmax");
    }
    if (n_cells < 2) throw UsageError("mesh needs at least 2 cells");
    return {x_min, x_max, n_cells};
}

/// Interior cell averages, left to right.
using FieldArray = std::vector<ConservedState>;

enum class BoundaryKind { transmissive, periodic };

inline std::string_view to_string(BoundaryKind b) { return b == BoundaryKind::periodic ? "periodic" : "transmissive"; }

/// Returns the field with one ghost cell on each side (size n + 2).
inline FieldArray apply_boundary(const FieldArray& fields, BoundaryKind bc) {
    if (fields.empty()) throw UsageError("boundary conditions need at least one interior cell");
    FieldArray ext;
    ext.reserve(fields.size() + 2);
    ext.push_back(bc == BoundaryKind::periodic ? fields.back() : fields.front());
    ext.insert(ext.end(), fields.begin(), fields.end());
    ext.push_back(bc == BoundaryKind::periodic ? fields.front() : fields.back());
    return ext;
}

/// Zero-gradient ghosts.
inline FieldArray apply_transmissive_bc(const FieldArray& fields) {
    return apply_boundary(fields, BoundaryKind::transmissive);
}

template <class F>
concept InterfaceFlux = requires(const F& f, const ConservedState& s) {
    { f(s, s) } -> std::convertible_to<FluxVector>;
};

/// Mesh, boundary treatment and interface flux of a semi-discretization.
template <InterfaceFlux Flux>
struct SpatialScheme {
    Mesh1D mesh;
    BoundaryKind bc = BoundaryKind::transmissive;
    Flux flux;

    /// n + 1 fluxes; entry k sits at interface x_min + k dx.
    std::vector<FluxVector> interface_fluxes(const FieldArray& fields) const {
        const auto ext = apply_boundary(fields, bc);
        std::vector<FluxVector> out(fields.size() + 1);
        for (std::size_t k = 0; k < out.size(); ++k) {
            try {
                out[k] = flux(ext[k], ext[k + 1]);
            } catch (const InvalidStateError& e) {
                throw InvalidStateError("interface " + std::to_string(k) + ": " + e.what(), e.value());
            }
        }
        return out;
    }

    /// Per-cell rates -(f_{j+1/2} - f_{j-1/2}) / dx.
    std::vector<ConservedState> rhs(const FieldArray& fields) const {
        const auto f = interface_fluxes(fields);
        const double inv_dx = 1.0 / mesh.dx();
        std::vector<ConservedState> rate(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            rate[j] = ConservedState::from_array({-(f[j + 1].f1 - f[j].f1) * inv_dx, -(f[j + 1].f2 - f[j].f2) * inv_dx,
                                                  -(f[j + 1].f3 - f[j].f3) * inv_dx});
        }
        return rate;
    }
};

template <InterfaceFlux Flux>
SpatialScheme(Mesh1D, BoundaryKind, Flux) -> SpatialScheme<Flux>;

template <InterfaceFlux Flux>
std::vector<ConservedState> semidiscrete_rhs(const FieldArray& fields, const Flux& flux, const Mesh1D& mesh,
                                             BoundaryKind bc) {
    return SpatialScheme<Flux>{mesh, bc, flux}.rhs(fields);
}

/// Left state on cells whose center is left of the midpoint, right state elsewhere.
inline FieldArray init_riemann(const Mesh1D& mesh, const PrimitiveState& left, const PrimitiveState& right,
                               const GasModel& g) {
    ConservedState cl, cr;
    try {
        cl = prim_to_cons(left, g);
        cr = prim_to_cons(right, g);
    } catch (const InvalidStateError& e) {
        throw UsageError(std::string("invalid Riemann data: ") + e.what());
    }
    FieldArray fields(mesh.n_cells);
    for (std::size_t j = 0; j < mesh.n_cells; ++j) fields[j] = mesh.center(j) < mesh.midpoint() ? cl : cr;
    return fields;
}

/// Symmetric receding data: (rho0, -u0, p0) | (rho0, +u0, p0).
struct RecedingIC {
    double rho0 = 1.0;
    double p0 = 0.4;
    double u0 = 0.5;

    PrimitiveState left() const { return {rho0, -u0, p0}; }
    PrimitiveState right() const { return {rho0, u0, p0}; }
};

inline void validate(const RecedingIC& ic) {
    if (!(ic.rho0 > 0) || !(ic.p0 > 0)) throw UsageError("receding data needs rho0 > 0 and p0 > 0");
    if (!(ic.u0 >= 0)) throw UsageError("receding data needs u0 >= 0");
}

inline FieldArray init_receding(const Mesh1D& mesh, const RecedingIC& ic, const GasModel& g) {
    validate(ic);
    if (mesh.n_cells % 2 != 0) {
        throw UsageError("receding runs need an even cell count so the discontinuity sits on an interface");
    }
    return init_riemann(mesh, ic.left(), ic.right(), g);
}

/// First cell to the right of the central interface.
inline std::size_t center_right_cell(const Mesh1D& mesh) { return mesh.n_cells / 2; }

/// dx * sum_j u_j, componentwise.
inline ConservedState total_conserved(const FieldArray& fields, const Mesh1D& mesh) {
    ConservedState acc{0.0, 0.0, 0.0};
    for (const auto& c : fields) acc = acc + c;
    return mesh.dx() * acc;
}

}  // namespace ecfv
