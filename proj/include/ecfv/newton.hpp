#pragma once

/// Damped Newton iteration with a backtracking line search.
///
/// The step is halved until the residual 2-norm strictly decreases; trial
/// points where the residual cannot be evaluated (inadmissible states) count
/// as failures and are halved as well. Convergence is declared on the
/// infinity norm.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "ecfv/errors.hpp"

namespace ecfv {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using ResidualFn = std::function<Vector(const Vector&)>;
/// Called with the current iterate and its residual.
using JacobianFn = std::function<SparseMatrix(const Vector&, const Vector&)>;

struct NewtonConfig {
    double residual_tol = 1e-12;  ///< infinity norm
    std::size_t max_iters = 50;
    double backtrack = 0.5;
    std::size_t max_halvings = 30;
};

inline void validate(const NewtonConfig& cfg) {
    if (!(cfg.residual_tol > 0)) throw UsageError("newton residual_tol must be positive");
    if (cfg.max_iters < 1) throw UsageError("newton max_iters must be >= 1");
    if (!(cfg.backtrack > 0 && cfg.backtrack < 1)) throw UsageError("line-search factor must lie in (0, 1)");
}

struct NewtonResult {
    Vector x;
    std::size_t iterations = 0;
    std::size_t backtracks = 0;
    double residual_norm = 0.0;
    std::vector<double> history;  ///< infinity norm per iterate
};

/// Forward-difference step used for Jacobian columns.
inline double fd_step(double x) { return std::sqrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::abs(x)); }

namespace detail {

/// Evaluates F at x + h e_(cols); if that throws, retries with -h.
template <class Perturb>
Vector perturbed_residual(const ResidualFn& F, const Vector& x, Perturb&& perturb, double& sign) {
    Vector xp = x;
    sign = 1.0;
    perturb(xp, sign);
    try {
        return F(xp);
    } catch (const InvalidStateError&) {
        xp = x;
        sign = -1.0;
        perturb(xp, sign);
        return F(xp);
    }
}

}  // namespace detail

/// Dense forward-difference Jacobian, one residual evaluation per column.
inline SparseMatrix fd_jacobian_dense(const ResidualFn& F, const Vector& x, const Vector& r0) {
    const auto n = x.size();
    std::vector<Eigen::Triplet<double>> entries;
    for (Eigen::Index col = 0; col < n; ++col) {
        double sign = 1.0;
        const double h = fd_step(x[col]);
        const Vector r = detail::perturbed_residual(F, x, [&](Vector& xp, double s) { xp[col] += s * h; }, sign);
        for (Eigen::Index row = 0; row < r0.size(); ++row) {
            const double d = (r[row] - r0[row]) / (sign * h);
            if (d != 0.0) entries.emplace_back(row, col, d);
        }
    }
    SparseMatrix J(r0.size(), n);
    J.setFromTriplets(entries.begin(), entries.end());
    return J;
}

/// Forward-difference Jacobian of a residual whose block j (size `block`)
/// depends only on blocks j-1, j, j+1 (cyclically when `periodic`).
///
/// Blocks are grouped into colors at least three apart, so one residual
/// evaluation recovers a whole column of every block in a color.
inline SparseMatrix fd_jacobian_block_tridiagonal(const ResidualFn& F, const Vector& x, const Vector& r0,
                                                  std::size_t n_blocks, std::size_t block, bool periodic) {
    if (static_cast<std::size_t>(x.size()) != n_blocks * block) {
        throw UsageError("block Jacobian: vector size does not match block layout");
    }
    // Colors j % 3 on a prefix that is a multiple of 3; remaining blocks get their own color.
    const std::size_t base = periodic ? n_blocks - n_blocks % 3 : n_blocks;
    const std::size_t cyclic = base > 0 ? 3 : 0;
    const std::size_t n_colors = cyclic + (n_blocks - base);
    auto color_of = [&](std::size_t j) { return j < base ? j % 3 : cyclic + (j - base); };

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(n_blocks * block * block * 3);
    std::vector<std::size_t> members;
    for (std::size_t color = 0; color < n_colors; ++color) {
        members.clear();
        for (std::size_t j = 0; j < n_blocks; ++j) {
            if (color_of(j) == color) members.push_back(j);
        }
        if (members.empty()) continue;
        for (std::size_t k = 0; k < block; ++k) {
            double sign = 1.0;
            const Vector r = detail::perturbed_residual(
                F, x,
                [&](Vector& xp, double s) {
                    for (auto j : members) {
                        const auto idx = static_cast<Eigen::Index>(j * block + k);
                        xp[idx] += s * fd_step(x[idx]);
                    }
                },
                sign);
            for (auto j : members) {
                const auto col = static_cast<Eigen::Index>(j * block + k);
                const double h = sign * fd_step(x[col]);
                for (int offset = -1; offset <= 1; ++offset) {
                    long rb = static_cast<long>(j) + offset;
                    if (periodic) {
                        rb = (rb + static_cast<long>(n_blocks)) % static_cast<long>(n_blocks);
                    } else if (rb < 0 || rb >= static_cast<long>(n_blocks)) {
                        continue;
                    }
                    if (n_blocks < 3 && offset != 0 && rb == static_cast<long>(j)) continue;
                    for (std::size_t i = 0; i < block; ++i) {
                        const auto row = static_cast<Eigen::Index>(static_cast<std::size_t>(rb) * block + i);
                        entries.emplace_back(row, col, (r[row] - r0[row]) / h);
                    }
                }
            }
        }
    }
    SparseMatrix J(x.size(), x.size());
    // Duplicates (only possible for tiny periodic meshes) are summed; drop them instead.
    J.setFromTriplets(entries.begin(), entries.end(), [](double a, double) { return a; });
    return J;
}

inline NewtonResult newton_solve(const ResidualFn& F, const Vector& guess, const NewtonConfig& cfg,
                                 const JacobianFn& jacobian = {}) {
    validate(cfg);
    NewtonResult res;
    res.x = guess;
    Vector r = F(res.x);
    double norm_inf = r.lpNorm<Eigen::Infinity>();
    res.history.push_back(norm_inf);

    auto history_text = [&] {
        std::ostringstream os;
        os.precision(3);
        for (std::size_t i = 0; i < res.history.size(); ++i) os << (i ? ", " : "") << res.history[i];
        return os.str();
    };

    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    for (std::size_t it = 0;; ++it) {
        if (!std::isfinite(norm_inf)) {
            throw SolverError("Newton residual is not finite", norm_inf);
        }
        if (norm_inf <= cfg.residual_tol) {
            res.residual_norm = norm_inf;
            res.iterations = it;
            return res;
        }
        if (it == cfg.max_iters) {
            throw SolverError("Newton did not converge in " + std::to_string(cfg.max_iters) +
                                  " iterations; residual history: " + history_text(),
                              norm_inf);
        }

        SparseMatrix J = jacobian ? jacobian(res.x, r) : fd_jacobian_dense(F, res.x, r);
        J.makeCompressed();
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw SolverError("Newton linear solve failed: singular Jacobian", norm_inf);
        const Vector dx = lu.solve(-r);
        if (lu.info() != Eigen::Success || !dx.allFinite()) {
            throw SolverError("Newton linear solve failed", norm_inf);
        }

        const double norm2 = r.norm();
        double step = 1.0;
        bool accepted = false;
        for (std::size_t h = 0; h <= cfg.max_halvings; ++h) {
            const Vector trial = res.x + step * dx;
            try {
                Vector rt = F(trial);
                if (rt.allFinite() && rt.norm() < norm2) {
                    res.x = trial;
                    r = std::move(rt);
                    accepted = true;
                    break;
                }
            } catch (const InvalidStateError&) {
            }
            step *= cfg.backtrack;
            ++res.backtracks;
        }
        if (!accepted) {
            throw SolverError("Newton line search stagnated; residual history: " + history_text(), norm_inf);
        }
        norm_inf = r.lpNorm<Eigen::Infinity>();
        res.history.push_back(norm_inf);
    }
}

}  // namespace ecfv
