#include <gtest/gtest.h>

#include <cmath>

#include "ecfv/newton.hpp"

using namespace ecfv;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST(NewtonSolve, ScalarQuadratic) {
    const ResidualFn F = [](const Vector& x) { return vec({x[0] * x[0] - 4.0}); };
    const auto res = newton_solve(F, vec({3.0}), {});
    EXPECT_NEAR(res.x[0], 2.0, 1e-12);
    EXPECT_LE(res.residual_norm, 1e-12);
    EXPECT_EQ(res.history.size(), res.iterations + 1);
}

TEST(NewtonSolve, LinearSystemInOneIteration) {
    Eigen::Matrix3d A;
    A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    const Eigen::Vector3d b(1, 2, 3);
    const ResidualFn F = [&](const Vector& x) -> Vector { return A * x - b; };
    const auto res = newton_solve(F, Vector::Zero(3), {1e-10, 50, 0.5, 30});
    EXPECT_EQ(res.iterations, 1u);
    EXPECT_LE((A * res.x - b).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(NewtonSolve, ZeroResidualNeedsNoIteration) {
    const ResidualFn F = [](const Vector& x) { return vec({x[0] - 1.0}); };
    const auto res = newton_solve(F, vec({1.0}), {});
    EXPECT_EQ(res.iterations, 0u);
}

TEST(NewtonSolve, OvershootingResidualBacktracks) {
    // Cell-wise atan residuals: a full Newton step from |x| >~ 1.39 overshoots and diverges.
    const ResidualFn F = [](const Vector& x) -> Vector { return x.array().atan(); };
    const auto res = newton_solve(F, vec({3.0, -2.0, 1.5}), {});
    EXPECT_GE(res.backtracks, 1u);
    EXPECT_LE(res.x.lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(NewtonSolve, ReportsNonConvergenceWithHistory) {
    // No real root: x^2 + 1.
    const ResidualFn F = [](const Vector& x) { return vec({x[0] * x[0] + 1.0}); };
    try {
        newton_solve(F, vec({0.5}), {1e-12, 5, 0.5, 30});
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_GT(e.final_residual(), 0.5);
        EXPECT_NE(std::string(e.what()).find("residual history"), std::string::npos);
    }
}

TEST(NewtonSolve, SingularJacobian) {
    const ResidualFn F = [](const Vector& x) { return vec({x[0] + x[1] - 1.0, 2 * x[0] + 2 * x[1] - 3.0}); };
    EXPECT_THROW(newton_solve(F, vec({0.0, 0.0}), {}), SolverError);
}

TEST(NewtonSolve, InvalidConfig) {
    const ResidualFn F = [](const Vector& x) { return x; };
    EXPECT_THROW(newton_solve(F, vec({1.0}), {0.0, 50, 0.5, 30}), UsageError);
    EXPECT_THROW(newton_solve(F, vec({1.0}), {1e-12, 0, 0.5, 30}), UsageError);
}

TEST(FdJacobian, BlockTridiagonalMatchesDense) {
    // Residual with nearest-neighbour coupling, periodic and not.
    for (bool periodic : {false, true}) {
        for (std::size_t n : {2u, 3u, 4u, 7u, 9u}) {
            const ResidualFn F = [&](const Vector& x) {
                Vector r(x.size());
                const auto nb = static_cast<long>(n);
                for (long j = 0; j < nb; ++j) {
                    long jl = j - 1, jr = j + 1;
                    if (periodic) {
                        jl = (jl + nb) % nb;
                        jr = jr % nb;
                    }
                    for (long k = 0; k < 2; ++k) {
                        double acc = std::sin(x[2 * j + k]) * x[2 * j + (1 - k)];
                        if (jl >= 0) acc += 0.3 * x[2 * jl + k] * x[2 * jl];
                        if (jr < nb) acc -= 0.7 * std::exp(0.1 * x[2 * jr + 1 - k]);
                        r[2 * j + k] = acc;
                    }
                }
                return r;
            };
            Vector x(static_cast<Eigen::Index>(2 * n));
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 0.1 * static_cast<double>(i) + 0.3;
            const Vector r0 = F(x);
            const Eigen::MatrixXd dense = Eigen::MatrixXd(fd_jacobian_dense(F, x, r0));
            const Eigen::MatrixXd banded = Eigen::MatrixXd(fd_jacobian_block_tridiagonal(F, x, r0, n, 2, periodic));
            EXPECT_LE((dense - banded).lpNorm<Eigen::Infinity>(), 1e-12) << "n=" << n << " periodic=" << periodic;
        }
    }
}
