#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <array>
#include <cmath>

#include "ecfv/euler.hpp"
#include "test_support.hpp"

using namespace ecfv;
using ecfv::testing::rel_err;

namespace {

const GasModel kAir{1.4};

using Big = boost::multiprecision::cpp_bin_float_50;

}  // namespace

TEST(ConsToPrim, SubstitutionExamples) {
    const auto a = cons_to_prim({1.0, 0.0, 2.5}, kAir);
    EXPECT_DOUBLE_EQ(a.rho, 1.0);
    EXPECT_DOUBLE_EQ(a.u, 0.0);
    EXPECT_NEAR(a.p, 1.0, 1e-15);

    const auto b = cons_to_prim({1.0, 1.0, 3.0}, kAir);
    EXPECT_DOUBLE_EQ(b.u, 1.0);
    EXPECT_NEAR(b.p, 1.0, 1e-15);
}

TEST(ConsToPrim, RejectsNonPositivePressureAndDensity) {
    try {
        cons_to_prim({1.0, 0.0, -1.0}, kAir);
        FAIL() << "expected InvalidStateError";
    } catch (const InvalidStateError& e) {
        EXPECT_NEAR(e.value(), -0.4, 1e-15);
    }
    EXPECT_THROW(cons_to_prim({0.0, 0.0, 1.0}, kAir), InvalidStateError);
    EXPECT_THROW(cons_to_prim({-1.0, 0.0, 1.0}, kAir), InvalidStateError);
    // Exactly zero pressure is rejected too.
    EXPECT_THROW(cons_to_prim({1.0, 1.0, 0.5}, kAir), InvalidStateError);
}

TEST(PrimToCons, Examples) {
    const auto a = prim_to_cons({1.0, 0.0, 1.0}, kAir);
    EXPECT_NEAR(a.ene, 2.5, 1e-15);
    const auto b = prim_to_cons({1.0, -2.0, 0.4}, kAir);
    EXPECT_DOUBLE_EQ(b.mom, -2.0);
    EXPECT_NEAR(b.ene, 3.0, 1e-15);
    EXPECT_THROW(prim_to_cons({1.0, 0.0, 0.0}, kAir), InvalidStateError);
    EXPECT_THROW(prim_to_cons({0.0, 0.0, 1.0}, kAir), InvalidStateError);
}

TEST(EulerProperties, RoundTripsOnRandomStates) {
    ecfv::testing::StateSampler s{1e-3, 1e3, 1e-3, 1e3, 50.0};
    for (int i = 0; i < 1000; ++i) {
        const auto w = s.primitive();
        const auto c = prim_to_cons(w, kAir);
        EXPECT_LE(rel_err(prim_to_cons(cons_to_prim(c, kAir), kAir), c, 0.0), 1e-14);
        // rho depends on v1 through exp(v1)-like factors, so the stored v1 carries
        // an absolute error eps*|v1| ~ eps*gamma*M^2/2 into the recovered state.
        const auto v = entropy_variables(c, kAir);
        EXPECT_LE(rel_err(entropy_vars_to_cons(v, kAir), c, 0.0), std::max(1e-13, 2e-15 * std::abs(v.v1)))
            << "state " << w.rho << ", " << w.u << ", " << w.p;

        // Primitive -> conserved -> primitive loses p to cancellation at high Mach number;
        // the loss is bounded by the ratio of kinetic to internal energy.
        const auto back = cons_to_prim(c, kAir);
        const double cond = 1.0 + 0.5 * w.rho * w.u * w.u / w.p * kAir.gm1();
        EXPECT_LE(rel_err(back.rho, w.rho, 0.0), 1e-15);
        EXPECT_LE(rel_err(back.p, w.p, 0.0), 4e-16 * cond);
    }
}

TEST(ExactFlux, Examples) {
    const auto f0 = exact_flux(ConservedState{1.0, 0.0, 2.5}, kAir);
    EXPECT_DOUBLE_EQ(f0.f1, 0.0);
    EXPECT_NEAR(f0.f2, 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(f0.f3, 0.0);

    const auto fp = exact_flux(PrimitiveState{1.0, 0.0, 1.0}, kAir);
    EXPECT_DOUBLE_EQ(fp.f1, 0.0);
    EXPECT_DOUBLE_EQ(fp.f2, 1.0);
    EXPECT_DOUBLE_EQ(fp.f3, 0.0);

    const auto f1 = exact_flux(PrimitiveState{1.0, 1.0, 1.0}, kAir);
    EXPECT_DOUBLE_EQ(f1.f1, 1.0);
    EXPECT_DOUBLE_EQ(f1.f2, 2.0);
    EXPECT_NEAR(f1.f3, 4.0, 1e-15);  // u (rho E + p) with rho E = 2.5 + 0.5

    const auto fa = exact_flux(PrimitiveState{0.7, 1.3, 2.1}, kAir);
    const auto fb = exact_flux(PrimitiveState{0.7, -1.3, 2.1}, kAir);
    EXPECT_DOUBLE_EQ(fa.f1, -fb.f1);
    EXPECT_DOUBLE_EQ(fa.f2, fb.f2);
    EXPECT_DOUBLE_EQ(fa.f3, -fb.f3);
}

TEST(SpecificEntropy, Examples) {
    EXPECT_DOUBLE_EQ(specific_entropy({1.0, 3.0, 1.0}, kAir), 0.0);
    EXPECT_NEAR(specific_entropy({1.0, 0.0, 0.4}, kAir), std::log(0.4), 1e-15);
    EXPECT_NEAR(std::log(0.4), -0.916291, 1e-6);
    const double lambda = 3.7;
    const double S0 = specific_entropy({0.8, 0.0, 1.3}, kAir);
    const double S1 = specific_entropy({lambda * 0.8, 0.0, std::pow(lambda, 1.4) * 1.3}, kAir);
    EXPECT_NEAR(S0, S1, 1e-14);
}

TEST(MathEntropyPair, Examples) {
    const auto a = math_entropy_pair({1.0, 0.0, 2.5}, kAir);
    EXPECT_NEAR(a.U, 0.0, 1e-15);
    EXPECT_NEAR(a.F, 0.0, 1e-15);

    const auto b = math_entropy_pair({1.0, -2.0, 3.0}, kAir);
    EXPECT_NEAR(b.U, 2.290727, 1e-6);
    EXPECT_NEAR(b.F, -4.581454, 1e-6);

    ecfv::testing::StateSampler s;
    for (int i = 0; i < 100; ++i) {
        const auto c = s.conserved(kAir);
        const auto e = math_entropy_pair(c, kAir);
        EXPECT_NEAR(e.F, c.mom / c.rho * e.U, 1e-12 * std::max(1.0, std::abs(e.F)));
    }
}

TEST(EntropyVariables, Examples) {
    const auto v = entropy_variables(ConservedState{1.0, 0.0, 2.5}, kAir);
    EXPECT_NEAR(v.v1, 3.5, 1e-14);
    EXPECT_DOUBLE_EQ(v.v2, 0.0);
    EXPECT_NEAR(v.v3, -1.0, 1e-15);

    const auto w = entropy_variables(ConservedState{1.0, -2.0, 3.0}, kAir);
    EXPECT_NEAR(w.v2, -5.0, 1e-13);
    EXPECT_NEAR(w.v3, -2.5, 1e-14);
}

TEST(EntropyVariables, AreTheGradientOfU) {
    // Directional derivatives of U along the tangents dc/dw_k of the primitive
    // coordinates; the three tangents span the state space. Central differences,
    // step 1e-6 times the natural scale of each primitive variable.
    ecfv::testing::StateSampler s{1e-3, 1e3, 1e-3, 1e3, 50.0};
    const double gm1 = kAir.gm1();
    for (int i = 0; i < 1000; ++i) {
        const auto w = s.primitive();
        const auto v = entropy_variables(prim_to_cons(w, kAir), kAir);
        const double a = sound_speed(w, kAir);
        const std::array<std::array<double, 3>, 3> tangent = {{{1.0, w.u, 0.5 * w.u * w.u},
                                                               {0.0, w.rho, w.rho * w.u},
                                                               {0.0, 0.0, 1.0 / gm1}}};
        const std::array<double, 3> scale = {w.rho, std::max(std::abs(w.u), a), w.p};
        for (std::size_t k = 0; k < 3; ++k) {
            const double h = 1e-6 * scale[k];
            auto entropy_at = [&](double sign) {
                std::array<double, 3> x = {w.rho, w.u, w.p};
                x[k] += sign * h;
                const PrimitiveState wk{x[0], x[1], x[2]};
                return -wk.rho * specific_entropy(wk, kAir) / gm1;
            };
            const double fd = (entropy_at(1.0) - entropy_at(-1.0)) / (2 * h);
            double exact = 0.0, mag = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                exact += v[j] * tangent[k][j];
                mag += std::abs(v[j] * tangent[k][j]);
            }
            EXPECT_LE(std::abs(fd - exact) / mag, 1e-6)
                << "direction " << k << " state " << w.rho << "," << w.u << "," << w.p;
        }
    }
}

TEST(EntropyVarsToCons, InverseAndErrors) {
    const auto c = entropy_vars_to_cons({3.5, 0.0, -1.0}, kAir);
    EXPECT_NEAR(c.rho, 1.0, 1e-14);
    EXPECT_NEAR(c.mom, 0.0, 1e-14);
    EXPECT_NEAR(c.ene, 2.5, 1e-14);
    EXPECT_THROW(entropy_vars_to_cons({1.0, 0.0, 0.0}, kAir), InvalidStateError);
    EXPECT_THROW(entropy_vars_to_cons({1.0, 0.0, 0.5}, kAir), InvalidStateError);
}

TEST(Potentials, ValuesAndIdentities) {
    const auto p = potentials({1.0, 0.0, 2.5}, kAir);
    EXPECT_DOUBLE_EQ(p.phi, 1.0);
    EXPECT_DOUBLE_EQ(p.psi, 0.0);

    ecfv::testing::StateSampler s{1e-3, 1e3, 1e-3, 1e3, 50.0};
    for (int i = 0; i < 1000; ++i) {
        const auto c = s.conserved(kAir);
        const auto v = entropy_variables(c, kAir);
        const auto e = math_entropy_pair(c, kAir);
        const auto f = exact_flux(c, kAir);
        const auto pot = potentials(c, kAir);
        // Cancellation scale: the largest term in each sum.
        const double s1 = std::max({std::abs(v.v1 * c.rho), std::abs(v.v2 * c.mom), std::abs(v.v3 * c.ene), std::abs(e.U)});
        const double s2 = std::max({std::abs(v.v1 * f.f1), std::abs(v.v2 * f.f2), std::abs(v.v3 * f.f3), std::abs(e.F)});
        EXPECT_LE(std::abs(dot(v, c) - e.U - pot.phi) / s1, 1e-12);
        EXPECT_LE(std::abs(dot(v, f) - e.F - pot.psi) / std::max(s2, 1e-300), 1e-12);
    }
}

TEST(TemporalJacobian, ExampleValue) {
    const auto H = temporal_jacobian(ConservedState{1.0, 0.0, 2.5}, kAir);
    const double want[3][3] = {{1, 0, 2.5}, {0, 1, 0}, {2.5, 0, 8.75}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(H(i, j), want[i][j], 1e-14) << i << "," << j;
}

namespace {

/// Conserved state from entropy variables in 50-digit arithmetic; an oracle for the inverse map.
std::array<Big, 3> entropy_vars_to_cons_oracle(const std::array<Big, 3>& v, double gamma) {
    using boost::multiprecision::exp;
    using boost::multiprecision::log;
    const Big g(gamma);
    const Big beta = -v[2];
    const Big u = v[1] / beta;
    const Big S = g - (g - 1) * (v[0] + v[1] * u / 2);
    const Big p = exp((S + g * log(beta)) / (1 - g));
    const Big rho = beta * p;
    return {rho, rho * u, p / (g - 1) + rho * u * u / 2};
}

/// Column k of H by central differences of `map` with entropy-variable steps scaled so that
/// rho moves by a relative 1e-6 (d ln rho = dv1 + u dv2 + E dv3).
template <class Map>
void check_jacobian_columns(const PrimitiveState& w, const Map& map, double tol) {
    const auto v = entropy_variables(w, kAir);
    const auto H = temporal_jacobian(w, kAir);
    const double a = sound_speed(w, kAir);
    const double E = w.p / (kAir.gm1() * w.rho) + 0.5 * w.u * w.u;
    const std::array<double, 3> scale = {1.0, 1.0 / (std::abs(w.u) + a), 1.0 / E};
    for (std::size_t k = 0; k < 3; ++k) {
        const double h = 1e-6 * scale[k];
        std::array<double, 3> plus = to_array(v), minus = to_array(v);
        plus[k] += h;
        minus[k] -= h;
        const double step = plus[k] - minus[k];  // the step actually taken after rounding
        const auto cp = map(plus), cm = map(minus);
        double col = 0.0;
        for (std::size_t r = 0; r < 3; ++r) col = std::max(col, std::abs(H(r, k)));
        for (std::size_t r = 0; r < 3; ++r) {
            const double fd = static_cast<double>((cp[r] - cm[r]) / step);
            EXPECT_LE(std::abs(fd - H(r, k)) / col, tol)
                << "entry " << r << "," << k << " state " << w.rho << "," << w.u << "," << w.p;
        }
    }
}

}  // namespace

TEST(TemporalJacobian, MatchesDerivativeOfExactInverseMap) {
    ecfv::testing::StateSampler s{1e-3, 1e3, 1e-3, 1e3, 50.0};
    // Differences are formed in 50-digit arithmetic before rounding.
    auto oracle = [](const std::array<double, 3>& v) {
        return entropy_vars_to_cons_oracle({Big(v[0]), Big(v[1]), Big(v[2])}, kAir.gamma());
    };
    for (int i = 0; i < 1000; ++i) check_jacobian_columns(s.primitive(), oracle, 1e-6);
}

TEST(TemporalJacobian, MatchesDerivativeOfLibraryInverseMap) {
    // In double precision the inverse map loses eps*|v1| ~ eps*M^2 absolutely, so the
    // library map is differenced on the moderate range where that loss stays below 1e-6.
    ecfv::testing::StateSampler s;
    for (int i = 0; i < 1000; ++i) {
        check_jacobian_columns(
            s.primitive(),
            [](const std::array<double, 3>& v) { return to_array(entropy_vars_to_cons(EntropyVars::from_array(v), kAir)); },
            1e-6);
    }
}

TEST(TemporalJacobian, SymmetricPositiveDefinite) {
    ecfv::testing::StateSampler s{1e-3, 1e3, 1e-3, 1e3, 50.0};
    for (int i = 0; i < 1000; ++i) {
        const auto H = temporal_jacobian(s.conserved(kAir), kAir);
        EXPECT_TRUE(H.is_positive_definite());
        EXPECT_EQ(H(0, 2), H(2, 0));
    }
}

TEST(GasModel, RejectsGammaAtMostOne) {
    EXPECT_THROW(GasModel{1.0}, UsageError);
    EXPECT_NO_THROW(GasModel{5.0 / 3.0});
}
