#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include "ecfv/errors.hpp"

namespace ecfv {

struct QuadratureRule {
    std::vector<double> nodes;    ///< on [-1, 1], ascending
    std::vector<double> weights;  ///< sum to 2
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // One more derivative evaluation at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace detail

/// Gauss-Legendre rule with n nodes; cached per n and safe to call from several threads.
inline const QuadratureRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw UsageError("quadrature order must be positive");
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

/// Integrates f over [lo, hi].
template <class F>
auto integrate(F&& f, double lo, double hi, std::size_t order) {
    const auto& rule = gauss_legendre(order);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    auto acc = half * rule.weights[0] * f(mid + half * rule.nodes[0]);
    for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
        acc = acc + half * rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return acc;
}

}  // namespace ecfv
