#pragma once

/// Averages and jumps. The jump is right minus left in space and new minus old
/// in time; the same convention is used everywhere in the library.

#include <cmath>
#include <utility>

#include "ecfv/errors.hpp"

namespace ecfv {

constexpr double arith_mean(double a, double b) { return 0.5 * (a + b); }

constexpr double jump(double a, double b) { return b - a; }

/// Below this |xi| = |a-b|/(a+b) the logarithmic mean uses its series.
inline constexpr double kLogMeanSeriesSwitch = 1e-4;

/// (a-b)/(ln a - ln b), evaluated without cancellation.
///
/// With xi = (a-b)/(a+b) we have ln(a/b) = 2 artanh(xi), so
///   log_mean = (a+b)/2 * xi/artanh(xi) = (a+b) / (2 (1 + xi^2/3 + xi^4/5 + xi^6/7 + ...)).
/// The truncated series is used for small xi and artanh for moderate xi (a-b
/// is exact for nearby floats). Far apart, 1-xi loses digits, so ln(a/b) is
/// used instead.
inline double log_mean(double a, double b) {
    if (!(a > 0) || !(b > 0)) {
        throw InvalidStateError("log_mean requires positive arguments", a > 0 ? b : a);
    }
    if (a < b) std::swap(a, b);  // exact symmetry in the arguments
    const double sum = a + b;
    const double xi = (a - b) / sum;
    if (std::abs(xi) < kLogMeanSeriesSwitch) {
        const double x2 = xi * xi;
        const double series = 1.0 + x2 * (1.0 / 3.0 + x2 * (1.0 / 5.0 + x2 * (1.0 / 7.0)));
        return 0.5 * sum / series;
    }
    if (std::abs(xi) < 0.5) return (a - b) / (2.0 * std::atanh(xi));
    return (a - b) / std::log(a / b);
}

}  // namespace ecfv
