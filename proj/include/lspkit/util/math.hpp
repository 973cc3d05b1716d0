#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace lspkit {

inline constexpr double kPi = std::numbers::pi;

/// Small dense vector without heap allocation; every skill state and
/// action fits in it.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

/// Wraps an angle to [-pi, pi].
inline double wrap_angle(double a) {
    if (a >= -kPi && a <= kPi) {
        return a;
    }
    double w = std::remainder(a, 2.0 * kPi);
    if (w < -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

inline double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

} // namespace lspkit
