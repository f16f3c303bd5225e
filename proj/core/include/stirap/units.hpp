#pragma once

#include <numbers>

namespace stirap {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Frequencies are carried in cyclic MHz and times in ns throughout the
// library. Dynamical equations work in rad/ns.
constexpr double angular(double cyclic_mhz) { return kTwoPi * 1e-3 * cyclic_mhz; }

constexpr double to_radians(double degrees) { return degrees * kPi / 180.0; }
constexpr double to_degrees(double radians) { return radians * 180.0 / kPi; }

/// Wraps an angle in degrees into (-180, 180].
double wrap_degrees(double degrees);

}  // namespace stirap
