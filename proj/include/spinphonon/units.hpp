#pragma once

#include <numbers>

namespace spinphonon {

// All internal frequencies are angular (rad/s). Hz appears only at I/O.
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduced Planck constant (J s).
inline constexpr double kHbar = 1.054571817e-34;

constexpr double hz_to_angular(double hz) noexcept { return kTwoPi * hz; }
constexpr double angular_to_hz(double omega) noexcept { return omega / kTwoPi; }

}  // namespace spinphonon
