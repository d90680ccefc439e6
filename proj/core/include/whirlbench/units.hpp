#pragma once

#include <numbers>

namespace whirlbench {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double rpm_to_rad_per_s(double rpm) { return rpm * kTwoPi / 60.0; }
constexpr double rad_per_s_to_rpm(double omega) { return omega * 60.0 / kTwoPi; }
constexpr double hz_to_rad_per_s(double hz) { return hz * kTwoPi; }
constexpr double rad_per_s_to_hz(double omega) { return omega / kTwoPi; }

}  // namespace whirlbench
