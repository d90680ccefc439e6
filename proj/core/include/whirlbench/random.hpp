#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace whirlbench {

/// Counter-based generator: draw i of stream `seed` is splitmix64(seed + (i + 1) * golden).
/// Any draw can be computed independently, so parallel or reordered noise
/// generation reproduces the same stream on every platform.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t seed) : seed_(seed) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    constexpr std::uint64_t bits(std::uint64_t counter) const {
        return mix(seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform on (0, 1].
    constexpr double uniform(std::uint64_t counter) const {
        return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on draws 2*counter and 2*counter + 1.
    double normal(std::uint64_t counter) const {
        const double u1 = uniform(2 * counter);
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t seed_;
};

}  // namespace whirlbench
