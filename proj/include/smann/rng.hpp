#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace smann::rng {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Injective in `child` for a fixed `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t child) noexcept
{
    return mix64(mix64(parent) ^ mix64(child));
}

/// Stateless counter-based stream: every draw is a pure function of
/// (seed, index, lane), so replicas and steps never share generator state.
struct CounterStream {
    std::uint64_t seed = 0;

    constexpr std::uint64_t bits(std::uint64_t index, std::uint64_t lane) const noexcept
    {
        return mix64(mix64(mix64(seed) ^ index) ^ mix64(lane ^ 0xD1B54A32D192ED03ULL));
    }

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t index, std::uint64_t lane) const noexcept
    {
        return (static_cast<double>(bits(index, lane) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller on lanes (2k, 2k+1).
    double normal(std::uint64_t index, std::uint64_t k) const noexcept
    {
        const double u1 = uniform(index, 2 * k);
        const double u2 = uniform(index, 2 * k + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

}  // namespace smann::rng
