#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace modclass {

// All stochastic code takes an explicit stream; there is no global RNG state.
using RandomStream = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-cell seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for one (snr, class, trial) cell. Keyed on the SNR value, not its
// position in the grid, so reordering the grid leaves every cell's data
// unchanged. Classifier identity and testpoint count are deliberately not
// part of the key: all classifiers in a cell see identical blocks.
inline std::uint64_t derive_seed(std::uint64_t master, double snr_db,
                                 std::uint64_t class_index, std::uint64_t trial) {
    const auto snr_key = static_cast<std::uint64_t>(std::llround(snr_db * 1000.0));
    std::uint64_t h = mix64(master);
    h = mix64(h ^ snr_key);
    h = mix64(h ^ class_index);
    return mix64(h ^ trial);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(RandomStream& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exactly uniform index in [0, n) by masked rejection.
inline std::size_t draw_index(RandomStream& rng, std::size_t n) {
    const std::uint64_t mask = std::bit_ceil(n) - 1;
    for (;;) {
        const std::uint64_t v = rng() & mask;
        if (v < n) return static_cast<std::size_t>(v);
    }
}

// One Box-Muller pair of independent standard normals. Hand-rolled so that
// a given seed produces the same stream on every platform.
inline std::pair<double, double> normal_pair(RandomStream& rng) {
    const double u1 = 1.0 - uniform_unit(rng);  // (0, 1], keeps log finite
    const double u2 = uniform_unit(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace modclass
