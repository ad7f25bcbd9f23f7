#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace salvol {

/// Seeded random source. Draws are produced with explicit bit manipulation
/// rather than std distributions so sequences match across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Source for the `index`-th independent task of a run seeded with `seed`.
    static Rng derived(std::uint64_t seed, std::uint64_t index);

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n);

    std::uint64_t next() { return engine_(); }

    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace salvol
