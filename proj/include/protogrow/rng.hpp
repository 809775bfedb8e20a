#pragma once

#include <cstdint>

namespace protogrow::la {

/// Seedable 64-bit generator (xoshiro256++ seeded through splitmix64).
/// Same seed gives the same stream regardless of platform; uniform draws
/// are pure bit manipulation, normals come from Box-Muller with a cached
/// spare. Single-owner: never share an instance between threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal draw.
    double normal();

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace protogrow::la
