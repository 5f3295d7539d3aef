#pragma once

#include <cstdint>

namespace tourney {

/// SplitMix64 run in counter mode: output k of a stream with seed s is
/// mix(s + (k+1) * golden). Disjoint counter ranges give disjoint segments of
/// the same sequence, so estimates tallied over a partition of the counter
/// space do not depend on how the partition is chunked.
struct CounterStream {
    std::uint64_t seed = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(seed + (counter + 1) * 0x9E3779B97F4A7C15ull);
    }

    /// Uniform draw strictly inside (0, 1): 53-bit mantissa offset by half a ulp.
    double u01(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }
};

}  // namespace tourney
