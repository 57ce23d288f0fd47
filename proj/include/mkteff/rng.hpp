#pragma once

// Deterministic seeding utilities. Replication sub-seeds come from the
// splitmix64 output stream in closed form, so any replication's seed is
// computable O(1) from (master seed, replication index) regardless of
// scheduling. Index draws use a 64x64->128 multiply-shift so resampling does
// not depend on any library's distribution internals.

#include <cstddef>
#include <cstdint>
#include <random>

namespace mkteff {

/// One splitmix64 mixing step of an arbitrary 64-bit state.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// The i-th output (0-based) of the splitmix64 stream seeded with `state`.
inline std::uint64_t splitmix64_at(std::uint64_t state, std::uint64_t i) {
    return splitmix64_mix(state + (i + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Deterministic per-replication seed.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t replication) {
    return splitmix64_at(master, replication);
}

/// Maps a uniform 64-bit draw to an index in [0, n) by multiply-shift.
inline std::size_t bounded_index(std::uint64_t draw, std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(draw) * static_cast<unsigned __int128>(n)) >> 64);
}

using Rng = std::mt19937_64;

}  // namespace mkteff
