#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

namespace semeq {

// All randomness in the project flows from one master seed through named
// streams. A stream seed is derive_seed(master, tag) where the tag is a
// human-readable path like "train/source" or "sweep/sem/soft/8/5/0". Streams
// are therefore independent of each other and of execution order.

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Seed for the stream named `tag` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

Rng make_rng(std::uint64_t master, std::string_view tag);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Unbiased uniform integer in [0, n), n > 0. Rejection sampling on the raw
/// 64-bit output so the draw sequence is fully pinned by this code.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// One pair of independent standard normal draws (Box-Muller). The transform
/// is spelled out here rather than delegated to std::normal_distribution,
/// whose draw sequence is implementation-defined.
std::pair<double, double> gaussian_pair(Rng& rng);

/// Single standard normal draw; consumes a full Box-Muller pair.
double gaussian(Rng& rng);

}  // namespace semeq
