// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace pufbind::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Combines two seeds into one engine seed so distinct (a, b) pairs give
// unrelated streams even when the raw values are small consecutive integers.
inline constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ b);
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// Bernoulli draw by threshold comparison on a raw 64-bit sample. Avoids
// std::bernoulli_distribution, whose output is not pinned down by the
// standard, so streams are reproducible across standard libraries.
inline bool chance(std::mt19937_64& gen, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    const auto threshold = static_cast<std::uint64_t>(p * 18446744073709551616.0);
    return gen() < threshold;
}

}  // namespace pufbind::rng
