// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors

#ifndef QMIMO_RNG_HPP
#define QMIMO_RNG_HPP

#include <cstdint>
#include <random>

namespace qmimo {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent substream for one Monte Carlo trial. Mixing (seed, index)
// through splitmix64 lets trials run on any worker in any order while the
// drawn values stay a pure function of (seed, index).
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t mixed = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x428a2f98d728ae22ULL));
    return std::mt19937_64(mixed);
}

} // namespace qmimo

#endif
