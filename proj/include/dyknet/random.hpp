// Copyright 2026 The dyknet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace dyknet {

/// Sequential generator. std::mt19937_64 has a fully specified output
/// sequence, so seeded runs agree across standard libraries as long as we
/// do our own conversion to floating point (the std distributions do not
/// have portable output).
using Rng = std::mt19937_64;

/// Uniform double in the open interval (0, 1) from the top 53 bits.
inline double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double uniform_open(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_open01(rng);
}

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the draw for (seed, stream, counter) does not depend
/// on how many other draws happened before it. Used for per-edge delivery
/// decisions so that adding or reordering edges leaves other edges' loss
/// patterns unchanged.
constexpr std::uint64_t stream_bits(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t counter) noexcept {
  return mix64(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL)) ^ counter);
}

constexpr double stream_uniform01(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) noexcept {
  return (static_cast<double>(stream_bits(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace dyknet
