#pragma once

#include <cstdint>

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so results do not depend on evaluation order.
namespace gnsde::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

/// Independent child seed, e.g. one per epoch or per Monte-Carlo sample.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return hash(master, 0x5eedULL, stream);
}

/// Uniform on the open interval (0, 1).
double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

/// Standard normal via Box-Muller on two counter-derived uniforms.
double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

}  // namespace gnsde::rng
