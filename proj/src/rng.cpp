#include "gnsde/rng.hpp"

#include <cmath>
#include <numbers>

namespace gnsde::rng {

double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  // 53 random mantissa bits, shifted off zero.
  const auto bits = hash(seed, stream, index) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  const double u1 = uniform(seed, stream, 2 * index);
  const double u2 = uniform(seed, stream, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gnsde::rng
