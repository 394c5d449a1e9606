#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace qrdm {

// SplitMix64 finalizer applied to master + (index + 1) * 0x9E3779B97F4A7C15.
//   z = master + (index + 1) * 0x9E3779B97F4A7C15   (mod 2^64)
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // 53 random bits scaled into [0, 1).
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t bits() noexcept { return engine_(); }
  // Index of the first cumulative weight strictly above a uniform draw.
  std::size_t pick(std::span<const double> cdf) noexcept;

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qrdm
