#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace tnsign {

// All randomness in the library flows through this generator family:
// seeds are derived with SplitMix64 chains, streams are xoshiro256++,
// and normal variates come from Box-Muller. This is spelled out so the
// experiments can be reproduced bit-for-bit from (config, master seed)
// in any other implementation.

std::uint64_t splitmix64_next(std::uint64_t& state);

// Hash a path of integer tokens into a child seed. Appending tokens never
// changes the seed derived from a shorter prefix, so grids can grow without
// perturbing existing streams.
std::uint64_t derive_seed(std::uint64_t master, std::span<const std::uint64_t> path);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  // Uniform integer in [0, n), unbiased.
  std::uint64_t below(std::uint64_t n);
  double normal();
  // Complex normal with E|z|^2 = 1 (components std 1/sqrt(2)).
  std::complex<double> normal_complex();

 private:
  std::array<std::uint64_t, 4> state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace tnsign
