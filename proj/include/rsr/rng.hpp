#pragma once

#include <cstdint>
#include <limits>

#include "rsr/geometry.hpp"

namespace rsr {

/// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output is mix64(key + i * golden), so a
/// stream is fully determined by its key and can be split without shared state.
/// Models UniformRandomBitGenerator for use with <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  /// Independent stream `index` of `base_seed` (per-trial seeding).
  static CounterRng stream(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return CounterRng(stream_seed(base_seed, index));
  }
  static constexpr std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return mix64(base_seed ^ mix64(index + 0x632BE59BD9B4E019ULL));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

Matrix gaussian_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols, double stddev = 1.0);

/// Uniformly distributed d-dimensional subspace of R^D (orthonormalized Gaussian).
LinearSubspace random_subspace(CounterRng& rng, Eigen::Index ambient, Eigen::Index d);

/// Haar-distributed orthogonal D x D matrix.
Matrix random_orthogonal(CounterRng& rng, Eigen::Index ambient);

}  // namespace rsr
