#pragma once

#include <cstdint>
#include <limits>

namespace qdlab {

/// Purpose tags keep substreams for different consumers disjoint.
enum class StreamPurpose : std::uint64_t {
  kBumpOffset = 1,
  kCoupling = 2,
  kMonteCarlo = 3,
  kRealization = 4,
  kLanczos = 5,
  kKronecker = 6,
  kEnsembleCheck = 7,
};

/// Counter-based generator keyed by (seed, purpose, index).
///
/// The n-th output is a SplitMix64 finaliser applied to key + n * golden,
/// so any substream is reproducible in isolation and streams never share
/// state. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform integer in the closed range [lo, hi], without modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace qdlab
