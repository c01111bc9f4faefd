#pragma once

#include <cstdint>
#include <random>

#include "dfrelay/types.hpp"

namespace dfrelay {

// Independent sub-streams of one trial. The numeric values are part of the
// reproducibility contract; do not reorder.
enum class StreamPurpose : std::uint32_t {
  SourceBits = 0,
  SourceRelayChannel = 1,
  RelayNoise = 2,
  RelayDestChannel = 3,
  DestNoise = 4,
  Scratch = 5,
};

// mt19937_64 with a portable uniform/Gaussian conversion, so a given seed
// produces the same draws on every standard library.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Seeds the engine with std::seed_seq over the 32-bit words
  // (base lo, base hi, trial lo, trial hi, purpose).
  static RandomStream derive(std::uint64_t base_seed, std::uint64_t trial, StreamPurpose purpose);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1) with 53-bit resolution; never returns 0.
  double uniform_open();

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double standard_normal();

  // Circularly-symmetric complex Gaussian, E|z|^2 = variance.
  Complex complex_gaussian(double variance);

  int bit() { return static_cast<int>(next_u64() >> 63); }

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

} // namespace dfrelay
