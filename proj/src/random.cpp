#include "dfrelay/random.hpp"

#include <array>
#include <cmath>

namespace dfrelay {

RandomStream RandomStream::derive(std::uint64_t base_seed, std::uint64_t trial, StreamPurpose purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(trial & 0xffffffffu),
                    static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(purpose)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return RandomStream((static_cast<std::uint64_t>(words[1]) << 32) | words[0]);
}

double RandomStream::uniform_open() {
  // (k + 0.5) / 2^53 for k in [0, 2^53)
  const auto k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RandomStream::standard_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

Complex RandomStream::complex_gaussian(double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double re = standard_normal();
  const double im = standard_normal();
  return {scale * re, scale * im};
}

} // namespace dfrelay
