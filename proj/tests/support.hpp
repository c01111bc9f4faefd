#pragma once

// Shared generators and independent oracles for the test suites.

#include <cmath>
#include <vector>

#include "dfrelay/channel.hpp"
#include "dfrelay/mmse_fde.hpp"
#include "dfrelay/power_alloc.hpp"
#include "dfrelay/random.hpp"

namespace dfrelay::testing {

inline CVector random_vector(RandomStream& rng, Index n, double variance = 1.0) {
  CVector x(n);
  for (Index k = 0; k < n; ++k)
    x[k] = rng.complex_gaussian(variance);
  return x;
}

// O(M^2) forward transform straight from the defining sum.
inline CVector direct_dft(const CVector& x) {
  const Index m = x.size();
  CVector out = CVector::Zero(m);
  for (Index l = 0; l < m; ++l)
    for (Index n = 0; n < m; ++n) {
      const double angle = -2.0 * kPi * static_cast<double>(n) * static_cast<double>(l) / static_cast<double>(m);
      out[l] += x[n] * Complex(std::cos(angle), std::sin(angle));
    }
  return out;
}

inline double rel_err(const CVector& got, const CVector& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

inline mmse::EffectiveChannel random_channel(RandomStream& rng, Index m, Index n, double snr) {
  mmse::EffectiveChannel ch{CMatrix(m, n), snr};
  for (Index l = 0; l < m; ++l)
    for (Index b = 0; b < n; ++b)
      ch.u(l, b) = rng.complex_gaussian(1.0);
  return ch;
}

// Frequency-selective effective channel built from short random tap vectors.
inline mmse::EffectiveChannel multipath_channel(RandomStream& rng, Index m, Index n, int taps, double snr) {
  const channel::PowerDelayProfile pdp{1.0, 2.0, taps, 1.0, false};
  mmse::EffectiveChannel ch{CMatrix(m, n), snr};
  for (Index b = 0; b < n; ++b)
    ch.u.col(b) = channel::freq_response(channel::draw_channel(pdp, rng), m);
  return ch;
}

inline power::MimoResponse random_mimo(RandomStream& rng, Index m, int n_r, int n_d, int taps = 3,
                                       double sigma_t = 2.0) {
  const channel::PowerDelayProfile pdp{1.0, sigma_t, taps, 1.0, false};
  std::vector<std::vector<channel::ChannelTaps>> g(static_cast<std::size_t>(n_r));
  for (auto& row : g)
    for (int j = 0; j < n_d; ++j)
      row.push_back(channel::draw_channel(pdp, rng));
  return power::MimoResponse::from_taps(g, m);
}

} // namespace dfrelay::testing
