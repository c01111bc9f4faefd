#include "dfrelay/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dfrelay::channel {

void PowerDelayProfile::validate() const {
  if (!(avg_power >= 0.0))
    throw InvalidConfig("avg_power", "must be >= 0");
  if (!(delay_spread > 0.0))
    throw InvalidConfig("sigma_t", "delay spread must be > 0");
  if (num_taps < 1)
    throw InvalidConfig("num_taps", "must be >= 1");
  if (!(symbol_duration > 0.0))
    throw InvalidConfig("symbol_duration", "must be > 0");
}

namespace {

double raw_power(const PowerDelayProfile& pdp, int l) {
  return pdp.avg_power / pdp.delay_spread * std::exp(-l * pdp.symbol_duration / pdp.delay_spread);
}

} // namespace

double pdp_power(const PowerDelayProfile& pdp, int l) {
  if (l < 0 || l >= pdp.num_taps)
    throw std::out_of_range("pdp_power: tap " + std::to_string(l) + " outside [0, " +
                            std::to_string(pdp.num_taps) + ")");
  const double p = raw_power(pdp, l);
  if (!pdp.normalize || pdp.avg_power == 0.0)
    return p;
  double total = 0.0;
  for (int k = 0; k < pdp.num_taps; ++k)
    total += raw_power(pdp, k);
  return p * pdp.avg_power / total;
}

ChannelTaps draw_channel(const PowerDelayProfile& pdp, RandomStream& rng) {
  pdp.validate();
  ChannelTaps taps(pdp.num_taps);
  for (int l = 0; l < pdp.num_taps; ++l)
    taps[l] = rng.complex_gaussian(pdp_power(pdp, l));
  return taps;
}

ToneResponse freq_response(const ChannelTaps& taps, Index m) {
  if (taps.size() < 1 || taps.size() > m)
    throw InvalidLength("freq_response: " + std::to_string(taps.size()) + " taps on a " +
                        std::to_string(m) + "-point grid");
  ToneResponse out = ToneResponse::Zero(m);
  for (Index l = 0; l < m; ++l)
    for (Index k = 0; k < taps.size(); ++k)
      out[l] += taps[k] * unit_phasor(k, l, m);
  return out;
}

TimeBlock transmit_over_channel(const TimeBlock& block, const ChannelTaps& taps, int l_cp,
                                double noise_var, RandomStream& rng) {
  const Index m = block.size();
  const Index n_taps = taps.size();
  if (m < 1 || n_taps < 1)
    throw InvalidLength("transmit_over_channel: empty block or channel");
  if (l_cp < n_taps - 1)
    throw CpTooShort("transmit_over_channel: cyclic prefix " + std::to_string(l_cp) +
                     " shorter than channel memory " + std::to_string(n_taps - 1));
  if (l_cp > m)
    throw CpTooShort("transmit_over_channel: cyclic prefix longer than the block");
  if (!(noise_var >= 0.0))
    throw InvalidConfig("noise_var", "must be >= 0");

  // Transmitted frame: last l_cp samples, then the block.
  TimeBlock frame(m + l_cp);
  frame.head(l_cp) = block.tail(l_cp);
  frame.tail(m) = block;

  TimeBlock out(m);
  for (Index n = 0; n < m; ++n) {
    const Index pos = n + l_cp; // receiver discards the first l_cp outputs
    Complex acc{0.0, 0.0};
    for (Index k = 0; k < n_taps; ++k)
      acc += taps[k] * frame[pos - k];
    out[n] = acc;
  }
  if (noise_var > 0.0)
    for (Index n = 0; n < m; ++n)
      out[n] += rng.complex_gaussian(noise_var);
  return out;
}

} // namespace dfrelay::channel
