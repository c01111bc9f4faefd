#pragma once

#include "dfrelay/random.hpp"
#include "dfrelay/types.hpp"

namespace dfrelay::channel {

// Exponential power delay profile: tap l has mean power
// (avg_power / delay_spread) * exp(-l * symbol_duration / delay_spread).
struct PowerDelayProfile {
  double avg_power = 1.0;
  double delay_spread = 1.0; // in symbol durations
  int num_taps = 1;
  double symbol_duration = 1.0;
  // Rescale so the tap powers sum to avg_power. Off by default.
  bool normalize = false;

  void validate() const;
};

// Tap gains h[0..L-1], tap l at delay l * symbol_duration.
using ChannelTaps = CVector;
// Per-tone frequency response of a ChannelTaps on an M-point grid.
using ToneResponse = CVector;

// Mean power of tap l. Throws std::out_of_range outside [0, num_taps).
double pdp_power(const PowerDelayProfile& pdp, int l);

// One independent Rayleigh realisation: tap l ~ CN(0, pdp_power(l)).
ChannelTaps draw_channel(const PowerDelayProfile& pdp, RandomStream& rng);

ToneResponse freq_response(const ChannelTaps& taps, Index m);

// Adds an l_cp-sample cyclic prefix, convolves linearly with the taps, strips
// the prefix and adds CN(0, noise_var) noise per sample.
TimeBlock transmit_over_channel(const TimeBlock& block, const ChannelTaps& taps, int l_cp,
                                double noise_var, RandomStream& rng);

} // namespace dfrelay::channel
