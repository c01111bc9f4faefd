#pragma once

#include <optional>
#include <vector>

#include "dfrelay/channel.hpp"
#include "dfrelay/mmse_fde.hpp"
#include "dfrelay/types.hpp"

namespace dfrelay::power {

// Relay-to-destination responses: per_tone[l](i, j) = G_{l,i,j}.
struct MimoResponse {
  std::vector<CMatrix> per_tone;

  Index tones() const { return static_cast<Index>(per_tone.size()); }
  Index relay_antennas() const { return per_tone.empty() ? 0 : per_tone.front().rows(); }
  Index dest_antennas() const { return per_tone.empty() ? 0 : per_tone.front().cols(); }

  // taps[i][j] is the channel from relay antenna i to destination antenna j.
  static MimoResponse from_taps(const std::vector<std::vector<channel::ChannelTaps>>& taps, Index m);
};

// Relay antenna amplitude weights alpha_i; total relay power is sum |alpha_i|^2 * P_R.
using Allocation = CVector;

struct SolverOptions {
  double epsilon = 1e-3;
  int max_iterations = 500;
  std::optional<Allocation> initial_alpha;
};

struct KktState {
  Allocation alpha;
  double lambda = 0.0;
  mmse::FeedforwardTaps w;
  mmse::FeedbackTaps fb;
  int iterations = 0;
  bool converged = false;
  // analytic MSE after each iteration; not monotone in general
  std::vector<double> mse_trace;
};

Allocation equal_allocation(Index n_r);

// u(l, j) = sum_i alpha_i G_{l,i,j}, snr = snr_hat.
mmse::EffectiveChannel effective_channel_dest(const MimoResponse& g, const Allocation& alpha,
                                              double snr_hat);

// lambda = (1 / (m snr_hat)) sum_{l,j} |w(l, j)|^2
double lambda_update(const mmse::FeedforwardTaps& w, double snr_hat, Index m);

// Row l holds C_l^T with C_l[i] = conj(sum_j w(l, j) G_{l,i,j}).
CMatrix c_vectors(const MimoResponse& g, const mmse::FeedforwardTaps& w);

// Feedback coefficients implied by the current taps:
// f_k = (1/M) sum_l conj(T_l) exp(-j 2 pi k l / M), T_l = sum_j w(l, j) u(l, j).
CVector feedback_from_taps(const mmse::EffectiveChannel& ch, const mmse::FeedforwardTaps& w,
                           const std::vector<Index>& indices);

// Solves (m lambda I + sum_l C_l C_l^H) alpha = sum_l C_l D_l. Not normalised.
Allocation alpha_update(const CMatrix& c, double lambda, Index m, const mmse::FeedbackTaps& fb);

// Fixed-point iteration for the linear destination equalizer.
KktState optimize_fde(const MimoResponse& g, double snr_hat, const SolverOptions& opts = {});

// Fixed-point iteration with a destination feedback filter on `indices`.
KktState optimize_fde_dfe(const MimoResponse& g, double snr_hat, const std::vector<Index>& indices,
                          const SolverOptions& opts = {});

// Analytic MSE of a state at unit signal power and noise 1/snr_hat.
double state_mse(const MimoResponse& g, const KktState& state, double snr_hat);

// Largest of: stationarity residual (finite differences, step 1e-6), constraint
// violation |sum |alpha_i|^2 - 1| and dual infeasibility max(0, -lambda).
double kkt_residual(const MimoResponse& g, const KktState& state, double snr_hat);

// Stationarity term of kkt_residual alone.
double stationarity_residual(const MimoResponse& g, const KktState& state, double snr_hat);

} // namespace dfrelay::power
