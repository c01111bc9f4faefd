#pragma once

#include <optional>
#include <vector>

#include "dfrelay/modem.hpp"
#include "dfrelay/types.hpp"

namespace dfrelay::mmse {

// Per-tone channel seen by an N-branch combiner: u(l, n) is the response of
// branch n at tone l, snr = symbol power / per-branch noise variance.
//
// At the relay u(l, i) = H_{l,i}. At the destination u(l, j) = sum_i alpha_i G_{l,i,j}.
struct EffectiveChannel {
  CMatrix u;
  double snr = 1.0;

  Index tones() const { return u.rows(); }
  Index branches() const { return u.cols(); }
};

// Frequency-domain combiner weights, same shape as EffectiveChannel::u.
// The combiner output at tone l is sum_n w(l, n) * R(l, n).
using FeedforwardTaps = CMatrix;

// Time-domain feedback filter: the equalizer subtracts
// sum_p conj(coeffs[p]) * s[m - indices[p]] from its output.
struct FeedbackTaps {
  std::vector<Index> indices; // strictly increasing, each in [1, M-1]
  CVector coeffs;

  Index size() const { return static_cast<Index>(indices.size()); }
  bool empty() const { return indices.empty(); }

  static FeedbackTaps none() { return {}; }
  // Index set {1, ..., count} with zero coefficients.
  static FeedbackTaps consecutive(Index count);
  static FeedbackTaps zeros(std::vector<Index> indices);
};

// Normal equations of the feedback filter: v_mat * f = -v_vec.
struct FeedbackSystem {
  CVector v_vec;
  CMatrix v_mat; // Hermitian Toeplitz in the index differences
};

enum class FeedbackMode {
  Linear,          // ignore the feedback filter
  Genie,           // true past symbols, circular
  DetectedTwoPass, // linear decisions seed the wrap-around, then one sequential pass
  ZeroPrefix,      // past symbols before the block start are zero
};

struct Equalized {
  TimeBlock soft;
  modem::SymbolBlock decisions;
};

// Throws InvalidLength if indices are not strictly increasing inside [1, m-1].
void validate_indices(const std::vector<Index>& indices, Index m);

// D_l = 1 + sum_p conj(coeffs[p]) exp(-j 2 pi indices[p] l / m).
Complex combined_response(const FeedbackTaps& fb, Index tone, Index m);
CVector combined_response(const FeedbackTaps& fb, Index m);

// Closed-form MMSE taps: w(l, n) = conj(u(l, n)) D_l / (1/snr + ||u_l||^2).
FeedforwardTaps ffe_taps(const EffectiveChannel& ch, const FeedbackTaps& fb);

// Same taps from a dense solve of ((1/snr) I + h h^H) w = h D_l per tone with
// h = conj(u_l). Independent check of ffe_taps.
FeedforwardTaps ffe_taps_by_solve(const EffectiveChannel& ch, const FeedbackTaps& fb);

// v_k = (1/(M snr)) sum_l exp(-j 2 pi k l / M) / (1/snr + ||u_l||^2).
Complex feedback_correlation(const EffectiveChannel& ch, Index k);
FeedbackSystem feedback_system(const EffectiveChannel& ch, const std::vector<Index>& indices);

// f = -V^{-1} v. Throws SingularSystem when cond(V) exceeds 1e12.
CVector solve_feedback(const FeedbackSystem& sys);

// Jointly optimal feedback filter and feedforward taps for a channel.
FeedbackTaps optimal_feedback(const EffectiveChannel& ch, const std::vector<Index>& indices);

// E|z_m - s_m|^2 under correct past decisions:
//   (sigma_s2/M) sum_l |T_l - D_l|^2 + (sigma_n2/M) sum_{l,n} |w(l,n)|^2,
// with T_l = sum_n w(l,n) u(l,n).
double analytic_mse(const EffectiveChannel& ch, const FeedforwardTaps& w, const FeedbackTaps& fb,
                    double sigma_s2, double sigma_n2);

// Combines the branch spectra (column n of `received` is branch n), returns to
// the time domain and applies the feedback filter per `mode`.
Equalized equalize(const CMatrix& received, const FeedforwardTaps& w, const FeedbackTaps& fb,
                   double power, FeedbackMode mode,
                   const std::optional<modem::SymbolBlock>& truth = std::nullopt);

} // namespace dfrelay::mmse
