#include "dfrelay/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dfrelay::power {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kFiniteDifferenceStep = 1e-6;

void check_response(const MimoResponse& g) {
  if (g.per_tone.empty() || g.relay_antennas() < 1 || g.dest_antennas() < 1)
    throw InvalidConfig("g", "empty relay-destination response");
  for (const auto& gl : g.per_tone)
    if (gl.rows() != g.relay_antennas() || gl.cols() != g.dest_antennas())
      throw InvalidConfig("g", "inconsistent antenna dimensions across tones");
}

double max_abs_diff(const CVector& a, const CVector& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

} // namespace

MimoResponse MimoResponse::from_taps(const std::vector<std::vector<channel::ChannelTaps>>& taps,
                                     Index m) {
  if (taps.empty() || taps.front().empty())
    throw InvalidConfig("g", "no relay-destination channels");
  const auto n_r = static_cast<Index>(taps.size());
  const auto n_d = static_cast<Index>(taps.front().size());
  MimoResponse g;
  g.per_tone.assign(static_cast<std::size_t>(m), CMatrix(n_r, n_d));
  for (Index i = 0; i < n_r; ++i) {
    if (static_cast<Index>(taps[static_cast<std::size_t>(i)].size()) != n_d)
      throw InvalidConfig("g", "ragged relay-destination channel set");
    for (Index j = 0; j < n_d; ++j) {
      const auto resp = channel::freq_response(taps[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], m);
      for (Index l = 0; l < m; ++l)
        g.per_tone[static_cast<std::size_t>(l)](i, j) = resp[l];
    }
  }
  return g;
}

Allocation equal_allocation(Index n_r) {
  if (n_r < 1)
    throw InvalidConfig("n_r", "need at least one relay antenna");
  return Allocation::Constant(n_r, Complex(std::sqrt(1.0 / static_cast<double>(n_r)), 0.0));
}

mmse::EffectiveChannel effective_channel_dest(const MimoResponse& g, const Allocation& alpha,
                                              double snr_hat) {
  check_response(g);
  if (alpha.size() != g.relay_antennas())
    throw InvalidConfig("alpha", "allocation has " + std::to_string(alpha.size()) +
                                     " entries for " + std::to_string(g.relay_antennas()) +
                                     " relay antennas");
  mmse::EffectiveChannel ch{CMatrix(g.tones(), g.dest_antennas()), snr_hat};
  for (Index l = 0; l < g.tones(); ++l)
    ch.u.row(l) = alpha.transpose() * g.per_tone[static_cast<std::size_t>(l)];
  return ch;
}

double lambda_update(const mmse::FeedforwardTaps& w, double snr_hat, Index m) {
  if (!(snr_hat > 0.0))
    throw InvalidConfig("snr_hat", "must be > 0");
  return w.squaredNorm() / (static_cast<double>(m) * snr_hat);
}

CMatrix c_vectors(const MimoResponse& g, const mmse::FeedforwardTaps& w) {
  check_response(g);
  if (w.rows() != g.tones() || w.cols() != g.dest_antennas())
    throw InvalidLength("c_vectors: taps do not match the response dimensions");
  CMatrix c(g.tones(), g.relay_antennas());
  for (Index l = 0; l < g.tones(); ++l)
    c.row(l) = (g.per_tone[static_cast<std::size_t>(l)] * w.row(l).transpose()).conjugate().transpose();
  return c;
}

CVector feedback_from_taps(const mmse::EffectiveChannel& ch, const mmse::FeedforwardTaps& w,
                           const std::vector<Index>& indices) {
  const Index m = ch.tones();
  mmse::validate_indices(indices, m);
  const CVector t = w.cwiseProduct(ch.u).rowwise().sum();
  CVector f(static_cast<Index>(indices.size()));
  for (std::size_t p = 0; p < indices.size(); ++p) {
    Complex acc{0.0, 0.0};
    for (Index l = 0; l < m; ++l)
      acc += std::conj(t[l]) * unit_phasor(indices[p], l, m);
    f[static_cast<Index>(p)] = acc / static_cast<double>(m);
  }
  return f;
}

Allocation alpha_update(const CMatrix& c, double lambda, Index m, const mmse::FeedbackTaps& fb) {
  if (!(lambda >= 0.0))
    throw InvalidConfig("lambda", "multiplier must be >= 0");
  const Index n_r = c.cols();
  const CVector d = mmse::combined_response(fb, c.rows());
  const CMatrix a = static_cast<double>(m) * lambda * CMatrix::Identity(n_r, n_r) +
                    c.transpose() * c.conjugate();
  const CVector rhs = c.transpose() * d;

  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(a, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (hi == 0.0 && rhs.isZero(0.0) && lambda > 0.0)
    return Allocation::Zero(n_r);
  if (!(lo > 0.0) || hi / lo > kMaxCondition)
    throw SingularSystem("alpha update: system matrix is singular");
  return a.llt().solve(rhs);
}

namespace {

KktState run_fixed_point(const MimoResponse& g, double snr_hat, const std::vector<Index>& indices,
                         const SolverOptions& opts) {
  check_response(g);
  if (!(opts.epsilon > 0.0))
    throw InvalidConfig("epsilon", "must be > 0");
  if (opts.max_iterations < 1)
    throw InvalidConfig("max_iterations", "must be >= 1");
  const Index m = g.tones();
  mmse::validate_indices(indices, m);

  KktState state;
  state.alpha = opts.initial_alpha ? *opts.initial_alpha : equal_allocation(g.relay_antennas());
  if (state.alpha.size() != g.relay_antennas())
    throw InvalidConfig("initial_alpha", "wrong number of relay antennas");
  const double init_norm = state.alpha.norm();
  if (!(init_norm > 0.0))
    throw InvalidConfig("initial_alpha", "must be nonzero");
  state.alpha /= init_norm;
  state.fb = mmse::FeedbackTaps::zeros(indices);

  for (int it = 1; it <= opts.max_iterations; ++it) {
    const auto ch = effective_channel_dest(g, state.alpha, snr_hat);
    state.w = mmse::ffe_taps(ch, state.fb);
    state.lambda = lambda_update(state.w, snr_hat, m);

    mmse::FeedbackTaps fb_new = state.fb;
    fb_new.coeffs = feedback_from_taps(ch, state.w, indices);
    const Allocation alpha_new = alpha_update(c_vectors(g, state.w), state.lambda, m, fb_new);

    const double step = std::max(max_abs_diff(alpha_new, state.alpha),
                                 max_abs_diff(fb_new.coeffs, state.fb.coeffs));
    state.alpha = alpha_new;
    state.fb = std::move(fb_new);
    state.iterations = it;
    state.mse_trace.push_back(mmse::analytic_mse(ch, state.w, state.fb, 1.0, 1.0 / snr_hat));
    if (step < opts.epsilon) {
      state.converged = true;
      break;
    }
  }

  // The constraint is active at every fixed point; land exactly on it and
  // refresh the taps and multiplier for the returned allocation.
  const double norm = state.alpha.norm();
  if (!(norm > 0.0)) {
    state.converged = false;
    return state;
  }
  state.alpha /= norm;
  state.w = mmse::ffe_taps(effective_channel_dest(g, state.alpha, snr_hat), state.fb);
  state.lambda = lambda_update(state.w, snr_hat, m);
  return state;
}

} // namespace

KktState optimize_fde(const MimoResponse& g, double snr_hat, const SolverOptions& opts) {
  return run_fixed_point(g, snr_hat, {}, opts);
}

KktState optimize_fde_dfe(const MimoResponse& g, double snr_hat, const std::vector<Index>& indices,
                          const SolverOptions& opts) {
  return run_fixed_point(g, snr_hat, indices, opts);
}

double state_mse(const MimoResponse& g, const KktState& state, double snr_hat) {
  return mmse::analytic_mse(effective_channel_dest(g, state.alpha, snr_hat), state.w, state.fb, 1.0,
                            1.0 / snr_hat);
}

double stationarity_residual(const MimoResponse& g, const KktState& state, double snr_hat) {
  const auto objective = [&](const Allocation& alpha) {
    return mmse::analytic_mse(effective_channel_dest(g, alpha, snr_hat), state.w, state.fb, 1.0,
                              1.0 / snr_hat);
  };
  const double h = kFiniteDifferenceStep;
  double worst = 0.0;
  for (Index i = 0; i < state.alpha.size(); ++i) {
    Allocation plus = state.alpha;
    Allocation minus = state.alpha;
    plus[i] += Complex(h, 0.0);
    minus[i] -= Complex(h, 0.0);
    const double d_re = (objective(plus) - objective(minus)) / (2.0 * h);
    plus[i] = state.alpha[i] + Complex(0.0, h);
    minus[i] = state.alpha[i] - Complex(0.0, h);
    const double d_im = (objective(plus) - objective(minus)) / (2.0 * h);
    // d|alpha|^2 / d(re, im) = 2 (re, im)
    const Complex grad = Complex(d_re, d_im) + 2.0 * state.lambda * state.alpha[i];
    worst = std::max(worst, std::abs(grad));
  }
  return worst;
}

double kkt_residual(const MimoResponse& g, const KktState& state, double snr_hat) {
  const double stationarity = stationarity_residual(g, state, snr_hat);
  const double primal = std::abs(state.alpha.squaredNorm() - 1.0);
  const double dual = std::max(0.0, -state.lambda);
  return std::max({stationarity, primal, dual});
}

} // namespace dfrelay::power
