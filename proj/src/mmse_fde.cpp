#include "dfrelay/mmse_fde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfrelay/spectral.hpp"

namespace dfrelay::mmse {

namespace {

constexpr double kMaxCondition = 1e12;

double inverse_snr(double snr) {
  if (!(snr > 0.0))
    throw InvalidConfig("snr", "must be > 0");
  return 1.0 / snr;
}

void check_shape(const EffectiveChannel& ch, const FeedforwardTaps& w) {
  if (w.rows() != ch.tones() || w.cols() != ch.branches())
    throw InvalidLength("feedforward taps do not match the channel dimensions");
}

} // namespace

FeedbackTaps FeedbackTaps::consecutive(Index count) {
  std::vector<Index> idx(static_cast<std::size_t>(std::max<Index>(count, 0)));
  for (std::size_t p = 0; p < idx.size(); ++p)
    idx[p] = static_cast<Index>(p) + 1;
  return zeros(std::move(idx));
}

FeedbackTaps FeedbackTaps::zeros(std::vector<Index> indices) {
  FeedbackTaps fb;
  fb.coeffs = CVector::Zero(static_cast<Index>(indices.size()));
  fb.indices = std::move(indices);
  return fb;
}

void validate_indices(const std::vector<Index>& indices, Index m) {
  Index prev = 0;
  for (const Index k : indices) {
    if (k <= prev || k >= m)
      throw InvalidLength("feedback index " + std::to_string(k) +
                          " breaks the strictly increasing [1, M-1] requirement (M = " +
                          std::to_string(m) + ")");
    prev = k;
  }
}

Complex combined_response(const FeedbackTaps& fb, Index tone, Index m) {
  Complex d{1.0, 0.0};
  for (Index p = 0; p < fb.size(); ++p)
    d += std::conj(fb.coeffs[p]) * unit_phasor(fb.indices[static_cast<std::size_t>(p)], tone, m);
  return d;
}

CVector combined_response(const FeedbackTaps& fb, Index m) {
  if (fb.coeffs.size() != fb.size())
    throw InvalidLength("feedback taps: index and coefficient counts differ");
  CVector d(m);
  for (Index l = 0; l < m; ++l)
    d[l] = combined_response(fb, l, m);
  return d;
}

FeedforwardTaps ffe_taps(const EffectiveChannel& ch, const FeedbackTaps& fb) {
  const double noise = inverse_snr(ch.snr);
  const CVector d = combined_response(fb, ch.tones());
  FeedforwardTaps w(ch.tones(), ch.branches());
  for (Index l = 0; l < ch.tones(); ++l) {
    const double denom = noise + ch.u.row(l).squaredNorm();
    w.row(l) = (ch.u.row(l).conjugate() * d[l]) / denom;
  }
  return w;
}

FeedforwardTaps ffe_taps_by_solve(const EffectiveChannel& ch, const FeedbackTaps& fb) {
  const double noise = inverse_snr(ch.snr);
  const CVector d = combined_response(fb, ch.tones());
  const Index n = ch.branches();
  FeedforwardTaps w(ch.tones(), n);
  for (Index l = 0; l < ch.tones(); ++l) {
    const CVector h = ch.u.row(l).adjoint();
    const CMatrix a = noise * CMatrix::Identity(n, n) + h * h.adjoint();
    w.row(l) = a.ldlt().solve(h * d[l]).transpose();
  }
  return w;
}

Complex feedback_correlation(const EffectiveChannel& ch, Index k) {
  const double noise = inverse_snr(ch.snr);
  const Index m = ch.tones();
  Complex acc{0.0, 0.0};
  for (Index l = 0; l < m; ++l)
    acc += unit_phasor(k, l, m) / (noise + ch.u.row(l).squaredNorm());
  return acc * (noise / static_cast<double>(m));
}

FeedbackSystem feedback_system(const EffectiveChannel& ch, const std::vector<Index>& indices) {
  validate_indices(indices, ch.tones());
  const auto b = static_cast<Index>(indices.size());
  const Index max_lag = indices.empty() ? 0 : indices.back();

  // Lags 0..max_lag cover every entry; v_{-k} = conj(v_k) since the weights are real.
  CVector v(max_lag + 1);
  for (Index k = 0; k <= max_lag; ++k)
    v[k] = feedback_correlation(ch, k);
  const auto at = [&v](Index k) { return k >= 0 ? v[k] : std::conj(v[-k]); };

  FeedbackSystem sys{CVector(b), CMatrix(b, b)};
  for (Index p = 0; p < b; ++p) {
    const Index kp = indices[static_cast<std::size_t>(p)];
    sys.v_vec[p] = at(kp);
    for (Index q = 0; q < b; ++q)
      sys.v_mat(p, q) = at(kp - indices[static_cast<std::size_t>(q)]);
  }
  return sys;
}

CVector solve_feedback(const FeedbackSystem& sys) {
  const Index b = sys.v_vec.size();
  if (sys.v_mat.rows() != b || sys.v_mat.cols() != b)
    throw InvalidLength("feedback system: matrix and vector sizes differ");
  if (b == 0)
    return CVector(0);

  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(sys.v_mat, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition)
    throw SingularSystem("feedback system is singular (eigenvalues " + std::to_string(lo) + " .. " +
                         std::to_string(hi) + ")");
  return -sys.v_mat.llt().solve(sys.v_vec);
}

FeedbackTaps optimal_feedback(const EffectiveChannel& ch, const std::vector<Index>& indices) {
  FeedbackTaps fb;
  fb.indices = indices;
  // noiseless limit: the feedback filter vanishes
  if (std::isinf(ch.snr)) {
    validate_indices(indices, ch.tones());
    fb.coeffs = CVector::Zero(static_cast<Index>(indices.size()));
    return fb;
  }
  fb.coeffs = solve_feedback(feedback_system(ch, indices));
  return fb;
}

double analytic_mse(const EffectiveChannel& ch, const FeedforwardTaps& w, const FeedbackTaps& fb,
                    double sigma_s2, double sigma_n2) {
  check_shape(ch, w);
  const Index m = ch.tones();
  const CVector d = combined_response(fb, m);
  const CVector t = w.cwiseProduct(ch.u).rowwise().sum();
  const double distortion = (t - d).squaredNorm();
  const double noise = w.squaredNorm();
  return (sigma_s2 * distortion + sigma_n2 * noise) / static_cast<double>(m);
}

namespace {

modem::SymbolBlock decide(const TimeBlock& block, double power) {
  return modem::hard_decide(block, power);
}

Complex decide_one(Complex z, double power) {
  const double a = std::sqrt(power / 2.0);
  return {z.real() < 0.0 ? -a : a, z.imag() < 0.0 ? -a : a};
}

} // namespace

Equalized equalize(const CMatrix& received, const FeedforwardTaps& w, const FeedbackTaps& fb,
                   double power, FeedbackMode mode, const std::optional<modem::SymbolBlock>& truth) {
  if (received.rows() != w.rows() || received.cols() != w.cols())
    throw InvalidLength("equalize: received spectra do not match the feedforward taps");
  const Index m = received.rows();
  if (mode == FeedbackMode::Genie && (!truth || truth->symbols.size() != m))
    throw MissingTruth("equalize: genie feedback needs the transmitted block");

  const Spectrum combined = received.cwiseProduct(w).rowwise().sum();
  TimeBlock zeta = spectral::idft(combined);

  if (fb.empty() || mode == FeedbackMode::Linear) {
    auto decisions = decide(zeta, power);
    return {std::move(zeta), std::move(decisions)};
  }
  validate_indices(fb.indices, m);

  TimeBlock soft = zeta;
  TimeBlock past; // symbols used as feedback regressors, updated in place
  switch (mode) {
  case FeedbackMode::Genie:
    past = truth->symbols;
    break;
  case FeedbackMode::DetectedTwoPass:
    past = decide(zeta, power).symbols;
    break;
  default:
    past = TimeBlock::Zero(m);
    break;
  }

  for (Index n = 0; n < m; ++n) {
    Complex isi{0.0, 0.0};
    for (Index p = 0; p < fb.size(); ++p) {
      const Index back = n - fb.indices[static_cast<std::size_t>(p)];
      if (back < 0 && mode == FeedbackMode::ZeroPrefix)
        continue;
      isi += std::conj(fb.coeffs[p]) * past[(back + m) % m];
    }
    soft[n] = zeta[n] - isi;
    if (mode != FeedbackMode::Genie)
      past[n] = decide_one(soft[n], power);
  }
  auto decisions = decide(soft, power);
  return {std::move(soft), std::move(decisions)};
}

} // namespace dfrelay::mmse
