#include "dfrelay/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "dfrelay/channel.hpp"
#include "dfrelay/mmse_fde.hpp"
#include "dfrelay/modem.hpp"
#include "dfrelay/power_alloc.hpp"
#include "dfrelay/random.hpp"
#include "dfrelay/spectral.hpp"

namespace dfrelay::selftest {

namespace {

using Transform = std::function<CVector(const CVector&)>;

CVector random_block(RandomStream& rng, Index m) {
  CVector x(m);
  for (Index n = 0; n < m; ++n)
    x[n] = rng.complex_gaussian(1.0);
  return x;
}

CVector direct_dft(const CVector& x) {
  const Index m = x.size();
  CVector out = CVector::Zero(m);
  for (Index l = 0; l < m; ++l)
    for (Index n = 0; n < m; ++n)
      out[l] += x[n] * unit_phasor(n, l, m);
  return out;
}

double rel_err(const CVector& a, const CVector& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult check_dft_definition(const Transform& dft, RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const CVector x = random_block(rng, 8);
    worst = std::max(worst, rel_err(dft(x), direct_dft(x)));
  }
  return {"dft-direct-sum", worst <= 1e-12, "max relative error " + fmt(worst)};
}

CheckResult check_round_trip(const Transform& dft, RandomStream& rng) {
  double worst = 0.0;
  for (Index m = 2; m <= 512; m *= 2) {
    const CVector x = random_block(rng, m);
    worst = std::max(worst, rel_err(spectral::idft(dft(x)), x));
  }
  return {"dft-round-trip", worst <= 1e-12, "max relative error " + fmt(worst)};
}

// Energy of a channel output, once in time and once as (1/M) sum |H_l X_l|^2.
CheckResult check_parseval(const Transform& dft, RandomStream& rng) {
  double worst = 0.0;
  for (Index m = 4; m <= 256; m *= 2) {
    const CVector x = random_block(rng, m);
    const CVector plain = dft(x);
    worst = std::max(worst, std::abs(x.squaredNorm() - plain.squaredNorm() / static_cast<double>(m)) /
                                x.squaredNorm());
    const CVector taps = random_block(rng, 3);
    CVector padded = CVector::Zero(m);
    padded.head(3) = taps;
    const CVector y = spectral::circular_convolve(padded, x);
    const CVector filtered = channel::freq_response(taps, m).cwiseProduct(plain);
    worst = std::max(worst, std::abs(y.squaredNorm() - filtered.squaredNorm() / static_cast<double>(m)) /
                                y.squaredNorm());
  }
  return {"parseval", worst <= 1e-10, "max relative error " + fmt(worst)};
}

CheckResult check_convolution_theorem(const Transform& dft, RandomStream& rng) {
  double worst = 0.0;
  for (Index m = 2; m <= 64; m *= 2) {
    const CVector a = random_block(rng, m);
    const CVector b = random_block(rng, m);
    worst = std::max(worst, rel_err(dft(spectral::circular_convolve(a, b)), dft(a).cwiseProduct(dft(b))));
  }
  return {"convolution-theorem", worst <= 1e-10, "max relative error " + fmt(worst)};
}

CheckResult check_cp_circularity(const Transform& dft, RandomStream& rng) {
  double worst = 0.0;
  const Index m = 64;
  for (int trial = 0; trial < 10; ++trial) {
    const channel::PowerDelayProfile pdp{1.0, 2.0, 8, 1.0, false};
    const auto taps = channel::draw_channel(pdp, rng);
    const CVector x = random_block(rng, m);
    const CVector y = channel::transmit_over_channel(x, taps, 7, 0.0, rng);
    worst = std::max(worst, rel_err(dft(y), dft(x).cwiseProduct(channel::freq_response(taps, m))));
  }
  return {"cp-frequency-model", worst <= 1e-10, "max relative error " + fmt(worst)};
}

CheckResult check_modem(RandomStream& rng) {
  modem::BitBlock bits(256);
  for (auto& b : bits)
    b = static_cast<std::uint8_t>(rng.bit());
  const auto sym = modem::modulate(bits, 2.0);
  bool ok = modem::demodulate(modem::hard_decide(sym.symbols, 2.0)) == bits;
  for (Index n = 0; n < sym.symbols.size(); ++n)
    ok = ok && std::abs(std::norm(sym.symbols[n]) - 2.0) < 1e-14;
  return {"qpsk-round-trip", ok, ok ? "ok" : "mismatch"};
}

mmse::EffectiveChannel random_channel(RandomStream& rng, Index m, Index n, double snr) {
  mmse::EffectiveChannel ch{CMatrix(m, n), snr};
  for (Index l = 0; l < m; ++l)
    for (Index b = 0; b < n; ++b)
      ch.u(l, b) = rng.complex_gaussian(1.0);
  return ch;
}

CheckResult check_ffe_oracle(RandomStream& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index m = 4 + static_cast<Index>(rng.next_u64() % 61);
    const Index n = 1 + static_cast<Index>(rng.next_u64() % 4);
    const double snr = 0.1 + 99.9 * rng.uniform_open();
    const auto ch = random_channel(rng, m, n, snr);
    auto fb = mmse::FeedbackTaps::consecutive(std::min<Index>(2, m - 1));
    for (Index p = 0; p < fb.size(); ++p)
      fb.coeffs[p] = rng.complex_gaussian(0.1);
    const auto w = mmse::ffe_taps(ch, fb);
    worst = std::max(worst, (w - mmse::ffe_taps_by_solve(ch, fb)).norm() / w.norm());
  }
  return {"ffe-oracle", worst <= 1e-10, "max relative error " + fmt(worst)};
}

CheckResult check_feedback_example() {
  mmse::EffectiveChannel ch{CMatrix(2, 1), 1.0};
  ch.u << Complex(1.0, 0.0), Complex(0.0, 0.0);
  const auto sys = mmse::feedback_system(ch, {1});
  const auto f = mmse::solve_feedback(sys);
  const bool ok = std::abs(sys.v_mat(0, 0) - 0.75) < 1e-14 && std::abs(sys.v_vec[0] + 0.25) < 1e-14 &&
                  std::abs(f[0] - 1.0 / 3.0) < 1e-14;
  return {"feedback-hand-example", ok, "f_1 = " + fmt(f[0].real())};
}

CheckResult check_mse_monte_carlo(RandomStream& rng) {
  const Index m = 16;
  const int branches = 2;
  const double sigma_n2 = 0.1;
  const int blocks = 3000;
  const channel::PowerDelayProfile pdp{1.0, 2.0, 3, 1.0, false};

  std::vector<channel::ChannelTaps> taps;
  mmse::EffectiveChannel ch{CMatrix(m, branches), 1.0 / sigma_n2};
  for (int b = 0; b < branches; ++b) {
    taps.push_back(channel::draw_channel(pdp, rng));
    ch.u.col(b) = channel::freq_response(taps.back(), m);
  }
  const auto fb = mmse::optimal_feedback(ch, {1, 2});
  const auto w = mmse::ffe_taps(ch, fb);
  const double predicted = mmse::analytic_mse(ch, w, fb, 1.0, sigma_n2);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < blocks; ++k) {
    modem::BitBlock bits(2 * m);
    for (auto& bit : bits)
      bit = static_cast<std::uint8_t>(rng.bit());
    const auto s = modem::modulate(bits, 1.0);
    CMatrix rx(m, branches);
    for (int b = 0; b < branches; ++b)
      rx.col(b) = spectral::dft(channel::transmit_over_channel(s.symbols, taps[b], 2, sigma_n2, rng));
    const auto out = mmse::equalize(rx, w, fb, 1.0, mmse::FeedbackMode::Genie, s);
    const double block_mse = (out.soft - s.symbols).squaredNorm() / static_cast<double>(m);
    sum += block_mse;
    sum_sq += block_mse * block_mse;
  }
  const double mean = sum / blocks;
  const double se = std::sqrt((sum_sq / blocks - mean * mean) / (blocks - 1));
  const bool ok = std::abs(mean - predicted) <= 3.0 * se;
  return {"analytic-mse-monte-carlo", ok,
          "predicted " + fmt(predicted) + ", simulated " + fmt(mean) + " +/- " + fmt(se)};
}

CheckResult check_kkt(RandomStream& rng) {
  const Index m = 16;
  const channel::PowerDelayProfile pdp{1.0, 2.0, 3, 1.0, false};
  power::SolverOptions opts;
  opts.epsilon = 1e-9;
  opts.max_iterations = 5000;
  int converged = 0;
  double worst = 0.0;
  for (int draw = 0; draw < 5; ++draw) {
    std::vector<std::vector<channel::ChannelTaps>> taps(2);
    for (auto& row : taps)
      for (int j = 0; j < 2; ++j)
        row.push_back(channel::draw_channel(pdp, rng));
    const auto g = power::MimoResponse::from_taps(taps, m);
    const auto state = power::optimize_fde(g, 10.0, opts);
    if (!state.converged)
      continue;
    ++converged;
    worst = std::max(worst, power::kkt_residual(g, state, 10.0));
  }
  const bool ok = converged >= 4 && worst <= 1e-4;
  return {"kkt-certificate", ok,
          std::to_string(converged) + "/5 converged, max residual " + fmt(worst)};
}

} // namespace

std::vector<CheckResult> run(const Options& opts) {
  RandomStream rng(opts.seed);
  const Transform dft = [corrupt = opts.corrupt_dft_sign](const CVector& x) -> CVector {
    if (corrupt)
      return spectral::dft(x.conjugate()).conjugate();
    return spectral::dft(x);
  };

  std::vector<CheckResult> results;
  results.push_back(check_dft_definition(dft, rng));
  results.push_back(check_round_trip(dft, rng));
  results.push_back(check_parseval(dft, rng));
  results.push_back(check_convolution_theorem(dft, rng));
  results.push_back(check_cp_circularity(dft, rng));
  results.push_back(check_modem(rng));
  results.push_back(check_ffe_oracle(rng));
  results.push_back(check_feedback_example());
  results.push_back(check_mse_monte_carlo(rng));
  results.push_back(check_kkt(rng));
  return results;
}

} // namespace dfrelay::selftest
