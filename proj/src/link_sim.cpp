#include "dfrelay/link_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "dfrelay/power_alloc.hpp"
#include "dfrelay/random.hpp"
#include "dfrelay/spectral.hpp"

namespace dfrelay::sim {

std::string to_string(Scheme s) { return s == Scheme::Fde ? "fde" : "fde_dfe"; }

std::string to_string(PowerAllocation p) { return p == PowerAllocation::Epa ? "epa" : "opa"; }

std::string to_string(mmse::FeedbackMode mode) {
  switch (mode) {
  case mmse::FeedbackMode::Linear:
    return "linear";
  case mmse::FeedbackMode::Genie:
    return "genie";
  case mmse::FeedbackMode::DetectedTwoPass:
    return "detected-two-pass";
  case mmse::FeedbackMode::ZeroPrefix:
    return "zero-prefix";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& text) {
  if (text == "fde")
    return Scheme::Fde;
  if (text == "fde_dfe")
    return Scheme::FdeDfe;
  throw InvalidConfig("scheme", "expected fde or fde_dfe, got '" + text + "'");
}

PowerAllocation parse_power_allocation(const std::string& text) {
  if (text == "epa")
    return PowerAllocation::Epa;
  if (text == "opa")
    return PowerAllocation::Opa;
  throw InvalidConfig("power_alloc", "expected epa or opa, got '" + text + "'");
}

mmse::FeedbackMode parse_feedback_mode(const std::string& text) {
  if (text == "genie")
    return mmse::FeedbackMode::Genie;
  if (text == "detected-two-pass")
    return mmse::FeedbackMode::DetectedTwoPass;
  if (text == "zero-prefix")
    return mmse::FeedbackMode::ZeroPrefix;
  throw InvalidConfig("feedback_mode",
                      "expected genie, detected-two-pass or zero-prefix, got '" + text + "'");
}

void SimConfig::validate() const {
  if (!is_power_of_two(m))
    throw InvalidConfig("m", "block size must be a power of two");
  if (n_r < 1)
    throw InvalidConfig("n_r", "must be >= 1");
  if (n_d < 1)
    throw InvalidConfig("n_d", "must be >= 1");
  if (l_h < 1 || l_h > m)
    throw InvalidConfig("l_h", "must lie in [1, m]");
  if (l_g < 1 || l_g > m)
    throw InvalidConfig("l_g", "must lie in [1, m]");
  if (l_cp < std::max(l_h, l_g) - 1 || l_cp > m)
    throw InvalidConfig("l_cp", "must cover max(l_h, l_g) - 1 and not exceed m");
  if (!(sigma_t > 0.0))
    throw InvalidConfig("sigma_t", "must be > 0");
  if (!(p_s > 0.0) || !std::isfinite(p_s))
    throw InvalidConfig("p_s", "must be positive");
  if (!(p_r > 0.0) || !std::isfinite(p_r))
    throw InvalidConfig("p_r", "must be positive");
  if (snr_db_grid.empty())
    throw InvalidConfig("snr_db_grid", "must contain at least one value");
  for (const double snr : snr_db_grid)
    if (std::isnan(snr))
      throw InvalidConfig("snr_db_grid", "contains NaN");
  if (b_h && (*b_h < 0 || *b_h > l_h - 1))
    throw InvalidConfig("b_h", "must lie in [0, l_h - 1]");
  if (b_g && (*b_g < 0 || *b_g > l_g - 1))
    throw InvalidConfig("b_g", "must lie in [0, l_g - 1]");
  if (!(epsilon > 0.0))
    throw InvalidConfig("epsilon", "must be > 0");
  if (max_iterations < 1)
    throw InvalidConfig("max_iterations", "must be >= 1");
  if (trials < 1)
    throw InvalidConfig("trials", "must be >= 1");
}

channel::PowerDelayProfile SimConfig::source_relay_pdp() const {
  return {1.0, sigma_t, l_h, 1.0, normalize_pdp};
}

channel::PowerDelayProfile SimConfig::relay_dest_pdp() const {
  return {1.0, sigma_t, l_g, 1.0, normalize_pdp};
}

double noise_variance(const SimConfig& cfg, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0.0)
    return 0.0;
  return cfg.p_s / std::pow(10.0, snr_db / 10.0);
}

TrialChannels draw_trial_channels(const SimConfig& cfg, std::uint64_t trial_index) {
  auto h_rng = RandomStream::derive(cfg.base_seed, trial_index, StreamPurpose::SourceRelayChannel);
  auto g_rng = RandomStream::derive(cfg.base_seed, trial_index, StreamPurpose::RelayDestChannel);
  const auto h_pdp = cfg.source_relay_pdp();
  const auto g_pdp = cfg.relay_dest_pdp();

  TrialChannels out;
  out.h.reserve(static_cast<std::size_t>(cfg.n_r));
  for (int i = 0; i < cfg.n_r; ++i)
    out.h.push_back(channel::draw_channel(h_pdp, h_rng));
  out.g.resize(static_cast<std::size_t>(cfg.n_r));
  for (auto& row : out.g)
    for (int j = 0; j < cfg.n_d; ++j)
      row.push_back(channel::draw_channel(g_pdp, g_rng));
  return out;
}

namespace {

std::vector<Index> consecutive_indices(int count) {
  std::vector<Index> idx(static_cast<std::size_t>(std::max(count, 0)));
  for (std::size_t p = 0; p < idx.size(); ++p)
    idx[p] = static_cast<Index>(p) + 1;
  return idx;
}

double link_snr(double power, double noise_var) {
  return noise_var > 0.0 ? power / noise_var : std::numeric_limits<double>::infinity();
}

struct DestinationFilter {
  power::Allocation alpha;
  mmse::FeedforwardTaps w;
  mmse::FeedbackTaps fb;
  bool converged = true;
  int iterations = 0;
};

DestinationFilter design_destination(const SimConfig& cfg, const power::MimoResponse& g,
                                     double snr_hat) {
  const auto indices =
      cfg.scheme == Scheme::FdeDfe ? consecutive_indices(cfg.feedback_taps_dest()) : std::vector<Index>{};
  DestinationFilter out;
  if (cfg.power_alloc == PowerAllocation::Epa) {
    out.alpha = power::equal_allocation(cfg.n_r);
    const auto ch = power::effective_channel_dest(g, out.alpha, snr_hat);
    out.fb = indices.empty() ? mmse::FeedbackTaps::none() : mmse::optimal_feedback(ch, indices);
    out.w = mmse::ffe_taps(ch, out.fb);
    return out;
  }
  power::SolverOptions opts;
  opts.epsilon = cfg.epsilon;
  opts.max_iterations = cfg.max_iterations;
  auto state = indices.empty() ? power::optimize_fde(g, snr_hat, opts)
                               : power::optimize_fde_dfe(g, snr_hat, indices, opts);
  out.alpha = std::move(state.alpha);
  out.w = std::move(state.w);
  out.fb = std::move(state.fb);
  out.converged = state.converged;
  out.iterations = state.iterations;
  return out;
}

} // namespace

TrialResult simulate_link(const SimConfig& cfg, const TrialChannels& channels, double relay_noise_var,
                          double dest_noise_var, std::uint64_t trial_index) {
  const Index m = cfg.m;
  if (static_cast<int>(channels.h.size()) != cfg.n_r || static_cast<int>(channels.g.size()) != cfg.n_r)
    throw InvalidConfig("n_r", "channel set does not match the relay antenna count");

  auto bit_rng = RandomStream::derive(cfg.base_seed, trial_index, StreamPurpose::SourceBits);
  auto relay_noise = RandomStream::derive(cfg.base_seed, trial_index, StreamPurpose::RelayNoise);
  auto dest_noise = RandomStream::derive(cfg.base_seed, trial_index, StreamPurpose::DestNoise);

  modem::BitBlock bits(static_cast<std::size_t>(2 * m));
  for (auto& b : bits)
    b = static_cast<std::uint8_t>(bit_rng.bit());
  const auto source = modem::modulate(bits, cfg.p_s);

  // Phase 1: source -> relay antennas.
  mmse::EffectiveChannel h_eff{CMatrix(m, cfg.n_r), link_snr(cfg.p_s, relay_noise_var)};
  CMatrix relay_rx(m, cfg.n_r);
  for (int i = 0; i < cfg.n_r; ++i) {
    const auto& taps = channels.h[static_cast<std::size_t>(i)];
    h_eff.u.col(i) = channel::freq_response(taps, m);
    relay_rx.col(i) =
        spectral::dft(channel::transmit_over_channel(source.symbols, taps, cfg.l_cp, relay_noise_var, relay_noise));
  }
  const auto relay_idx =
      cfg.scheme == Scheme::FdeDfe ? consecutive_indices(cfg.feedback_taps_relay()) : std::vector<Index>{};
  const auto relay_fb = relay_idx.empty() ? mmse::FeedbackTaps::none() : mmse::optimal_feedback(h_eff, relay_idx);
  const auto relay_w = mmse::ffe_taps(h_eff, relay_fb);
  const auto relay_out = mmse::equalize(relay_rx, relay_w, relay_fb, cfg.p_s, cfg.feedback_mode, source);
  const auto relay_bits = modem::demodulate(relay_out.decisions);

  // Phase 2: relay re-modulates its decisions at P_R and forwards.
  const auto forwarded = modem::modulate(relay_bits, cfg.p_r);
  const auto g = power::MimoResponse::from_taps(channels.g, m);
  const auto dest = design_destination(cfg, g, link_snr(cfg.p_r, dest_noise_var));

  CMatrix dest_rx(m, cfg.n_d);
  for (int j = 0; j < cfg.n_d; ++j) {
    // All relay antennas send the same block, so the per-antenna channels
    // superpose into one weighted tap vector.
    channel::ChannelTaps combined = channel::ChannelTaps::Zero(cfg.l_g);
    for (int i = 0; i < cfg.n_r; ++i)
      combined += dest.alpha[i] * channels.g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    dest_rx.col(j) =
        spectral::dft(channel::transmit_over_channel(forwarded.symbols, combined, cfg.l_cp, dest_noise_var, dest_noise));
  }
  const auto dest_out = mmse::equalize(dest_rx, dest.w, dest.fb, cfg.p_r, cfg.feedback_mode, forwarded);
  const auto dest_bits = modem::demodulate(dest_out.decisions);

  TrialResult result;
  result.bits = static_cast<std::int64_t>(bits.size());
  result.relay_bit_errors = modem::count_bit_errors(relay_bits, bits);
  result.e2e_bit_errors = modem::count_bit_errors(dest_bits, bits);
  result.opa_converged = dest.converged;
  result.opa_iterations = dest.iterations;
  return result;
}

TrialResult run_trial(const SimConfig& cfg, double snr_db, std::uint64_t trial_index) {
  cfg.validate();
  const double noise = noise_variance(cfg, snr_db);
  return simulate_link(cfg, draw_trial_channels(cfg, trial_index), noise, noise, trial_index);
}

BerRecord aggregate(const SimConfig& cfg, double snr_db, const std::vector<TrialResult>& trials) {
  BerRecord rec;
  rec.scheme = cfg.scheme;
  rec.power_alloc = cfg.power_alloc;
  rec.n_r = cfg.n_r;
  rec.n_d = cfg.n_d;
  rec.l_h = cfg.l_h;
  rec.l_g = cfg.l_g;
  rec.sigma_t = cfg.sigma_t;
  rec.snr_db = snr_db;
  rec.trials = static_cast<int>(trials.size());
  for (const auto& t : trials) {
    rec.bits += t.bits;
    rec.bit_errors += t.e2e_bit_errors;
    rec.relay_bit_errors += t.relay_bit_errors;
    rec.opa_nonconvergence_count += t.opa_converged ? 0 : 1;
  }
  if (rec.bits == 0)
    throw InvalidConfig("trials", "no bits simulated");
  rec.ber = static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits);
  rec.ci95_halfwidth = 1.96 * std::sqrt(rec.ber * (1.0 - rec.ber) / static_cast<double>(rec.bits));
  return rec;
}

std::vector<BerRecord> run_sweep(const SimConfig& cfg, int threads) {
  cfg.validate();
  const std::size_t n_snr = cfg.snr_db_grid.size();
  const auto n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_jobs = n_snr * n_trials;
  std::vector<TrialResult> results(n_jobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      try {
        const std::size_t snr_idx = job / n_trials;
        const std::size_t trial = job % n_trials;
        results[job] = run_trial(cfg, cfg.snr_db_grid[snr_idx], trial);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = n_jobs;
      }
    }
  };

  const auto n_workers = static_cast<std::size_t>(std::clamp<long>(threads, 1, static_cast<long>(n_jobs)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n_workers; ++k)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  std::vector<BerRecord> records;
  records.reserve(n_snr);
  for (std::size_t s = 0; s < n_snr; ++s) {
    const std::vector<TrialResult> slice(results.begin() + static_cast<std::ptrdiff_t>(s * n_trials),
                                         results.begin() + static_cast<std::ptrdiff_t>((s + 1) * n_trials));
    records.push_back(aggregate(cfg, cfg.snr_db_grid[s], slice));
  }
  return records;
}

} // namespace dfrelay::sim
