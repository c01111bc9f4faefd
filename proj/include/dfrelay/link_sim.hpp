#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dfrelay/channel.hpp"
#include "dfrelay/mmse_fde.hpp"
#include "dfrelay/modem.hpp"

namespace dfrelay::sim {

enum class Scheme { Fde, FdeDfe };
enum class PowerAllocation { Epa, Opa };

std::string to_string(Scheme s);
std::string to_string(PowerAllocation p);
std::string to_string(mmse::FeedbackMode mode);
Scheme parse_scheme(const std::string& text);
PowerAllocation parse_power_allocation(const std::string& text);
mmse::FeedbackMode parse_feedback_mode(const std::string& text);

struct SimConfig {
  Index m = 512;
  int l_cp = 20;
  int n_r = 2;
  int n_d = 2;
  int l_h = 3;
  int l_g = 3;
  double sigma_t = 2.0;
  double p_s = 1.0;
  double p_r = 1.0;
  std::vector<double> snr_db_grid{0.0};
  Scheme scheme = Scheme::Fde;
  PowerAllocation power_alloc = PowerAllocation::Epa;
  mmse::FeedbackMode feedback_mode = mmse::FeedbackMode::DetectedTwoPass;
  std::optional<int> b_h; // defaults to l_h - 1
  std::optional<int> b_g; // defaults to l_g - 1
  double epsilon = 1e-3;
  int max_iterations = 500;
  int trials = 100;
  std::uint64_t base_seed = 1;
  bool normalize_pdp = false;

  // Throws InvalidConfig naming the first offending field.
  void validate() const;

  int feedback_taps_relay() const { return b_h.value_or(l_h - 1); }
  int feedback_taps_dest() const { return b_g.value_or(l_g - 1); }
  channel::PowerDelayProfile source_relay_pdp() const;
  channel::PowerDelayProfile relay_dest_pdp() const;
  std::int64_t bits_per_trial() const { return 2 * static_cast<std::int64_t>(m); }
};

// sigma_n^2 = P_S / 10^(snr_db / 10); +inf dB gives a noiseless link.
double noise_variance(const SimConfig& cfg, double snr_db);

struct TrialChannels {
  std::vector<channel::ChannelTaps> h;              // h[i]: source -> relay antenna i
  std::vector<std::vector<channel::ChannelTaps>> g; // g[i][j]: relay antenna i -> destination antenna j
};

struct TrialResult {
  std::int64_t e2e_bit_errors = 0;
  std::int64_t relay_bit_errors = 0;
  std::int64_t bits = 0;
  bool opa_converged = true;
  int opa_iterations = 0;

  bool operator==(const TrialResult&) const = default;
};

struct BerRecord {
  Scheme scheme = Scheme::Fde;
  PowerAllocation power_alloc = PowerAllocation::Epa;
  int n_r = 0;
  int n_d = 0;
  int l_h = 0;
  int l_g = 0;
  double sigma_t = 0.0;
  double snr_db = 0.0;
  int trials = 0;
  std::int64_t bits = 0;
  std::int64_t bit_errors = 0;
  std::int64_t relay_bit_errors = 0;
  double ber = 0.0;
  double ci95_halfwidth = 0.0;
  int opa_nonconvergence_count = 0;
};

TrialChannels draw_trial_channels(const SimConfig& cfg, std::uint64_t trial_index);

// Runs both hops on the given channels. Bits and noise come from the trial's
// derived streams, so the same (config, trial) reproduces the same draws.
TrialResult simulate_link(const SimConfig& cfg, const TrialChannels& channels, double relay_noise_var,
                          double dest_noise_var, std::uint64_t trial_index);

TrialResult run_trial(const SimConfig& cfg, double snr_db, std::uint64_t trial_index);

// Folds trial results into one record; ber = errors / bits and
// ci95 = 1.96 sqrt(ber (1 - ber) / bits).
BerRecord aggregate(const SimConfig& cfg, double snr_db, const std::vector<TrialResult>& trials);

// One record per grid point. Trials run on up to `threads` workers; the
// result does not depend on the worker count.
std::vector<BerRecord> run_sweep(const SimConfig& cfg, int threads = 1);

} // namespace dfrelay::sim
