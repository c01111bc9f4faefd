#include <doctest.h>

#include <cmath>
#include <limits>

#include "dfrelay/link_sim.hpp"

using namespace dfrelay;
using namespace dfrelay::sim;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.m = 64;
  cfg.l_cp = 4;
  cfg.trials = 20;
  cfg.snr_db_grid = {6.0};
  return cfg;
}

TrialChannels unit_channels(int n_r, int n_d) {
  TrialChannels ch;
  for (int i = 0; i < n_r; ++i) {
    ch.h.push_back(channel::ChannelTaps::Ones(1));
    ch.g.emplace_back(static_cast<std::size_t>(n_d), channel::ChannelTaps::Ones(1));
  }
  return ch;
}

} // namespace

TEST_CASE("configuration validation names the offending field") {
  const auto key_of = [](SimConfig cfg) {
    try {
      cfg.validate();
    } catch (const InvalidConfig& e) {
      return e.key();
    }
    return std::string{};
  };
  CHECK(key_of(SimConfig{}).empty());
  SimConfig cfg;
  cfg.m = 500;
  CHECK(key_of(cfg) == "m");
  cfg = {};
  cfg.l_h = 25;
  CHECK(key_of(cfg) == "l_cp");
  cfg = {};
  cfg.b_g = 3;
  CHECK(key_of(cfg) == "b_g");
  cfg = {};
  cfg.trials = 0;
  CHECK(key_of(cfg) == "trials");
  cfg = {};
  cfg.snr_db_grid.clear();
  CHECK(key_of(cfg) == "snr_db_grid");
  cfg = {};
  cfg.n_r = 0;
  CHECK(key_of(cfg) == "n_r");

  CHECK_THROWS_AS(parse_scheme("dfe"), InvalidConfig);
  CHECK(parse_feedback_mode(to_string(mmse::FeedbackMode::ZeroPrefix)) == mmse::FeedbackMode::ZeroPrefix);
  CHECK(parse_power_allocation("opa") == PowerAllocation::Opa);
}

TEST_CASE("feedback lengths default to channel length minus one") {
  SimConfig cfg;
  cfg.l_h = 5;
  cfg.l_g = 3;
  cfg.l_cp = 4;
  CHECK(cfg.feedback_taps_relay() == 4);
  CHECK(cfg.feedback_taps_dest() == 2);
  cfg.b_h = 1;
  CHECK(cfg.feedback_taps_relay() == 1);
}

TEST_CASE("noise variance follows the SNR definition") {
  SimConfig cfg;
  CHECK(noise_variance(cfg, 0.0) == doctest::Approx(1.0));
  CHECK(noise_variance(cfg, 10.0) == doctest::Approx(0.1));
  cfg.p_s = 2.0;
  CHECK(noise_variance(cfg, 3.0) == doctest::Approx(2.0 / std::pow(10.0, 0.3)));
  CHECK(noise_variance(cfg, std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("noiseless unit channels give a perfect link") {
  for (const auto scheme : {Scheme::Fde, Scheme::FdeDfe})
    for (const auto alloc : {PowerAllocation::Epa, PowerAllocation::Opa}) {
      SimConfig cfg = small_config();
      cfg.n_r = 1;
      cfg.n_d = 1;
      cfg.l_h = cfg.l_g = 1;
      cfg.scheme = scheme;
      cfg.power_alloc = alloc;
      const auto r = simulate_link(cfg, unit_channels(1, 1), 0.0, 0.0, 3);
      CHECK(r.bits == 2 * cfg.m);
      CHECK(r.e2e_bit_errors == 0);
      CHECK(r.relay_bit_errors == 0);
    }

  SimConfig cfg = small_config();
  cfg.snr_db_grid = {std::numeric_limits<double>::infinity()};
  cfg.l_h = cfg.l_g = 1;
  const auto rec = run_sweep(cfg).front();
  CHECK(rec.bit_errors == 0);
  CHECK(rec.ber == 0.0);
}

TEST_CASE("noiseless multipath links are error free") {
  for (const auto scheme : {Scheme::Fde, Scheme::FdeDfe}) {
    SimConfig cfg = small_config();
    cfg.scheme = scheme;
    cfg.trials = 10;
    cfg.snr_db_grid = {std::numeric_limits<double>::infinity()};
    CHECK(run_sweep(cfg).front().bit_errors == 0);
  }
}

TEST_CASE("trials are reproducible") {
  SimConfig cfg = small_config();
  cfg.scheme = Scheme::FdeDfe;
  cfg.power_alloc = PowerAllocation::Opa;
  for (std::uint64_t t = 0; t < 5; ++t)
    CHECK(run_trial(cfg, 4.0, t) == run_trial(cfg, 4.0, t));

  SimConfig other = cfg;
  other.base_seed = 2;
  bool differs = false;
  for (std::uint64_t t = 0; t < 5; ++t)
    differs = differs || !(run_trial(cfg, 0.0, t) == run_trial(other, 0.0, t));
  CHECK(differs);
}

TEST_CASE("channel draws of different trials are independent") {
  const SimConfig cfg = small_config();
  const auto a = draw_trial_channels(cfg, 0);
  const auto b = draw_trial_channels(cfg, 1);
  CHECK(a.h.size() == 2);
  CHECK(a.g.size() == 2);
  CHECK(a.g[0].size() == 2);
  CHECK_FALSE(a.h[0] == b.h[0]);
  CHECK_FALSE(a.g[1][1] == b.g[1][1]);
  // source-relay and relay-destination streams do not coincide
  CHECK_FALSE(a.h[0] == a.g[0][0]);
}

TEST_CASE("sweep results do not depend on the thread count") {
  SimConfig cfg = small_config();
  cfg.snr_db_grid = {0.0, 4.0, 8.0};
  cfg.power_alloc = PowerAllocation::Opa;
  const auto one = run_sweep(cfg, 1);
  const auto four = run_sweep(cfg, 4);
  REQUIRE(one.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(one[k].bit_errors == four[k].bit_errors);
    CHECK(one[k].relay_bit_errors == four[k].relay_bit_errors);
    CHECK(one[k].snr_db == cfg.snr_db_grid[k]);
    CHECK(one[k].trials == cfg.trials);
    CHECK(one[k].bits == cfg.trials * cfg.bits_per_trial());
  }
}

TEST_CASE("noise-dominated link has BER near one half") {
  SimConfig cfg = small_config();
  cfg.m = 512;
  cfg.l_cp = 20;
  cfg.trials = 200;
  cfg.snr_db_grid = {-40.0};
  const auto rec = run_sweep(cfg).front();
  CHECK(std::abs(rec.ber - 0.5) <= rec.ci95_halfwidth);
}

TEST_CASE("noiseless second hop passes relay errors through unchanged") {
  for (const auto scheme : {Scheme::Fde, Scheme::FdeDfe}) {
    SimConfig cfg = small_config();
    cfg.scheme = scheme;
    std::int64_t relay_total = 0;
    for (std::uint64_t t = 0; t < 10; ++t) {
      const auto r = simulate_link(cfg, draw_trial_channels(cfg, t), noise_variance(cfg, 3.0), 0.0, t);
      CHECK(r.e2e_bit_errors == r.relay_bit_errors);
      relay_total += r.relay_bit_errors;
    }
    CHECK(relay_total > 0);
  }
}

TEST_CASE("BER record aggregation") {
  const SimConfig cfg = small_config();
  std::vector<TrialResult> trials(4);
  for (auto& t : trials) {
    t.bits = 1000;
    t.e2e_bit_errors = 25;
    t.relay_bit_errors = 10;
  }
  trials[2].opa_converged = false;
  const auto rec = aggregate(cfg, 6.0, trials);
  CHECK(rec.bits == 4000);
  CHECK(rec.bit_errors == 100);
  CHECK(rec.relay_bit_errors == 40);
  CHECK(rec.ber == doctest::Approx(0.025));
  CHECK(rec.ci95_halfwidth == doctest::Approx(1.96 * std::sqrt(0.025 * 0.975 / 4000.0)));
  CHECK(rec.opa_nonconvergence_count == 1);

  // CI shrinks as 1/sqrt(bits)
  std::vector<TrialResult> doubled = trials;
  doubled.insert(doubled.end(), trials.begin(), trials.end());
  const auto rec2 = aggregate(cfg, 6.0, doubled);
  CHECK(rec2.ci95_halfwidth / rec.ci95_halfwidth == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.1));
  doubled.insert(doubled.end(), doubled.begin(), doubled.end());
  CHECK(aggregate(cfg, 6.0, doubled).ci95_halfwidth / rec.ci95_halfwidth == doctest::Approx(0.5).epsilon(0.1));

  CHECK_THROWS_AS(aggregate(cfg, 6.0, {}), InvalidConfig);
  SimConfig none = cfg;
  none.trials = 0;
  CHECK_THROWS_AS(run_sweep(none), InvalidConfig);
}

TEST_CASE("opa trials report solver diagnostics") {
  SimConfig cfg = small_config();
  cfg.power_alloc = PowerAllocation::Opa;
  cfg.max_iterations = 1;
  cfg.epsilon = 1e-15;
  const auto r = run_trial(cfg, 10.0, 0);
  CHECK_FALSE(r.opa_converged);
  CHECK(r.opa_iterations == 1);
  CHECK(run_sweep(cfg).front().opa_nonconvergence_count == cfg.trials);
}
