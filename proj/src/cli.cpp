#include "dfrelay/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfrelay/config.hpp"
#include "dfrelay/link_sim.hpp"
#include "dfrelay/power_alloc.hpp"
#include "dfrelay/report.hpp"
#include "dfrelay/selftest.hpp"

namespace dfrelay::cli {

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> overrides;
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

struct KktArgs {
  int draws = 100;
  double threshold = 1e-4;
  double solver_epsilon = 1e-6;
  double constraint_tolerance = 1e-8;
  double max_nonconverged_fraction = 0.05;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat JSON file with SimConfig fields");
  cmd->add_option("--out", args.out_path, "output path (stdout when omitted)");
  cmd->add_option("--override", args.overrides, "KEY=VALUE, applied after the config file")
      ->allow_extra_args(false);
  cmd->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "base seed");
}

sim::SimConfig build_config(const CommonArgs& args, std::optional<config::Preset> preset) {
  sim::SimConfig cfg;
  if (preset)
    config::apply_preset_defaults(cfg, *preset);
  if (!args.config_path.empty())
    config::apply_file(cfg, args.config_path);
  for (const auto& assignment : args.overrides)
    config::apply_override(cfg, assignment);
  if (args.seed)
    cfg.base_seed = *args.seed;
  return cfg;
}

void emit_csv(const CommonArgs& args, const std::vector<sim::BerRecord>& records, std::ostream& out) {
  if (args.out_path.empty() || args.out_path == "-")
    report::write_csv(out, records);
  else
    report::write_csv_file(args.out_path, records);
}

int run_sweep(const CommonArgs& args, std::optional<config::Preset> preset, std::ostream& out) {
  const sim::SimConfig base = build_config(args, preset);
  std::vector<sim::SimConfig> configs =
      preset ? config::expand_preset(base, *preset) : std::vector<sim::SimConfig>{base};
  for (const auto& cfg : configs)
    cfg.validate();

  std::vector<sim::BerRecord> records;
  for (const auto& cfg : configs) {
    auto part = sim::run_sweep(cfg, args.threads);
    records.insert(records.end(), part.begin(), part.end());
  }
  emit_csv(args, records, out);
  return kSuccess;
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

int run_kkt_check(const CommonArgs& args, const KktArgs& kkt, std::ostream& out) {
  sim::SimConfig cfg = build_config(args, std::nullopt);
  cfg.validate();
  if (kkt.draws < 1)
    throw InvalidConfig("draws", "must be >= 1");
  const double snr_hat = std::pow(10.0, cfg.snr_db_grid.front() / 10.0);
  std::vector<Index> indices;
  for (int k = 1; k <= cfg.feedback_taps_dest(); ++k)
    indices.push_back(k);

  power::SolverOptions opts;
  opts.epsilon = kkt.solver_epsilon;
  opts.max_iterations = cfg.max_iterations;

  std::ostringstream report;
  int nonconverged[2] = {0, 0};
  double worst_residual = 0.0;
  double worst_constraint = 0.0;
  for (int d = 0; d < kkt.draws; ++d) {
    const auto channels = sim::draw_trial_channels(cfg, static_cast<std::uint64_t>(d));
    const auto g = power::MimoResponse::from_taps(channels.g, cfg.m);
    report << "draw " << d;
    for (int s = 0; s < 2; ++s) {
      const auto state = s == 0 ? power::optimize_fde(g, snr_hat, opts)
                                : power::optimize_fde_dfe(g, snr_hat, indices, opts);
      const double residual = power::kkt_residual(g, state, snr_hat);
      const double constraint = std::abs(state.alpha.squaredNorm() - 1.0);
      report << (s == 0 ? "  fde" : "  fde_dfe") << " iterations=" << state.iterations
             << " converged=" << (state.converged ? "yes" : "no") << " residual=" << sci(residual)
             << " constraint=" << sci(constraint);
      if (!state.converged) {
        ++nonconverged[s];
        continue;
      }
      worst_residual = std::max(worst_residual, residual);
      worst_constraint = std::max(worst_constraint, constraint);
    }
    report << '\n';
  }
  out << report.str();

  const int allowed = static_cast<int>(kkt.max_nonconverged_fraction * kkt.draws);
  const bool ok = worst_residual <= kkt.threshold && worst_constraint <= kkt.constraint_tolerance &&
                  nonconverged[0] <= allowed && nonconverged[1] <= allowed;
  out << "max residual " << sci(worst_residual) << " (threshold " << sci(kkt.threshold) << ")\n"
      << "max constraint violation " << sci(worst_constraint) << '\n'
      << "nonconverged fde " << nonconverged[0] << ", fde_dfe " << nonconverged[1] << " of "
      << kkt.draws << '\n'
      << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kSuccess : kVerificationFailure;
}

int run_selftest(bool corrupt_dft_sign, std::optional<std::uint64_t> seed, std::ostream& out,
                 std::ostream& err) {
  selftest::Options opts;
  opts.corrupt_dft_sign = corrupt_dft_sign;
  if (seed)
    opts.seed = *seed;
  bool ok = true;
  for (const auto& check : selftest::run(opts)) {
    out << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
    if (!check.passed) {
      err << "selftest: invariant '" << check.name << "' failed\n";
      ok = false;
    }
  }
  return ok ? kSuccess : kVerificationFailure;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decode-and-forward SC-FDE relay link simulator"};
  app.require_subcommand(1);

  CommonArgs common;
  KktArgs kkt;
  bool corrupt_dft_sign = false;

  auto* sweep = app.add_subcommand("sweep", "BER sweep over the configured SNR grid");
  add_common(sweep, common);
  auto* kkt_check = app.add_subcommand("kkt-check", "certify the power-allocation solvers on random draws");
  add_common(kkt_check, common);
  kkt_check->add_option("--draws", kkt.draws, "number of channel draws");
  kkt_check->add_option("--threshold", kkt.threshold, "maximum accepted KKT residual");
  kkt_check->add_option("--solver-epsilon", kkt.solver_epsilon, "fixed-point convergence threshold");
  auto* self = app.add_subcommand("selftest", "run the oracle and invariant checks");
  self->add_option("--seed", common.seed, "seed for the random instances");
  self->add_flag("--corrupt-dft-sign", corrupt_dft_sign, "negative control")->group("");
  std::vector<std::pair<CLI::App*, config::Preset>> presets;
  for (const auto& [name, preset] : {std::pair{"fig2", config::Preset::Fig2},
                                     std::pair{"fig3", config::Preset::Fig3},
                                     std::pair{"fig4", config::Preset::Fig4}}) {
    auto* cmd = app.add_subcommand(name, std::string("BER sweep with the ") + name + " parameterisation");
    add_common(cmd, common);
    presets.emplace_back(cmd, preset);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*sweep)
      return run_sweep(common, std::nullopt, out);
    if (*kkt_check)
      return run_kkt_check(common, kkt, out);
    if (*self)
      return run_selftest(corrupt_dft_sign, common.seed, out, err);
    for (const auto& [cmd, preset] : presets)
      if (*cmd)
        return run_sweep(common, preset, out);
  } catch (const InvalidConfig& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const report::IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::ios_base::failure& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailure;
  }
  return kConfigError;
}

} // namespace dfrelay::cli
