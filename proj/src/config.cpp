#include "dfrelay/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dfrelay::config {

using nlohmann::json;

namespace {

template <typename T>
T get_number(const std::string& key, const json& value) {
  if (!value.is_number())
    throw InvalidConfig(key, "expected a number, got " + value.dump());
  if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer() && !value.is_number_unsigned()) {
      const double d = value.get<double>();
      if (std::floor(d) != d)
        throw InvalidConfig(key, "expected an integer, got " + value.dump());
      return static_cast<T>(d);
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (value.is_number_integer() && value.get<std::int64_t>() < 0)
        throw InvalidConfig(key, "expected a non-negative integer");
    }
  }
  return value.get<T>();
}

std::string get_string(const std::string& key, const json& value) {
  if (!value.is_string())
    throw InvalidConfig(key, "expected a string, got " + value.dump());
  return value.get<std::string>();
}

bool get_bool(const std::string& key, const json& value) {
  if (!value.is_boolean())
    throw InvalidConfig(key, "expected true or false, got " + value.dump());
  return value.get<bool>();
}

std::vector<double> get_grid(const std::string& key, const json& value) {
  if (value.is_number())
    return {value.get<double>()};
  if (!value.is_array())
    throw InvalidConfig(key, "expected a list of numbers, got " + value.dump());
  std::vector<double> out;
  for (const auto& v : value)
    out.push_back(get_number<double>(key, v));
  return out;
}

std::optional<int> get_optional_int(const std::string& key, const json& value) {
  if (value.is_null())
    return std::nullopt;
  return get_number<int>(key, value);
}

void apply_key(sim::SimConfig& cfg, const std::string& key, const json& value) {
  if (key == "m")
    cfg.m = get_number<Index>(key, value);
  else if (key == "l_cp")
    cfg.l_cp = get_number<int>(key, value);
  else if (key == "n_r")
    cfg.n_r = get_number<int>(key, value);
  else if (key == "n_d")
    cfg.n_d = get_number<int>(key, value);
  else if (key == "l_h")
    cfg.l_h = get_number<int>(key, value);
  else if (key == "l_g")
    cfg.l_g = get_number<int>(key, value);
  else if (key == "sigma_t")
    cfg.sigma_t = get_number<double>(key, value);
  else if (key == "p_s")
    cfg.p_s = get_number<double>(key, value);
  else if (key == "p_r")
    cfg.p_r = get_number<double>(key, value);
  else if (key == "snr_db_grid")
    cfg.snr_db_grid = get_grid(key, value);
  else if (key == "scheme")
    cfg.scheme = sim::parse_scheme(get_string(key, value));
  else if (key == "power_alloc")
    cfg.power_alloc = sim::parse_power_allocation(get_string(key, value));
  else if (key == "feedback_mode")
    cfg.feedback_mode = sim::parse_feedback_mode(get_string(key, value));
  else if (key == "b_h")
    cfg.b_h = get_optional_int(key, value);
  else if (key == "b_g")
    cfg.b_g = get_optional_int(key, value);
  else if (key == "epsilon")
    cfg.epsilon = get_number<double>(key, value);
  else if (key == "max_iterations")
    cfg.max_iterations = get_number<int>(key, value);
  else if (key == "trials")
    cfg.trials = get_number<int>(key, value);
  else if (key == "base_seed")
    cfg.base_seed = get_number<std::uint64_t>(key, value);
  else if (key == "normalize_pdp")
    cfg.normalize_pdp = get_bool(key, value);
  else
    throw InvalidConfig(key, "unknown configuration key");
}

} // namespace

void apply_json(sim::SimConfig& cfg, const json& obj) {
  if (!obj.is_object())
    throw InvalidConfig("config must be a flat JSON object");
  for (const auto& [key, value] : obj.items())
    apply_key(cfg, key, value);
}

void apply_file(sim::SimConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::ios_base::failure("cannot open config file " + path);
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidConfig(std::string("config file ") + path + " is not valid JSON: " + e.what());
  }
  apply_json(cfg, obj);
}

void apply_override(sim::SimConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InvalidConfig(assignment, "override must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded())
    value = text;
  apply_key(cfg, key, value);
}

json to_json(const sim::SimConfig& cfg) {
  json out;
  out["m"] = cfg.m;
  out["l_cp"] = cfg.l_cp;
  out["n_r"] = cfg.n_r;
  out["n_d"] = cfg.n_d;
  out["l_h"] = cfg.l_h;
  out["l_g"] = cfg.l_g;
  out["sigma_t"] = cfg.sigma_t;
  out["p_s"] = cfg.p_s;
  out["p_r"] = cfg.p_r;
  out["snr_db_grid"] = cfg.snr_db_grid;
  out["scheme"] = sim::to_string(cfg.scheme);
  out["power_alloc"] = sim::to_string(cfg.power_alloc);
  out["feedback_mode"] = sim::to_string(cfg.feedback_mode);
  out["b_h"] = cfg.b_h ? json(*cfg.b_h) : json(nullptr);
  out["b_g"] = cfg.b_g ? json(*cfg.b_g) : json(nullptr);
  out["epsilon"] = cfg.epsilon;
  out["max_iterations"] = cfg.max_iterations;
  out["trials"] = cfg.trials;
  out["base_seed"] = cfg.base_seed;
  out["normalize_pdp"] = cfg.normalize_pdp;
  return out;
}

Preset parse_preset(const std::string& name) {
  if (name == "fig2")
    return Preset::Fig2;
  if (name == "fig3")
    return Preset::Fig3;
  if (name == "fig4")
    return Preset::Fig4;
  throw InvalidConfig("preset", "unknown preset '" + name + "'");
}

namespace {

std::vector<double> snr_range(double lo, double hi, double step) {
  std::vector<double> grid;
  for (int k = 0; lo + k * step <= hi + 1e-9; ++k)
    grid.push_back(lo + k * step);
  return grid;
}

} // namespace

void apply_preset_defaults(sim::SimConfig& cfg, Preset preset) {
  // ~10^6 bits per point at M = 512
  cfg.trials = 1000;
  switch (preset) {
  case Preset::Fig2:
  case Preset::Fig3:
    cfg.sigma_t = 2.0;
    cfg.l_h = cfg.l_g = 3;
    cfg.snr_db_grid = snr_range(0.0, 20.0, 2.0);
    break;
  case Preset::Fig4:
    cfg.l_h = cfg.l_g = 21;
    cfg.l_cp = 20;
    cfg.n_r = cfg.n_d = 3;
    cfg.snr_db_grid = {10.0};
    break;
  }
}

std::vector<sim::SimConfig> expand_preset(const sim::SimConfig& base, Preset preset) {
  std::vector<sim::SimConfig> out;
  const auto with = [&](auto&& mutate) {
    sim::SimConfig cfg = base;
    mutate(cfg);
    out.push_back(cfg);
  };
  constexpr std::array schemes{sim::Scheme::Fde, sim::Scheme::FdeDfe};
  constexpr std::array allocations{sim::PowerAllocation::Epa, sim::PowerAllocation::Opa};

  switch (preset) {
  case Preset::Fig2: {
    constexpr std::array<std::pair<int, int>, 7> antennas{
        {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}, {3, 3}}};
    for (const auto& [n_r, n_d] : antennas)
      with([&](sim::SimConfig& c) {
        c.n_r = n_r;
        c.n_d = n_d;
        c.scheme = sim::Scheme::Fde;
        c.power_alloc = sim::PowerAllocation::Epa;
      });
    break;
  }
  case Preset::Fig3:
    for (const int n : {1, 2, 3})
      for (const auto scheme : schemes)
        for (const auto alloc : allocations)
          with([&](sim::SimConfig& c) {
            c.n_r = c.n_d = n;
            c.scheme = scheme;
            c.power_alloc = alloc;
          });
    break;
  case Preset::Fig4:
    for (const auto scheme : schemes)
      for (const auto alloc : allocations)
        for (int k = 1; k <= 8; ++k)
          with([&](sim::SimConfig& c) {
            c.sigma_t = 0.5 * k;
            c.scheme = scheme;
            c.power_alloc = alloc;
          });
    break;
  }
  return out;
}

} // namespace dfrelay::config
