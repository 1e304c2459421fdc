#pragma once

// Experiment configuration (JSON).  Every key is optional and defaults to the
// reference system: 8x8 antennas, 2 RF chains, 8x8 DD grid, 10 paths with
// delay taps <= 5 and Doppler taps <= 1, 64-QAM.  Unknown keys are rejected.

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "otfs_sc/link_sim.hpp"

namespace otfs_sc {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SweepKind { Snr, Antennas, Single };

inline std::string to_string(SweepKind k) {
  switch (k) {
  case SweepKind::Snr: return "snr";
  case SweepKind::Antennas: return "antennas";
  case SweepKind::Single: return "single";
  }
  return "single";
}

struct ExperimentConfig {
  SimConfig sim;
  SweepKind sweep = SweepKind::Snr;
  std::vector<double> snr_grid_db{-6.0, 0.0, 6.0, 12.0, 18.0};
  std::vector<Index> n_tx_grid{4, 6, 8, 10, 12, 14, 16};
  Index trials = 10;
  std::string output = "results.csv";

  // recorded with the experiment, not used by the simulator
  double carrier_frequency_hz = 28e9;
  double subcarrier_spacing_hz = 120e3;
  double max_velocity_kmh = 500.0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const {
    try {
      sim.validate();
    } catch (const ValidationError &e) {
      throw ConfigError(std::string("invalid config: ") + e.what());
    }
    auto require = [](bool ok, const std::string &what) {
      if (!ok) throw ConfigError("invalid config: " + what);
    };
    require(trials >= 1, "trials >= 1");
    require(!snr_grid_db.empty(), "snr_grid_db must not be empty");
    for (double s : snr_grid_db) require(!std::isnan(s) && s > -std::numeric_limits<double>::infinity(),
                                         "snr_grid_db entries must be numbers or \"inf\"");
    require(!n_tx_grid.empty(), "n_tx_grid must not be empty");
    for (Index n : n_tx_grid) require(n >= sim.n_rf, "n_tx_grid entries >= n_rf");
    require(carrier_frequency_hz > 0.0, "carrier_frequency_hz > 0");
    require(subcarrier_spacing_hz > 0.0, "subcarrier_spacing_hz > 0");
    require(max_velocity_kmh >= 0.0, "max_velocity_kmh >= 0");
  }
};

namespace detail {

inline double json_snr(const nlohmann::json &v, const std::string &field) {
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "+inf"))
    return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw ConfigError("field '" + field + "': expected a number or \"inf\"");
  return v.get<double>();
}

inline Index json_count(const nlohmann::json &v, const std::string &field) {
  if (!v.is_number_integer()) throw ConfigError("field '" + field + "': expected an integer");
  return v.get<Index>();
}

inline double json_real(const nlohmann::json &v, const std::string &field) {
  if (!v.is_number()) throw ConfigError("field '" + field + "': expected a number");
  return v.get<double>();
}

inline std::string json_text(const nlohmann::json &v, const std::string &field) {
  if (!v.is_string()) throw ConfigError("field '" + field + "': expected a string");
  return v.get<std::string>();
}

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json &j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  SimConfig &s = cfg.sim;
  for (const auto &[key, v] : j.items()) {
    try {
      if (key == "n_tx") s.n_tx = detail::json_count(v, key);
      else if (key == "n_rx") s.n_rx = detail::json_count(v, key);
      else if (key == "n_rf") s.n_rf = detail::json_count(v, key);
      else if (key == "m_delay") s.m_delay = detail::json_count(v, key);
      else if (key == "n_doppler") s.n_doppler = detail::json_count(v, key);
      else if (key == "n_frames") s.n_frames = detail::json_count(v, key);
      else if (key == "paths") s.paths = detail::json_count(v, key);
      else if (key == "max_delay_tap") s.max_delay_tap = static_cast<int>(detail::json_count(v, key));
      else if (key == "max_doppler_tap") s.max_doppler_tap = static_cast<int>(detail::json_count(v, key));
      else if (key == "snr_db") s.snr_db = detail::json_snr(v, key);
      else if (key == "precoder_mode") s.precoder_mode = precoder_mode_from_string(detail::json_text(v, key));
      else if (key == "allocation_mode") s.allocation_mode = allocation_mode_from_string(detail::json_text(v, key));
      else if (key == "seed") {
        if (!v.is_number_unsigned()) throw ConfigError("field 'seed': expected a non-negative integer");
        s.seed = v.get<std::uint64_t>();
      } else if (key == "importance_sigma") s.importance_sigma = detail::json_real(v, key);
      else if (key == "min_gain") s.min_gain = detail::json_real(v, key);
      else if (key == "sweep") {
        const std::string kind = detail::json_text(v, key);
        if (kind == "snr") cfg.sweep = SweepKind::Snr;
        else if (kind == "antennas") cfg.sweep = SweepKind::Antennas;
        else if (kind == "single") cfg.sweep = SweepKind::Single;
        else throw ConfigError("field 'sweep': expected snr, antennas or single, got '" + kind + "'");
      } else if (key == "snr_grid_db") {
        if (!v.is_array()) throw ConfigError("field 'snr_grid_db': expected an array");
        cfg.snr_grid_db.clear();
        for (const auto &e : v) cfg.snr_grid_db.push_back(detail::json_snr(e, key));
      } else if (key == "n_tx_grid") {
        if (!v.is_array()) throw ConfigError("field 'n_tx_grid': expected an array");
        cfg.n_tx_grid.clear();
        for (const auto &e : v) cfg.n_tx_grid.push_back(detail::json_count(e, key));
      } else if (key == "trials") cfg.trials = detail::json_count(v, key);
      else if (key == "output") cfg.output = detail::json_text(v, key);
      else if (key == "carrier_frequency_hz") cfg.carrier_frequency_hz = detail::json_real(v, key);
      else if (key == "subcarrier_spacing_hz") cfg.subcarrier_spacing_hz = detail::json_real(v, key);
      else if (key == "max_velocity_kmh") cfg.max_velocity_kmh = detail::json_real(v, key);
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ValidationError &e) {
      throw ConfigError("field '" + key + "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError("config parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig parse_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str());
}

} // namespace otfs_sc
