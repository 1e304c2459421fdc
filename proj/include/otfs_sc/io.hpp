#pragma once

// File formats: channel / importance / permutation JSON fixtures,
// constellation and sweep CSV, and atomic file output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "otfs_sc/channel.hpp"
#include "otfs_sc/link_sim.hpp"
#include "otfs_sc/modem.hpp"
#include "otfs_sc/semantic_alloc.hpp"

namespace otfs_sc {

inline constexpr const char *kVersion = "0.1.0";

// ---- channel realization --------------------------------------------------

inline nlohmann::json channel_to_json(const DdMimoChannel &c) {
  nlohmann::json paths = nlohmann::json::array();
  for (const auto &p : c.paths) {
    paths.push_back({{"gain_re", p.gain.real()},
                     {"gain_im", p.gain.imag()},
                     {"delay_tap", p.delay_tap},
                     {"doppler_tap", p.doppler_tap},
                     {"aod", p.aod},
                     {"aoa", p.aoa}});
  }
  return {{"n_tx", c.n_tx}, {"n_rx", c.n_rx}, {"m_delay", c.m_delay}, {"n_doppler", c.n_doppler}, {"paths", paths}};
}

inline DdMimoChannel channel_from_json(const nlohmann::json &j) {
  DdMimoChannel c;
  try {
    c.n_tx = j.at("n_tx").get<Index>();
    c.n_rx = j.at("n_rx").get<Index>();
    c.m_delay = j.at("m_delay").get<Index>();
    c.n_doppler = j.at("n_doppler").get<Index>();
    for (const auto &p : j.at("paths")) {
      PathParams path;
      path.gain = Complex(p.at("gain_re").get<double>(), p.at("gain_im").get<double>());
      path.delay_tap = p.at("delay_tap").get<int>();
      path.doppler_tap = p.at("doppler_tap").get<int>();
      path.aod = p.at("aod").get<double>();
      path.aoa = p.at("aoa").get<double>();
      c.paths.push_back(path);
    }
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("channel json: ") + e.what());
  }
  c.validate();
  return c;
}

// ---- allocation fixtures ---------------------------------------------------

inline nlohmann::json importance_to_json(const ImportanceVector &w) { return {{"importance", w.w}}; }

inline ImportanceVector importance_from_json(const nlohmann::json &j) {
  ImportanceVector w;
  try {
    w.w = j.at("importance").get<std::vector<double>>();
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("importance json: ") + e.what());
  }
  w.validate();
  return w;
}

inline nlohmann::json permutation_to_json(const AllocationPermutation &p) { return {{"permutation", p.pi}}; }

inline AllocationPermutation permutation_from_json(const nlohmann::json &j) {
  AllocationPermutation p;
  try {
    p.pi = j.at("permutation").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception &e) {
    throw ValidationError(std::string("permutation json: ") + e.what());
  }
  p.validate();
  return p;
}

// ---- CSV -------------------------------------------------------------------

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// label,re,im with full round-trip precision.
inline std::string constellation_csv(const Constellation &c = default_constellation()) {
  std::ostringstream os;
  os << "label,re,im\n";
  char buf[96];
  for (int label = 0; label < kQamOrder; ++label) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", label, c.point(label).real(), c.point(label).imag());
    os << buf;
  }
  return os.str();
}

inline const char *kSweepCsvHeader =
    "snr_db,n_tx,n_rx,n_rf,mode,trials,ser,mse,weighted_mse,kappa_exact,kappa_soft,gamma_max,gamma_min";

/// Versioned comment line, header row, one row per grid point.
inline std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::ostringstream os;
  os << "# otfs_sc " << kVersion << "\n" << kSweepCsvHeader << "\n";
  for (const auto &r : rows) {
    os << format_number(r.snr_db) << ',' << r.n_tx << ',' << r.n_rx << ',' << r.n_rf << ',' << to_string(r.mode)
       << ',' << r.trials << ',' << format_number(r.ser) << ',' << format_number(r.mse) << ','
       << format_number(r.weighted_mse) << ',' << format_number(r.kappa_exact) << ','
       << format_number(r.kappa_soft) << ',' << format_number(r.gamma_max) << ',' << format_number(r.gamma_min)
       << '\n';
  }
  return os.str();
}

/// Write via a sibling temporary and rename, so readers never see a partial file.
inline void atomic_write_file(const std::filesystem::path &path, const std::string &content) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename output into '" + path.string() + "'");
  }
}

} // namespace otfs_sc
