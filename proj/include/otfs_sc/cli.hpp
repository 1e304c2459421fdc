#pragma once

// Subcommand bodies for the otfs_sc executable.  Each returns a process exit
// code and reports diagnostics on `log`.

#include <cstdlib>
#include <iostream>
#include <ostream>
#include <string>

#include "otfs_sc/config.hpp"
#include "otfs_sc/io.hpp"
#include "otfs_sc/link_sim.hpp"
#include "otfs_sc/validate.hpp"

namespace otfs_sc::cli {

enum class Verbosity { Quiet = 0, Info = 1, Debug = 2 };

/// OTFS_SC_LOG = quiet | info | debug (default info).
inline Verbosity verbosity_from_env() {
  const char *v = std::getenv("OTFS_SC_LOG");
  if (v == nullptr) return Verbosity::Info;
  const std::string s(v);
  if (s == "quiet" || s == "0") return Verbosity::Quiet;
  if (s == "debug" || s == "2") return Verbosity::Debug;
  return Verbosity::Info;
}

inline std::vector<SweepRow> run_experiment(const ExperimentConfig &cfg, std::ostream &log, Verbosity verbosity) {
  auto progress = [&](const char *what) {
    return [&log, verbosity, what](std::size_t done, std::size_t total) {
      if (verbosity >= Verbosity::Info) log << "[" << what << "] " << done << "/" << total << "\n";
    };
  };
  switch (cfg.sweep) {
  case SweepKind::Snr: return snr_sweep(cfg.sim, cfg.snr_grid_db, cfg.trials, progress("trial"));
  case SweepKind::Antennas: return antenna_sweep(cfg.sim, cfg.n_tx_grid, cfg.trials, progress("n_tx"));
  case SweepKind::Single: break;
  }
  return snr_sweep(cfg.sim, {cfg.sim.snr_db}, cfg.trials, progress("trial"));
}

inline int write_output(const std::string &path, const std::string &content, std::ostream &log) {
  if (path == "-") {
    std::cout << content;
    return 0;
  }
  try {
    atomic_write_file(path, content);
  } catch (const std::exception &e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

/// Run the configured grid and write CSV.
inline int cmd_sweep(const ExperimentConfig &cfg, std::ostream &log, Verbosity verbosity = Verbosity::Info) {
  std::vector<SweepRow> rows;
  try {
    cfg.validate();
    if (verbosity >= Verbosity::Debug)
      log << "sweep=" << to_string(cfg.sweep) << " trials=" << cfg.trials << " seed=" << cfg.sim.seed
          << " mode=" << to_string(cfg.sim.allocation_mode) << " precoder=" << to_string(cfg.sim.precoder_mode)
          << "\n";
    rows = run_experiment(cfg, log, verbosity);
  } catch (const std::exception &e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  const int rc = write_output(cfg.output, sweep_csv(rows), log);
  if (rc == 0 && verbosity >= Verbosity::Info && cfg.output != "-")
    log << "wrote " << rows.size() << " rows to " << cfg.output << "\n";
  return rc;
}

/// Single grid point at the configured SNR and antenna count.
inline int cmd_simulate(ExperimentConfig cfg, std::ostream &log, Verbosity verbosity = Verbosity::Info) {
  cfg.sweep = SweepKind::Single;
  return cmd_sweep(cfg, log, verbosity);
}

inline int cmd_validate(std::ostream &out, const ValidateOptions &opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const auto results = run_validation(opt);
  for (const auto &r : results) out << to_string(r.status) << "  " << r.name << "  " << r.detail << "\n";
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = validation_passed(results);
  if (!ok) {
    out << "failed:";
    for (const auto &r : results)
      if (r.status == CheckStatus::Fail) out << " " << r.name;
    out << "\n";
  }
  out << (ok ? "all checks passed" : "validation FAILED") << " in " << detail::sci(secs) << " s\n";
  return ok ? 0 : 1;
}

} // namespace otfs_sc::cli
