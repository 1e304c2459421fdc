#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "otfs_sc/cli.hpp"
#include "otfs_sc/config.hpp"
#include "otfs_sc/io.hpp"

using namespace otfs_sc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("otfs_sc_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string body(const std::string &csv) { return csv.substr(csv.find('\n') + 1); }

ExperimentConfig small_experiment(const fs::path &out) {
  auto cfg = parse_config_string(R"({"n_tx": 2, "n_rx": 2, "n_rf": 1, "m_delay": 2, "n_doppler": 2,
                                     "paths": 4, "max_delay_tap": 3, "trials": 2})");
  cfg.output = out.string();
  return cfg;
}

} // namespace

TEST(ParseConfig, ShippedDefaultMatchesReferenceSystem) {
  const auto cfg = parse_config(fs::path(OTFS_SC_SOURCE_DIR) / "configs" / "default.json");
  EXPECT_EQ(cfg.sim.n_tx, 8);
  EXPECT_EQ(cfg.sim.n_rx, 8);
  EXPECT_EQ(cfg.sim.n_rf, 2);
  EXPECT_EQ(cfg.sim.m_delay, 8);
  EXPECT_EQ(cfg.sim.n_doppler, 8);
  EXPECT_EQ(cfg.sim.paths, 10);
  EXPECT_EQ(cfg.sim.max_delay_tap, 5);
  EXPECT_EQ(cfg.sim.max_doppler_tap, 1);
  EXPECT_EQ(cfg.snr_grid_db, (std::vector<double>{-6, 0, 6, 12, 18}));
  EXPECT_EQ(cfg.n_tx_grid, (std::vector<Index>{4, 6, 8, 10, 12, 14, 16}));
  EXPECT_EQ(cfg.carrier_frequency_hz, 28e9);
  EXPECT_EQ(cfg.subcarrier_spacing_hz, 120e3);
  EXPECT_EQ(cfg.sweep, SweepKind::Snr);

  const auto ant = parse_config(fs::path(OTFS_SC_SOURCE_DIR) / "configs" / "antennas.json");
  EXPECT_EQ(ant.sweep, SweepKind::Antennas);
}

TEST(ParseConfig, EmptyObjectUsesDefaults) {
  const auto cfg = parse_config_string("{}");
  EXPECT_EQ(cfg.sim.n_tx, 8);
  EXPECT_EQ(cfg.sim.precoder_mode, PrecoderMode::DdCorrected);
  EXPECT_EQ(cfg.sim.allocation_mode, AllocationMode::Semantic);
}

TEST(ParseConfig, EmptyFileNamesPosition) {
  const fs::path p = temp_dir() / "empty.json";
  std::ofstream(p).close();
  try {
    parse_config(p);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("at byte"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, ValidationNamesConstraint) {
  try {
    parse_config_string(R"({"n_rf": 0})");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("n_rf >= 1"), std::string::npos) << e.what();
  }
  try {
    parse_config_string(R"({"n_tx": 8, "bogus": 1})");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("'bogus'"), std::string::npos) << e.what();
  }
  try {
    parse_config_string(R"({"paths": "ten"})");
    FAIL();
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("'paths'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config_string(R"({"precoder_mode": "zf"})"), ConfigError);
  EXPECT_THROW(parse_config_string(R"({"trials": 0})"), ConfigError);
  EXPECT_THROW(parse_config_string(R"({"m_delay": 2, "n_doppler": 2})"), ConfigError); // delay tap 5 >= MN
  EXPECT_THROW(parse_config_string("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_config(temp_dir() / "missing.json"), ConfigError);
}

TEST(ParseConfig, InfiniteSnr) {
  const auto cfg = parse_config_string(R"({"snr_db": "inf", "snr_grid_db": [0, "inf"]})");
  EXPECT_TRUE(std::isinf(cfg.sim.snr_db));
  EXPECT_TRUE(std::isinf(cfg.snr_grid_db[1]));
}

TEST(ChannelJson, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto chan = sample_channel(ChannelConfig{3, 2, 4, 2, 6, 5, 1}, RngSeed{seed});
    const auto back = channel_from_json(nlohmann::json::parse(channel_to_json(chan).dump()));
    EXPECT_TRUE(build_time_channel(back).data == build_time_channel(chan).data);
  }
  nlohmann::json bad = channel_to_json(sample_channel(ChannelConfig{1, 1, 2, 2, 1, 1, 1}, RngSeed{1}));
  bad["paths"][0]["delay_tap"] = 9;
  EXPECT_THROW(channel_from_json(bad), ValidationError);
  bad.erase("paths");
  EXPECT_THROW(channel_from_json(bad), ValidationError);
}

TEST(AllocationJson, RoundTrip) {
  const ImportanceVector w{{0.5, 3.25, 1.0}};
  EXPECT_EQ(importance_from_json(nlohmann::json::parse(importance_to_json(w).dump())).w, w.w);
  const AllocationPermutation p{{2, 0, 1}};
  EXPECT_EQ(permutation_from_json(nlohmann::json::parse(permutation_to_json(p).dump())).pi, p.pi);
  EXPECT_THROW(permutation_from_json(nlohmann::json::parse(R"({"permutation": [0, 0]})")), ValidationError);
  EXPECT_THROW(importance_from_json(nlohmann::json::parse(R"({"importance": [-1]})")), ValidationError);
}

TEST(ConstellationCsv, TableIsExactAndPortable) {
  const std::string csv = constellation_csv();
  EXPECT_EQ(count_lines(csv), 65u);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "label,re,im");
  int label = 0;
  while (std::getline(in, line)) {
    int l;
    double re, im;
    ASSERT_EQ(std::sscanf(line.c_str(), "%d,%lf,%lf", &l, &re, &im), 3);
    EXPECT_EQ(l, label);
    EXPECT_EQ(Complex(re, im), default_constellation().point(label));
    ++label;
  }
}

TEST(SweepCsv, HeaderAndRowShape) {
  SweepRow r;
  r.snr_db = std::numeric_limits<double>::infinity();
  r.n_tx = r.n_rx = 8;
  r.n_rf = 2;
  r.trials = 3;
  const std::string csv = sweep_csv({r, r});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# otfs_sc ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "snr_db,n_tx,n_rx,n_rf,mode,trials,ser,mse,weighted_mse,kappa_exact,kappa_soft,gamma_max,gamma_min");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("inf,8,8,2,semantic,3,", 0), 0u) << line;
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12);
}

TEST(CmdSweep, DefaultSnrGridGivesFiveRows) {
  const fs::path out = temp_dir() / "snr.csv";
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_sweep(small_experiment(out), log, cli::Verbosity::Quiet), 0) << log.str();
  EXPECT_EQ(count_lines(slurp(out)), 2u + 5u);
}

TEST(CmdSweep, AntennaGridGivesSevenRows) {
  const fs::path out = temp_dir() / "ant.csv";
  auto cfg = small_experiment(out);
  cfg.sweep = SweepKind::Antennas;
  cfg.trials = 1;
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_sweep(cfg, log), 0) << log.str();
  const std::string csv = slurp(out);
  EXPECT_EQ(count_lines(csv), 2u + 7u);
  EXPECT_NE(log.str().find("7/7"), std::string::npos);
}

TEST(CmdSweep, ByteIdenticalAcrossRuns) {
  const fs::path a = temp_dir() / "a.csv", b = temp_dir() / "b.csv";
  auto cfg = small_experiment(a);
  cfg.trials = 1;
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_sweep(cfg, log), 0);
  cfg.output = b.string();
  ASSERT_EQ(cli::cmd_sweep(cfg, log), 0);
  EXPECT_EQ(body(slurp(a)), body(slurp(b)));
}

TEST(CmdSweep, UnwritableOutputFailsWithoutPartialFile) {
  const fs::path out = temp_dir() / "no_such_dir" / "x.csv";
  std::ostringstream log;
  EXPECT_NE(cli::cmd_sweep(small_experiment(out), log, cli::Verbosity::Quiet), 0);
  EXPECT_NE(log.str().find("error"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST(CmdSimulate, OneRow) {
  const fs::path out = temp_dir() / "sim.csv";
  std::ostringstream log;
  ASSERT_EQ(cli::cmd_simulate(small_experiment(out), log), 0);
  EXPECT_EQ(count_lines(slurp(out)), 3u);
}

TEST(CmdValidate, PassesAndReportsExpectedGap) {
  std::ostringstream out;
  EXPECT_EQ(cli::cmd_validate(out), 0) << out.str();
  EXPECT_NE(out.str().find("EXPECTED-GAP  diagonalization_paper_literal"), std::string::npos) << out.str();
  EXPECT_EQ(out.str().find("FAIL "), std::string::npos);
}

TEST(CmdValidate, CorruptedConstellationFails) {
  std::ostringstream out;
  ValidateOptions opt;
  opt.corrupt_constellation = true;
  EXPECT_NE(cli::cmd_validate(out, opt), 0);
  EXPECT_NE(out.str().find("FAIL  qam_gray_adjacency"), std::string::npos) << out.str();
}
