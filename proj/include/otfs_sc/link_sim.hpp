#pragma once

// End-to-end link: payload -> allocation -> 64-QAM -> OTFS -> precode ->
// channel -> combine -> OTFS demod -> zero-forcing -> hard decision ->
// de-allocation -> metrics.
//
// Stream layout: a burst carries K = N_RF*M*N*P symbols.  Sub-channel s of
// frame p is stream position p*N_RF*M*N + s; within a frame, position
// c*M*N + q is chain c, DD grid entry (q mod M, q / M).

#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "otfs_sc/channel.hpp"
#include "otfs_sc/dd_transforms.hpp"
#include "otfs_sc/modem.hpp"
#include "otfs_sc/semantic_alloc.hpp"
#include "otfs_sc/svd_precoding.hpp"

namespace otfs_sc {

enum class AllocationMode { Semantic, Uniform };

inline std::string to_string(AllocationMode m) { return m == AllocationMode::Semantic ? "semantic" : "uniform"; }

inline AllocationMode allocation_mode_from_string(const std::string &s) {
  if (s == "semantic") return AllocationMode::Semantic;
  if (s == "uniform") return AllocationMode::Uniform;
  throw ValidationError("allocation mode must be semantic or uniform, got '" + s + "'");
}

/// Noise variance for a per-DD-symbol SNR with unit symbol energy.
inline double snr_to_noise_var(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 10.0);
}

struct SimConfig {
  Index n_tx = 8;
  Index n_rx = 8;
  Index n_rf = 2;
  Index m_delay = 8;
  Index n_doppler = 8;
  Index n_frames = 1;
  Index paths = 10;
  int max_delay_tap = 5;
  int max_doppler_tap = 1;
  double snr_db = 0.0;
  PrecoderMode precoder_mode = PrecoderMode::DdCorrected;
  AllocationMode allocation_mode = AllocationMode::Semantic;
  std::uint64_t seed = 1;
  double importance_sigma = 1.0; // log-normal shape for synthetic importance
  double min_gain = kMinGainDefault;

  Index frame_len() const { return m_delay * n_doppler; }
  Index streams_per_frame() const { return n_rf * frame_len(); }
  Index payload_size() const { return streams_per_frame() * n_frames; }

  ChannelConfig channel_config() const {
    return ChannelConfig{n_tx, n_rx, m_delay, n_doppler, paths, max_delay_tap, max_doppler_tap};
  }

  void validate() const {
    detail::require_valid(n_tx >= 1, "n_tx >= 1");
    detail::require_valid(n_rx >= 1, "n_rx >= 1");
    detail::require_valid(n_rf >= 1, "n_rf >= 1");
    detail::require_valid(m_delay >= 1, "m_delay >= 1");
    detail::require_valid(n_doppler >= 1, "n_doppler >= 1");
    detail::require_valid(n_frames >= 1, "n_frames >= 1");
    detail::require_valid(paths >= 1, "paths >= 1");
    detail::require_valid(n_rf <= std::min(n_tx, n_rx), "n_rf <= min(n_tx, n_rx)");
    detail::require_valid(max_delay_tap >= 0 && max_delay_tap < frame_len(), "0 <= max_delay_tap < m_delay*n_doppler");
    detail::require_valid(max_doppler_tap >= 0 && max_doppler_tap < frame_len(),
                          "0 <= max_doppler_tap < m_delay*n_doppler");
    detail::require_valid(!std::isnan(snr_db) && snr_db > -std::numeric_limits<double>::infinity(),
                          "snr_db must be a number or +inf");
    detail::require_valid(importance_sigma >= 0.0 && std::isfinite(importance_sigma), "importance_sigma >= 0");
    detail::require_valid(min_gain >= 0.0 && std::isfinite(min_gain), "min_gain >= 0");
  }
};

struct Payload {
  std::vector<int> indices;
  ImportanceVector importance;
};

/// Uniform QAM labels with log-normal importance exp(N(0, sigma^2)).
inline Payload random_payload(const SimConfig &cfg, RngSeed seed) {
  std::mt19937_64 rng(seed.value);
  std::uniform_int_distribution<int> label(0, kQamOrder - 1);
  std::lognormal_distribution<double> importance(0.0, cfg.importance_sigma);
  const auto k = static_cast<std::size_t>(cfg.payload_size());
  Payload p;
  p.indices.resize(k);
  p.importance.w.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    p.indices[i] = label(rng);
    p.importance.w[i] = importance(rng);
  }
  return p;
}

/// Channel realization with its decomposition, precoder and gains.
struct LinkSession {
  ChannelMatrix h;
  SubChannelDecomposition dec;
  PrecoderCombiner pc;
  GainVector gains;
};

inline LinkSession prepare_link(const SimConfig &cfg, RngSeed channel_seed) {
  cfg.validate();
  LinkSession s;
  s.h = build_time_channel(sample_channel(cfg.channel_config(), channel_seed));
  s.dec = decompose(s.h);
  s.pc = build_precoder_combiner(s.dec, cfg.n_rf, cfg.m_delay, cfg.n_doppler, cfg.precoder_mode);
  s.gains = sub_channel_gains(s.dec, cfg.n_rf, cfg.m_delay, cfg.n_doppler);
  return s;
}

/// Gain seen by every stream position of a burst (gains repeat per frame).
inline RVector burst_gains(const LinkSession &s, Index n_frames) {
  return s.gains.gamma.replicate(n_frames, 1);
}

struct BurstOutput {
  CVector received;          // DD-domain output before equalization
  CVector equalized;         // zero-forced estimates; 0 where erased
  std::vector<char> erased;  // sub-channel gain below min_gain
};

/// Push a stream of DD symbols (sub-channel order) through the physical link.
inline BurstOutput transmit_burst(const LinkSession &s, const SimConfig &cfg, const CVector &stream,
                                  double noise_var, std::mt19937_64 &rng) {
  const Index per_frame = cfg.streams_per_frame();
  const Index mn = cfg.frame_len();
  detail::require_dim(stream.size() % per_frame == 0, "transmit_burst: stream length must be a multiple of N_RF*M*N");
  const Index frames = stream.size() / per_frame;

  BurstOutput out;
  out.received.resize(stream.size());
  out.equalized.resize(stream.size());
  out.erased.assign(static_cast<std::size_t>(stream.size()), 0);

  std::vector<TimeFrame> tx(static_cast<std::size_t>(cfg.n_rf));
  for (Index p = 0; p < frames; ++p) {
    for (Index c = 0; c < cfg.n_rf; ++c) {
      const CVector x = stream.segment(p * per_frame + c * mn, mn);
      tx[static_cast<std::size_t>(c)] = otfs_modulate(DdGrid::from_vector(x, cfg.m_delay, cfg.n_doppler));
    }
    const CVector y = s.pc.g * stack_chains(tx);
    const CVector r = apply_channel(s.h, y, noise_var, rng);
    const CVector s_hat = s.pc.w.adjoint() * r;
    const auto rx = unstack_chains(s_hat, cfg.n_rf);
    for (Index c = 0; c < cfg.n_rf; ++c) {
      out.received.segment(p * per_frame + c * mn, mn) =
          otfs_demodulate(rx[static_cast<std::size_t>(c)], cfg.m_delay, cfg.n_doppler).vectorized();
    }
    for (Index sc = 0; sc < per_frame; ++sc) {
      const Index pos = p * per_frame + sc;
      const auto eq = equalize(out.received(pos), s.gains.gamma(sc), cfg.min_gain);
      if (eq) {
        out.equalized(pos) = *eq;
      } else {
        out.equalized(pos) = Complex(0.0, 0.0);
        out.erased[static_cast<std::size_t>(pos)] = 1;
      }
    }
  }
  return out;
}

struct LinkMetrics {
  double mse = 0.0;
  double weighted_mse = 0.0;
  double ser = 0.0;
  double kappa_exact = 0.0;
  double kappa_soft = 0.0;
  GainVector gains;
};

/// Run one burst over an already prepared channel.
inline LinkMetrics run_link(const LinkSession &s, const SimConfig &cfg, const Payload &payload, RngSeed noise_seed) {
  const auto k = static_cast<std::size_t>(cfg.payload_size());
  detail::require_dim(payload.indices.size() == k && payload.importance.size() == k,
                      "run_link: payload length must equal N_RF*M*N*P = " + std::to_string(k));
  payload.importance.validate();

  const RVector g = burst_gains(s, cfg.n_frames);
  const AllocationPermutation pi = cfg.allocation_mode == AllocationMode::Semantic
                                       ? allocate(payload.importance, g)
                                       : AllocationPermutation::identity(k);

  const std::vector<int> tx_labels = apply_allocation(payload.indices, pi);
  const CVector stream = modulate(tx_labels);

  std::mt19937_64 rng(noise_seed.value);
  const BurstOutput burst = transmit_burst(s, cfg, stream, snr_to_noise_var(cfg.snr_db), rng);

  std::vector<Complex> eq(k);
  std::vector<int> decided(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto pos = static_cast<Index>(i);
    eq[i] = burst.equalized(pos);
    decided[i] = burst.erased[i] ? -1 : demodulate_hard(eq[i]);
  }
  const std::vector<Complex> est = invert_allocation(eq, pi);
  const std::vector<int> labels = invert_allocation(decided, pi);

  const auto &w = payload.importance.w;
  const auto &constellation = default_constellation();
  LinkMetrics m;
  double errors = 0.0, sq = 0.0, wsq = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = std::norm(est[i] - constellation.point(payload.indices[i]));
    sq += e;
    wsq += w[i] * e;
    wsum += w[i];
    errors += labels[i] != payload.indices[i] ? 1.0 : 0.0;
  }
  m.ser = errors / static_cast<double>(k);
  m.mse = sq / static_cast<double>(k);
  m.weighted_mse = wsum > 0.0 ? wsq / wsum : m.mse;

  if (k >= 2) {
    std::vector<double> w_on_sub(k);
    for (std::size_t sc = 0; sc < k; ++sc) w_on_sub[sc] = w[pi.pi[sc]];
    const std::span<const double> gs(g.data(), k);
    m.kappa_exact = exact_kendall_tau(w_on_sub, gs);
    m.kappa_soft = soft_kendall(w_on_sub, gs);
  }
  m.gains = s.gains;
  return m;
}

inline RngSeed trial_seed(std::uint64_t base, std::uint64_t trial) { return derive_seed(RngSeed{base}, trial); }

namespace detail {
enum SeedStream : std::uint64_t { kChannelStream = 0, kNoiseStream = 1, kPayloadStream = 2 };
}

/// Channel, payload and noise all derived from one seed.
inline LinkMetrics run_link(const SimConfig &cfg, const Payload &payload, RngSeed seed) {
  const LinkSession s = prepare_link(cfg, derive_seed(seed, detail::kChannelStream));
  return run_link(s, cfg, payload, derive_seed(seed, detail::kNoiseStream));
}

inline LinkMetrics run_trial(const SimConfig &cfg, RngSeed seed) {
  const Payload payload = random_payload(cfg, derive_seed(seed, detail::kPayloadStream));
  return run_link(cfg, payload, seed);
}

struct SweepRow {
  double snr_db = 0.0;
  Index n_tx = 0;
  Index n_rx = 0;
  Index n_rf = 0;
  AllocationMode mode = AllocationMode::Semantic;
  Index trials = 0;
  double ser = 0.0;
  double mse = 0.0;
  double weighted_mse = 0.0;
  double kappa_exact = 0.0;
  double kappa_soft = 0.0;
  double gamma_max = 0.0;
  double gamma_min = 0.0;
};

namespace detail {

inline void accumulate(SweepRow &row, const LinkMetrics &m) {
  row.ser += m.ser;
  row.mse += m.mse;
  row.weighted_mse += m.weighted_mse;
  row.kappa_exact += m.kappa_exact;
  row.kappa_soft += m.kappa_soft;
  row.gamma_max += m.gains.gamma(0);
  row.gamma_min += m.gains.gamma(m.gains.gamma.size() - 1);
}

inline void finish(SweepRow &row) {
  const auto t = static_cast<double>(row.trials);
  row.ser /= t;
  row.mse /= t;
  row.weighted_mse /= t;
  row.kappa_exact /= t;
  row.kappa_soft /= t;
  row.gamma_max /= t;
  row.gamma_min /= t;
}

inline SweepRow empty_row(const SimConfig &cfg, double snr_db, Index trials) {
  SweepRow r;
  r.snr_db = snr_db;
  r.n_tx = cfg.n_tx;
  r.n_rx = cfg.n_rx;
  r.n_rf = cfg.n_rf;
  r.mode = cfg.allocation_mode;
  r.trials = trials;
  return r;
}

} // namespace detail

/// Progress callback: (grid point index, grid size).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// One averaged row per SNR.  Trial t uses the same channel, payload and
/// noise draw at every SNR point.
inline std::vector<SweepRow> snr_sweep(const SimConfig &cfg, const std::vector<double> &snr_list_db, Index trials,
                                       const ProgressFn &progress = {}) {
  cfg.validate();
  detail::require_valid(trials >= 1, "trials >= 1");
  std::vector<SweepRow> rows;
  rows.reserve(snr_list_db.size());
  for (double snr : snr_list_db) rows.push_back(detail::empty_row(cfg, snr, trials));

  for (Index t = 0; t < trials; ++t) {
    const RngSeed seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(t));
    const Payload payload = random_payload(cfg, derive_seed(seed, detail::kPayloadStream));
    const LinkSession s = prepare_link(cfg, derive_seed(seed, detail::kChannelStream));
    for (std::size_t i = 0; i < snr_list_db.size(); ++i) {
      SimConfig point = cfg;
      point.snr_db = snr_list_db[i];
      detail::accumulate(rows[i], run_link(s, point, payload, derive_seed(seed, detail::kNoiseStream)));
    }
    if (progress) progress(static_cast<std::size_t>(t) + 1, static_cast<std::size_t>(trials));
  }
  for (auto &r : rows) detail::finish(r);
  return rows;
}

/// One averaged row per antenna count, with n_rx tied to n_tx.
inline std::vector<SweepRow> antenna_sweep(const SimConfig &cfg, const std::vector<Index> &n_tx_list, Index trials,
                                           const ProgressFn &progress = {}) {
  detail::require_valid(trials >= 1, "trials >= 1");
  std::vector<SweepRow> rows;
  rows.reserve(n_tx_list.size());
  for (std::size_t i = 0; i < n_tx_list.size(); ++i) {
    SimConfig point = cfg;
    point.n_tx = point.n_rx = n_tx_list[i];
    auto one = snr_sweep(point, {cfg.snr_db}, trials);
    rows.push_back(one.front());
    if (progress) progress(i + 1, n_tx_list.size());
  }
  return rows;
}

} // namespace otfs_sc
