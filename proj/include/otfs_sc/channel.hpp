#pragma once

// Delay-Doppler MIMO channel:
//
//   H = sum_i alpha_i (a_R(aoa_i) a_T(aod_i)^H) kron (Pi^{l_i} Delta^{k_i})
//
// Pi is the forward cyclic shift and Delta = diag(exp(j 2 pi q / MN)) over one
// frame of MN samples.  Array responses use a half-wavelength ULA.

#include <cstdlib>
#include <random>
#include <vector>

#include "otfs_sc/types.hpp"

namespace otfs_sc {

struct PathParams {
  Complex gain{1.0, 0.0};
  int delay_tap = 0;   // [0, MN)
  int doppler_tap = 0; // |k| < MN
  double aod = 0.0;    // radians, [0, pi]
  double aoa = 0.0;    // radians, [0, pi]
};

struct DdMimoChannel {
  std::vector<PathParams> paths;
  Index n_tx = 1;
  Index n_rx = 1;
  Index m_delay = 1;
  Index n_doppler = 1;

  Index frame_len() const { return m_delay * n_doppler; }

  void validate() const {
    detail::require_valid(!paths.empty(), "DdMimoChannel: at least one path required");
    detail::require_valid(n_tx >= 1 && n_rx >= 1, "DdMimoChannel: antenna counts must be >= 1");
    detail::require_valid(m_delay >= 1 && n_doppler >= 1, "DdMimoChannel: M and N must be >= 1");
    const Index mn = frame_len();
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto &p = paths[i];
      const std::string tag = "DdMimoChannel: path " + std::to_string(i);
      detail::require_valid(p.delay_tap >= 0 && p.delay_tap < mn, tag + " delay tap outside [0, MN)");
      detail::require_valid(std::abs(p.doppler_tap) < mn, tag + " |doppler tap| must be < MN");
      detail::require_valid(std::isfinite(p.gain.real()) && std::isfinite(p.gain.imag()),
                            tag + " gain must be finite");
    }
  }
};

/// Dense time-domain channel, (n_rx*MN) x (n_tx*MN).
struct ChannelMatrix {
  CMatrix data;
  Index n_tx = 1;
  Index n_rx = 1;
  Index frame_len = 1;
};

/// ULA response, element a = exp(j pi a cos(angle)) / sqrt(n).
inline CVector ula_response(double angle, Index n_antennas) {
  detail::require_dim(n_antennas >= 1, "ula_response: n_antennas must be >= 1");
  CVector a(n_antennas);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
  const double c = std::cos(angle);
  for (Index i = 0; i < n_antennas; ++i) a(i) = std::polar(scale, kPi * static_cast<double>(i) * c);
  return a;
}

/// Forward cyclic shift raised to `power`: entry (i,j) = 1 iff i = (j + power) mod size.
inline RMatrix cyclic_shift_matrix(Index size, long long power) {
  detail::require_dim(size >= 1, "cyclic_shift_matrix: size must be >= 1");
  RMatrix pi = RMatrix::Zero(size, size);
  const long long s = static_cast<long long>(size);
  const long long shift = ((power % s) + s) % s;
  for (Index j = 0; j < size; ++j) pi(static_cast<Index>((j + shift) % s), j) = 1.0;
  return pi;
}

/// diag(exp(j 2 pi q power / size)).  The exponent is reduced mod size so that
/// Delta^size is the identity bit-for-bit.
inline CVector phase_rotation_diagonal(Index size, long long power) {
  detail::require_dim(size >= 1, "phase_rotation_matrix: size must be >= 1");
  CVector d(size);
  const long long s = static_cast<long long>(size);
  for (Index q = 0; q < size; ++q) {
    const long long e = ((static_cast<long long>(q) * power) % s + s) % s;
    d(q) = std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / static_cast<double>(s));
  }
  return d;
}

inline CMatrix phase_rotation_matrix(Index size, long long power) {
  return phase_rotation_diagonal(size, power).asDiagonal();
}

/// Expand the path list to the dense channel.  Each path contributes a
/// rank-one spatial block times a shifted, phase-rotated identity, so the
/// result is assembled sparsely rather than through explicit Kronecker products.
inline ChannelMatrix build_time_channel(const DdMimoChannel &chan) {
  chan.validate();
  const Index mn = chan.frame_len();
  ChannelMatrix h;
  h.n_tx = chan.n_tx;
  h.n_rx = chan.n_rx;
  h.frame_len = mn;
  h.data = CMatrix::Zero(chan.n_rx * mn, chan.n_tx * mn);

  for (const auto &p : chan.paths) {
    const CVector a_r = ula_response(p.aoa, chan.n_rx);
    const CVector a_t = ula_response(p.aod, chan.n_tx);
    const CVector rot = phase_rotation_diagonal(mn, p.doppler_tap);
    for (Index r = 0; r < chan.n_rx; ++r) {
      for (Index t = 0; t < chan.n_tx; ++t) {
        const Complex spatial = p.gain * a_r(r) * std::conj(a_t(t));
        for (Index q = 0; q < mn; ++q) {
          const Index q_out = (q + p.delay_tap) % mn;
          h.data(r * mn + q_out, t * mn + q) += spatial * rot(q);
        }
      }
    }
  }
  return h;
}

/// Random path generation parameters.
struct ChannelConfig {
  Index n_tx = 8;
  Index n_rx = 8;
  Index m_delay = 8;
  Index n_doppler = 8;
  Index paths = 10;
  int max_delay_tap = 5;
  int max_doppler_tap = 1;

  void validate() const {
    detail::require_valid(n_tx >= 1 && n_rx >= 1, "channel config: antenna counts must be >= 1");
    detail::require_valid(m_delay >= 1 && n_doppler >= 1, "channel config: M and N must be >= 1");
    detail::require_valid(paths >= 1, "channel config: paths must be >= 1");
    const Index mn = m_delay * n_doppler;
    detail::require_valid(max_delay_tap >= 0 && max_delay_tap < mn,
                          "channel config: max_delay_tap must lie in [0, MN)");
    detail::require_valid(max_doppler_tap >= 0 && max_doppler_tap < mn,
                          "channel config: max_doppler_tap must lie in [0, MN)");
  }
};

/// Delay taps uniform on {0..max_delay}, Doppler taps uniform on
/// {-max_doppler..max_doppler}, gains CN(0,1), angles uniform on [0, pi].
inline DdMimoChannel sample_channel(const ChannelConfig &cfg, RngSeed seed) {
  cfg.validate();
  std::mt19937_64 rng(seed.value);
  std::uniform_int_distribution<int> delay(0, cfg.max_delay_tap);
  std::uniform_int_distribution<int> doppler(-cfg.max_doppler_tap, cfg.max_doppler_tap);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> angle(0.0, kPi);

  DdMimoChannel chan;
  chan.n_tx = cfg.n_tx;
  chan.n_rx = cfg.n_rx;
  chan.m_delay = cfg.m_delay;
  chan.n_doppler = cfg.n_doppler;
  chan.paths.reserve(static_cast<std::size_t>(cfg.paths));
  for (Index i = 0; i < cfg.paths; ++i) {
    PathParams p;
    // fixed draw order keeps realizations stable across refactors
    p.gain = Complex(gauss(rng), gauss(rng));
    p.delay_tap = delay(rng);
    p.doppler_tap = doppler(rng);
    p.aod = angle(rng);
    p.aoa = angle(rng);
    chan.paths.push_back(p);
  }
  return chan;
}

/// Circularly-symmetric complex Gaussian noise, E|n|^2 = noise_var.
inline CVector complex_awgn(Index len, double noise_var, std::mt19937_64 &rng) {
  CVector n(len);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise_var / 2.0));
  for (Index i = 0; i < len; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    n(i) = Complex(re, im);
  }
  return n;
}

/// r = H y + n.
inline CVector apply_channel(const ChannelMatrix &h, const CVector &y, double noise_var,
                             std::mt19937_64 &rng) {
  detail::require_dim(y.size() == h.data.cols(),
                      "apply_channel: input length " + std::to_string(y.size()) +
                          " != n_tx*MN = " + std::to_string(h.data.cols()));
  detail::require_valid(noise_var >= 0.0 && std::isfinite(noise_var),
                        "apply_channel: noise_var must be finite and >= 0");
  CVector r = h.data * y;
  if (noise_var > 0.0) r += complex_awgn(r.size(), noise_var, rng);
  return r;
}

inline CVector apply_channel(const ChannelMatrix &h, const CVector &y, double noise_var, RngSeed seed) {
  std::mt19937_64 rng(seed.value);
  return apply_channel(h, y, noise_var, rng);
}

} // namespace otfs_sc
