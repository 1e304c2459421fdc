#pragma once

// Cross-module invariant checks at small scale, used by `otfs_sc validate`.

#include <algorithm>
#include <chrono>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "otfs_sc/channel.hpp"
#include "otfs_sc/dd_transforms.hpp"
#include "otfs_sc/link_sim.hpp"
#include "otfs_sc/losses.hpp"
#include "otfs_sc/modem.hpp"
#include "otfs_sc/semantic_alloc.hpp"
#include "otfs_sc/svd_precoding.hpp"

namespace otfs_sc {

enum class CheckStatus { Pass, Fail, ExpectedGap };

inline std::string to_string(CheckStatus s) {
  switch (s) {
  case CheckStatus::Pass: return "PASS";
  case CheckStatus::Fail: return "FAIL";
  case CheckStatus::ExpectedGap: return "EXPECTED-GAP";
  }
  return "FAIL";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Fail;
  std::string detail;
};

struct ValidateOptions {
  // negative control: swaps two labels so the Gray check must fail
  bool corrupt_constellation = false;
  std::uint64_t seed = 7;
};

namespace detail {

inline CMatrix random_cmatrix(Index rows, Index cols, std::mt19937_64 &rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline CheckResult check(std::string name, bool ok, std::string detail_text) {
  return CheckResult{std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail_text)};
}

// off-diagonal / diagonal Frobenius mass of the DD-domain effective channel
inline double diagonalization_ratio(const SimConfig &cfg, PrecoderMode mode, RngSeed seed) {
  const ChannelMatrix h = build_time_channel(sample_channel(cfg.channel_config(), seed));
  const auto dec = decompose(h);
  const auto pc = build_precoder_combiner(dec, cfg.n_rf, cfg.m_delay, cfg.n_doppler, mode);
  const CMatrix eff = effective_dd_channel(h.data, pc, cfg.n_rf, cfg.m_delay, cfg.n_doppler);
  const CMatrix diag = eff.diagonal().asDiagonal();
  return (eff - diag).norm() / diag.norm();
}

} // namespace detail

inline std::vector<CheckResult> run_validation(const ValidateOptions &opt = {}) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(opt.seed);

  {
    double worst = 0.0;
    for (Index n : {1, 2, 3, 4, 8, 16}) {
      const DftMatrix f(n);
      worst = std::max(worst, (f.matrix().adjoint() * f.matrix() - CMatrix::Identity(n, n)).norm());
    }
    out.push_back(detail::check("dft_unitary", worst < 1e-12, "max ||F^H F - I||_F = " + detail::sci(worst)));
  }

  {
    double rt = 0.0, parseval = 0.0;
    for (Index m : {1, 2, 4, 8})
      for (Index n : {1, 2, 4, 8}) {
        const DdGrid x(detail::random_cmatrix(m, n, rng));
        const TimeFrame s = otfs_modulate(x);
        rt = std::max(rt, (otfs_demodulate(s, m, n).data() - x.data()).cwiseAbs().maxCoeff());
        parseval = std::max(parseval, std::abs(s.data().norm() - x.data().norm()) / x.data().norm());
      }
    out.push_back(detail::check("otfs_round_trip", rt < 1e-12, "max abs error " + detail::sci(rt)));
    out.push_back(detail::check("otfs_parseval", parseval < 1e-12, "max relative error " + detail::sci(parseval)));
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const ChannelConfig cc{2, 2, 2, 2, 3, 3, 1};
      const auto chan = sample_channel(cc, RngSeed{rng()});
      const auto h = build_time_channel(chan);
      const Index mn = chan.frame_len();
      for (Index r = 0; r < chan.n_rx; ++r)
        for (Index qo = 0; qo < mn; ++qo)
          for (Index t = 0; t < chan.n_tx; ++t)
            for (Index q = 0; q < mn; ++q) {
              Complex ref{0.0, 0.0};
              for (const auto &p : chan.paths) {
                if (qo != (q + p.delay_tap) % mn) continue;
                const Complex ar = std::exp(kJ * kPi * static_cast<double>(r) * std::cos(p.aoa)) /
                                   std::sqrt(static_cast<double>(chan.n_rx));
                const Complex at = std::exp(kJ * kPi * static_cast<double>(t) * std::cos(p.aod)) /
                                   std::sqrt(static_cast<double>(chan.n_tx));
                ref += p.gain * ar * std::conj(at) *
                       std::exp(kJ * 2.0 * kPi * static_cast<double>(p.doppler_tap * q) / static_cast<double>(mn));
              }
              worst = std::max(worst, std::abs(ref - h.data(r * mn + qo, t * mn + q)));
            }
    }
    out.push_back(detail::check("channel_entry_oracle", worst < 1e-12, "max abs error " + detail::sci(worst)));
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const CMatrix h = detail::random_cmatrix(12, 12, rng);
      const auto dec = decompose(h);
      const CMatrix rec = dec.u * dec.sigma.asDiagonal() * dec.v.adjoint();
      worst = std::max(worst, (rec - h).norm() / h.norm());
    }
    out.push_back(detail::check("svd_reconstruction", worst < 1e-9, "max relative error " + detail::sci(worst)));
  }

  {
    SimConfig cfg;
    cfg.n_tx = cfg.n_rx = 4;
    cfg.m_delay = cfg.n_doppler = 2;
    cfg.n_rf = 2;
    cfg.paths = 5;
    cfg.max_delay_tap = 3;
    double corrected = 0.0, literal = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const RngSeed seed{rng()};
      corrected = std::max(corrected, detail::diagonalization_ratio(cfg, PrecoderMode::DdCorrected, seed));
      literal = std::max(literal, detail::diagonalization_ratio(cfg, PrecoderMode::PaperLiteral, seed));
    }
    out.push_back(detail::check("diagonalization_dd_corrected", corrected < 1e-9,
                                "max off/diag ratio " + detail::sci(corrected)));
    CheckResult lit{"diagonalization_paper_literal", CheckStatus::ExpectedGap,
                    "max off/diag ratio " + detail::sci(literal) + " (G=V1, W=U1 does not diagonalize)"};
    if (literal < 1e-9) lit.status = CheckStatus::Pass;
    out.push_back(lit);
  }

  {
    const std::vector<double> a{1, 2, 3, 4, 5}, rev{5, 4, 3, 2, 1};
    const std::vector<double> w{1, 3, 2}, g{1, 2, 3};
    bool ok = exact_kendall_tau(a, a) == 1.0 && exact_kendall_tau(a, rev) == -1.0 &&
              std::abs(exact_kendall_tau(w, g) - 1.0 / 3.0) < 1e-15;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      // integer ranks keep every pair product >= 1 so the sigmoid saturates
      std::vector<double> x(8), y(8);
      std::iota(x.begin(), x.end(), 1.0);
      std::iota(y.begin(), y.end(), 1.0);
      std::shuffle(x.begin(), x.end(), rng);
      std::shuffle(y.begin(), y.end(), rng);
      worst = std::max(worst, std::abs(soft_kendall(x, y, 1e4, +1) - 0.5 * (exact_kendall_tau(x, y) + 1.0)));
    }
    const std::vector<double> one{1, 2};
    const double literal = soft_kendall(one, one, 2.0, -1);
    ok = ok && worst < 1e-3 && std::abs(literal - 1.0 / (1.0 + std::exp(2.0))) < 1e-12;
    out.push_back(detail::check("kendall_oracles", ok, "soft-vs-exact max gap " + detail::sci(worst)));
  }

  {
    bool ok = true;
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 10 && ok; ++trial) {
      std::vector<double> w(5), lam(5);
      for (auto &v : w) v = u(rng);
      for (auto &v : lam) v = u(rng);
      std::sort(lam.begin(), lam.end(), std::greater<>());
      const auto pi = allocate(w, lam);
      auto cost = [&](const std::vector<std::size_t> &p) {
        double c = 0.0;
        for (std::size_t s = 0; s < p.size(); ++s) c += w[p[s]] / (lam[s] * lam[s]);
        return c;
      };
      const double got = cost(pi.pi);
      std::vector<std::size_t> perm{0, 1, 2, 3, 4};
      double best = got;
      do best = std::min(best, cost(perm));
      while (std::next_permutation(perm.begin(), perm.end()));
      ok = got <= best * (1.0 + 1e-12);
    }
    out.push_back(detail::check("allocation_optimality", ok, "sort matching vs 5! enumeration"));
  }

  Constellation constellation;
  if (opt.corrupt_constellation) {
    auto pts = constellation.points();
    std::swap(pts[0], pts[1]);
    constellation = Constellation(pts);
  }
  {
    out.push_back(detail::check("qam_gray_adjacency", gray_adjacency_holds(constellation),
                                opt.corrupt_constellation ? "corrupted table (negative control)" : "64 points"));
    const double e = constellation.mean_energy();
    out.push_back(detail::check("qam_unit_energy", std::abs(e - 1.0) < 1e-12, "mean energy " + detail::sci(e)));
  }

  {
    const double snr_db = 18.0;
    const double n0 = snr_to_noise_var(snr_db);
    std::uniform_int_distribution<int> lab(0, kQamOrder - 1);
    const Index count = 200000;
    Index errors = 0;
    std::normal_distribution<double> g(0.0, std::sqrt(n0 / 2.0));
    for (Index i = 0; i < count; ++i) {
      const int l = lab(rng);
      const Complex r = constellation.point(l) + Complex(g(rng), g(rng));
      errors += demodulate_hard(r, constellation) != l;
    }
    const double ser = static_cast<double>(errors) / static_cast<double>(count);
    const double theory = square_qam_ser(kQamOrder, 1.0, n0);
    out.push_back(detail::check("qam_ser_vs_theory", std::abs(ser - theory) <= 0.1 * theory,
                                "18 dB: simulated " + detail::sci(ser) + " vs theory " + detail::sci(theory)));
  }

  {
    SimConfig cfg;
    cfg.n_tx = cfg.n_rx = 4;
    cfg.n_rf = 2;
    cfg.m_delay = cfg.n_doppler = 4;
    cfg.paths = 6;
    cfg.snr_db = std::numeric_limits<double>::infinity();
    double worst_mse = 0.0, worst_ser = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const auto m = run_trial(cfg, RngSeed{rng()});
      worst_mse = std::max(worst_mse, m.mse);
      worst_ser = std::max(worst_ser, m.ser);
    }
    out.push_back(detail::check("noiseless_recovery", worst_ser == 0.0 && worst_mse < 1e-20,
                                "max ser " + detail::sci(worst_ser) + ", max mse " + detail::sci(worst_mse)));
  }

  {
    const bool ok = l2_loss(1.0, 0.1, 0.8, LossWeights{20.0, 0.5}) == 2.6 &&
                    l1_loss(RateEstimate{2.0}, RateEstimate{1.0}, 0.5) == 3.5;
    out.push_back(detail::check("loss_arithmetic", ok, "L2(1, 0.1, 0.8) = 2.6, L1(2, 1, 0.5) = 3.5"));
  }

  return out;
}

inline bool validation_passed(const std::vector<CheckResult> &results) {
  return std::none_of(results.begin(), results.end(),
                      [](const CheckResult &r) { return r.status == CheckStatus::Fail; });
}

} // namespace otfs_sc
