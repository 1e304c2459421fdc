#pragma once

// SVD precoding: H = U Sigma V^H, precoder/combiner from the leading
// N_RF*MN singular vectors, and the resulting parallel sub-channel model
// x_hat_s = lambda_s x_s + n_s.
//
// Two precoder modes are provided.  PaperLiteral uses G = V1, W = U1 as-is;
// the DD-domain map is then C_R Sigma1 C_T, which is diagonal only in special
// cases.  DdCorrected folds the block DFTs into the precoder and combiner
// (G = V1 C_T^H, W = U1 C_R) so the DD-domain map is exactly Sigma1.

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "otfs_sc/channel.hpp"
#include "otfs_sc/dd_transforms.hpp"

namespace otfs_sc {

enum class PrecoderMode { DdCorrected, PaperLiteral };

inline std::string to_string(PrecoderMode m) {
  return m == PrecoderMode::DdCorrected ? "dd_corrected" : "paper_literal";
}

inline PrecoderMode precoder_mode_from_string(const std::string &s) {
  if (s == "dd_corrected") return PrecoderMode::DdCorrected;
  if (s == "paper_literal") return PrecoderMode::PaperLiteral;
  throw ValidationError("precoder mode must be dd_corrected or paper_literal, got '" + s + "'");
}

inline constexpr double kRankTolerance = 1e-10;

struct SubChannelDecomposition {
  CMatrix u;     // (n_rx*MN) x r
  RVector sigma; // descending
  CMatrix v;     // (n_tx*MN) x r
  Index rank = 0;
};

struct PrecoderCombiner {
  CMatrix g; // precoder, (n_tx*MN) x (n_rf*MN)
  CMatrix w; // combiner, (n_rx*MN) x (n_rf*MN)
  PrecoderMode mode = PrecoderMode::DdCorrected;
};

/// Descending sub-channel gains lambda_1 >= ... >= lambda_{n_rf*MN}.
struct GainVector {
  RVector gamma;
};

namespace detail {

inline constexpr double kFactorizationTolerance = 1e-10;

inline bool factorization_holds(const CMatrix &h, const CMatrix &u, const RVector &s, const CMatrix &v) {
  if (!u.allFinite() || !v.allFinite() || !s.allFinite()) return false;
  const double scale = std::max(h.norm(), std::numeric_limits<double>::min());
  const CMatrix eye = CMatrix::Identity(s.size(), s.size());
  return (u * s.asDiagonal() * v.adjoint() - h).norm() <= kFactorizationTolerance * scale &&
         (u.adjoint() * u - eye).norm() <= kFactorizationTolerance * static_cast<double>(s.size()) &&
         (v.adjoint() * v - eye).norm() <= kFactorizationTolerance * static_cast<double>(s.size());
}

} // namespace detail

inline SubChannelDecomposition decompose(const CMatrix &h) {
  detail::require_dim(h.rows() >= 1 && h.cols() >= 1, "decompose: empty matrix");
  detail::require_valid(h.allFinite(), "decompose: channel has non-finite entries");

  RVector s;
  CMatrix u, v;
  Eigen::BDCSVD<CMatrix> fast(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (fast.info() == Eigen::Success) {
    s = fast.singularValues();
    u = fast.matrixU();
    v = fast.matrixV();
  }
  if (fast.info() != Eigen::Success || !detail::factorization_holds(h, u, s, v)) {
    // divide-and-conquer in Eigen 3.4.0 can return a wrong factorization on
    // nearly rank-deficient inputs
    Eigen::JacobiSVD<CMatrix> slow(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (slow.info() != Eigen::Success) throw NumericalError("decompose: SVD failed to converge");
    s = slow.singularValues();
    u = slow.matrixU();
    v = slow.matrixV();
    if (!detail::factorization_holds(h, u, s, v)) throw NumericalError("decompose: SVD residual too large");
  }
  const Index k = s.size();

  // (value desc, original index asc) keeps tied runs in factorization order
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return s(a) > s(b); });

  SubChannelDecomposition dec;
  dec.sigma.resize(k);
  dec.u.resize(h.rows(), k);
  dec.v.resize(h.cols(), k);
  for (Index i = 0; i < k; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    dec.sigma(i) = s(src);
    dec.u.col(i) = u.col(src);
    dec.v.col(i) = v.col(src);
  }
  const double cutoff = k > 0 ? kRankTolerance * dec.sigma(0) : 0.0;
  dec.rank = 0;
  for (Index i = 0; i < k; ++i)
    if (dec.sigma(i) > cutoff) ++dec.rank;
  return dec;
}

inline SubChannelDecomposition decompose(const ChannelMatrix &h) { return decompose(h.data); }

namespace detail {

inline Index stream_count(const SubChannelDecomposition &dec, Index n_rf, Index m, Index n) {
  require_valid(n_rf >= 1 && m >= 1 && n >= 1, "n_rf, M and N must be >= 1");
  const Index streams = n_rf * m * n;
  if (dec.rank < streams)
    throw RankDeficiencyError("channel rank " + std::to_string(dec.rank) + " < N_RF*M*N = " +
                              std::to_string(streams));
  return streams;
}

} // namespace detail

inline PrecoderCombiner build_precoder_combiner(const SubChannelDecomposition &dec, Index n_rf, Index m,
                                                Index n, PrecoderMode mode = PrecoderMode::DdCorrected) {
  const Index streams = detail::stream_count(dec, n_rf, m, n);
  PrecoderCombiner pc;
  pc.mode = mode;
  pc.g = dec.v.leftCols(streams);
  pc.w = dec.u.leftCols(streams);
  if (mode == PrecoderMode::DdCorrected) {
    // G = V1 C_T^H with C_T^H = block_dft; W = U1 C_R with C_R = block_dft
    const CMatrix c = block_dft(n_rf, m, n);
    pc.g = pc.g * c;
    pc.w = pc.w * c;
  }
  return pc;
}

/// C_R W^H H G C_T, the map from stacked DD symbols to stacked DD outputs.
inline CMatrix effective_dd_channel(const CMatrix &h, const PrecoderCombiner &pc, Index n_rf, Index m,
                                    Index n) {
  const Index streams = n_rf * m * n;
  detail::require_dim(pc.g.cols() == streams && pc.w.cols() == streams,
                      "effective_dd_channel: precoder/combiner width != N_RF*M*N");
  detail::require_dim(h.cols() == pc.g.rows() && h.rows() == pc.w.rows(),
                      "effective_dd_channel: channel shape does not match precoder/combiner");
  const CMatrix c_t = block_idft(n_rf, m, n);
  const CMatrix c_r = block_dft(n_rf, m, n);
  return c_r * (pc.w.adjoint() * h * pc.g) * c_t;
}

inline GainVector sub_channel_gains(const SubChannelDecomposition &dec, Index n_rf, Index m, Index n) {
  const Index streams = detail::stream_count(dec, n_rf, m, n);
  return GainVector{dec.sigma.head(streams)};
}

/// x_hat = lambda x + n for one sub-channel.
inline Complex per_subchannel_receive(Complex x, double lambda, Complex noise) {
  detail::require_valid(lambda >= 0.0, "per_subchannel_receive: lambda must be >= 0");
  return lambda * x + noise;
}

} // namespace otfs_sc
