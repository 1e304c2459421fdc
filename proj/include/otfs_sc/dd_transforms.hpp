#pragma once

// Delay-Doppler <-> time-domain transforms for rectangular-pulse OTFS.
//
// With rectangular pulses the ISFFT/Heisenberg cascade collapses to a single
// inverse DFT along the Doppler axis:  S = X * F_N^H.  Frames are vectorized
// column-major, so vec(S) = (F_N^H kron I_M) vec(X).  No cyclic prefix is
// inserted; the channel model already acts cyclically over one frame.

#include <span>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "otfs_sc/types.hpp"

namespace otfs_sc {

/// Unitary DFT matrix, entry (a,b) = exp(-j 2 pi a b / n) / sqrt(n).
class DftMatrix {
public:
  explicit DftMatrix(Index size) : size_(size) {
    detail::require_dim(size >= 1, "DftMatrix: size must be >= 1");
    data_.resize(size, size);
    const double scale = 1.0 / std::sqrt(static_cast<double>(size));
    for (Index a = 0; a < size; ++a) {
      for (Index b = 0; b < size; ++b) {
        // reduce the exponent first so large products stay exact
        const Index k = (a * b) % size;
        const double phase = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(size);
        data_(a, b) = std::polar(scale, phase);
      }
    }
  }

  Index size() const { return size_; }
  const CMatrix &matrix() const { return data_; }
  CMatrix adjoint() const { return data_.adjoint(); }

private:
  Index size_;
  CMatrix data_;
};

/// One OTFS frame on the delay-Doppler grid: rows are delay bins, columns
/// are Doppler bins.
class DdGrid {
public:
  DdGrid(Index m_delay, Index n_doppler) : data_(CMatrix::Zero(m_delay, n_doppler)) {
    detail::require_dim(m_delay >= 1 && n_doppler >= 1, "DdGrid: M and N must be >= 1");
  }

  explicit DdGrid(CMatrix data) : data_(std::move(data)) {
    detail::require_dim(data_.rows() >= 1 && data_.cols() >= 1, "DdGrid: M and N must be >= 1");
    detail::require_valid(data_.allFinite(), "DdGrid: entries must be finite");
  }

  Index m_delay() const { return data_.rows(); }
  Index n_doppler() const { return data_.cols(); }
  const CMatrix &data() const { return data_; }
  Complex operator()(Index m, Index n) const { return data_(m, n); }

  /// Column-major vec(X).
  CVector vectorized() const { return data_.reshaped(); }

  /// Inverse of vectorized(): element q lands at (q mod M, q / M).
  static DdGrid from_vector(const CVector &v, Index m_delay, Index n_doppler) {
    detail::require_dim(m_delay >= 1 && n_doppler >= 1, "DdGrid: M and N must be >= 1");
    detail::require_dim(v.size() == m_delay * n_doppler, "DdGrid: vector length must equal M*N");
    return DdGrid(CMatrix(v.reshaped(m_delay, n_doppler)));
  }

private:
  CMatrix data_;
};

/// Time-domain samples of one frame on one RF chain (length M*N).
class TimeFrame {
public:
  TimeFrame() = default;
  explicit TimeFrame(CVector data) : data_(std::move(data)) {}

  Index size() const { return data_.size(); }
  const CVector &data() const { return data_; }

private:
  CVector data_;
};

/// S = X F_N^H, returned as vec(S).
inline TimeFrame otfs_modulate(const DdGrid &grid) {
  const DftMatrix fn(grid.n_doppler());
  const CMatrix s = grid.data() * fn.adjoint();
  return TimeFrame(s.reshaped());
}

/// X = S F_N with S rebuilt from the column-major frame.
inline DdGrid otfs_demodulate(const TimeFrame &frame, Index m_delay, Index n_doppler) {
  detail::require_dim(m_delay >= 1 && n_doppler >= 1, "otfs_demodulate: M and N must be >= 1");
  detail::require_dim(frame.size() == m_delay * n_doppler,
                      "otfs_demodulate: frame length " + std::to_string(frame.size()) +
                          " != M*N = " + std::to_string(m_delay * n_doppler));
  const DftMatrix fn(n_doppler);
  const CMatrix s = frame.data().reshaped(m_delay, n_doppler);
  return DdGrid(CMatrix(s * fn.matrix()));
}

/// Vertical concatenation of the per-chain frames.
inline CVector stack_chains(std::span<const TimeFrame> frames) {
  detail::require_dim(!frames.empty(), "stack_chains: at least one frame required");
  const Index len = frames.front().size();
  CVector out(len * static_cast<Index>(frames.size()));
  for (std::size_t c = 0; c < frames.size(); ++c) {
    detail::require_dim(frames[c].size() == len, "stack_chains: frames have inconsistent lengths");
    out.segment(static_cast<Index>(c) * len, len) = frames[c].data();
  }
  return out;
}

inline std::vector<TimeFrame> unstack_chains(const CVector &stacked, Index n_rf) {
  detail::require_dim(n_rf >= 1 && stacked.size() % n_rf == 0,
                      "unstack_chains: length must be a multiple of the chain count");
  const Index len = stacked.size() / n_rf;
  std::vector<TimeFrame> frames;
  frames.reserve(static_cast<std::size_t>(n_rf));
  for (Index c = 0; c < n_rf; ++c) frames.emplace_back(CVector(stacked.segment(c * len, len)));
  return frames;
}

/// I_{n_rf} kron (F_N^H kron I_M): the transmit-side block transform that
/// maps stacked DD vectors to stacked time-domain frames.
inline CMatrix block_idft(Index n_rf, Index m_delay, Index n_doppler) {
  const DftMatrix fn(n_doppler);
  const CMatrix per_chain = Eigen::kroneckerProduct(fn.adjoint(), CMatrix::Identity(m_delay, m_delay));
  return Eigen::kroneckerProduct(CMatrix::Identity(n_rf, n_rf), per_chain);
}

/// I_{n_rf} kron (F_N kron I_M): the receive-side counterpart.
inline CMatrix block_dft(Index n_rf, Index m_delay, Index n_doppler) {
  const DftMatrix fn(n_doppler);
  const CMatrix per_chain = Eigen::kroneckerProduct(fn.matrix(), CMatrix::Identity(m_delay, m_delay));
  return Eigen::kroneckerProduct(CMatrix::Identity(n_rf, n_rf), per_chain);
}

} // namespace otfs_sc
