#pragma once

// Gray-labelled square 64-QAM.
//
// Label layout (6 bits): bits 5..3 select the in-phase level, bits 2..0 the
// quadrature level.  Each 3-bit field is the reflected Gray code of the PAM
// level index i in 0..7, where level i sits at amplitude -7 + 2i.  Points are
// scaled by 1/sqrt(42) for unit average energy, so label 0 is (-7, -7)/sqrt(42).

#include <array>
#include <bit>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otfs_sc/types.hpp"

namespace otfs_sc {

inline constexpr int kQamOrder = 64;
inline constexpr int kPamLevels = 8;
inline constexpr double kMinGainDefault = 1e-6;

class Constellation {
public:
  using Points = std::array<Complex, kQamOrder>;

  Constellation() : points_(gray_points()) {}
  explicit Constellation(const Points &points) : points_(points) {}

  const Points &points() const { return points_; }
  Complex point(int label) const { return points_.at(static_cast<std::size_t>(label)); }

  double mean_energy() const {
    double e = 0.0;
    for (const auto &p : points_) e += std::norm(p);
    return e / kQamOrder;
  }

  static int gray(int i) { return i ^ (i >> 1); }

  static int gray_inverse(int g) {
    int i = 0;
    for (; g; g >>= 1) i ^= g;
    return i;
  }

  static Points gray_points() {
    Points pts{};
    const double scale = 1.0 / std::sqrt(42.0);
    for (int label = 0; label < kQamOrder; ++label) {
      const int i_level = gray_inverse(label >> 3);
      const int q_level = gray_inverse(label & 7);
      pts[static_cast<std::size_t>(label)] =
          Complex(-7.0 + 2.0 * i_level, -7.0 + 2.0 * q_level) * scale;
    }
    return pts;
  }

private:
  Points points_;
};

inline const Constellation &default_constellation() {
  static const Constellation c;
  return c;
}

/// True iff every horizontally or vertically adjacent pair of grid points
/// carries labels one bit apart.  Works on any 8x8 square arrangement.
inline bool gray_adjacency_holds(const Constellation &c) {
  // place labels on the 8x8 grid by rounding the unnormalized coordinates
  std::array<std::array<int, kPamLevels>, kPamLevels> grid{};
  for (auto &row : grid) row.fill(-1);
  const double scale = std::sqrt(42.0);
  for (int label = 0; label < kQamOrder; ++label) {
    const Complex p = c.point(label) * scale;
    const long ix = std::lround((p.real() + 7.0) / 2.0);
    const long iq = std::lround((p.imag() + 7.0) / 2.0);
    if (ix < 0 || ix >= kPamLevels || iq < 0 || iq >= kPamLevels) return false;
    int &slot = grid[static_cast<std::size_t>(ix)][static_cast<std::size_t>(iq)];
    if (slot != -1) return false;
    slot = label;
  }
  auto one_bit = [](int a, int b) { return std::popcount(static_cast<unsigned>(a ^ b)) == 1; };
  for (std::size_t x = 0; x < kPamLevels; ++x) {
    for (std::size_t q = 0; q < kPamLevels; ++q) {
      if (x + 1 < kPamLevels && !one_bit(grid[x][q], grid[x + 1][q])) return false;
      if (q + 1 < kPamLevels && !one_bit(grid[x][q], grid[x][q + 1])) return false;
    }
  }
  return true;
}

inline CVector modulate(std::span<const int> indices, const Constellation &c = default_constellation()) {
  CVector out(static_cast<Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int label = indices[i];
    detail::require_valid(label >= 0 && label < kQamOrder,
                          "modulate: index " + std::to_string(label) + " at position " + std::to_string(i) +
                              " outside [0, 64)");
    out(static_cast<Index>(i)) = c.point(label);
  }
  return out;
}

/// Minimum-distance decision; exact ties resolve to the smaller label.
inline int demodulate_hard(Complex received, const Constellation &c = default_constellation()) {
  int best = 0;
  double best_d = std::norm(received - c.point(0));
  for (int label = 1; label < kQamOrder; ++label) {
    const double d = std::norm(received - c.point(label));
    if (d < best_d) {
      best_d = d;
      best = label;
    }
  }
  return best;
}

inline std::vector<int> demodulate_hard(const CVector &received, const Constellation &c = default_constellation()) {
  std::vector<int> out(static_cast<std::size_t>(received.size()));
  for (Index i = 0; i < received.size(); ++i) out[static_cast<std::size_t>(i)] = demodulate_hard(received(i), c);
  return out;
}

/// Zero-forcing on one sub-channel; nullopt marks an erasure.
inline std::optional<Complex> equalize(Complex x_hat, double lambda, double min_gain = kMinGainDefault) {
  if (!(lambda >= min_gain)) return std::nullopt;
  return x_hat / lambda;
}

/// Theoretical symbol error rate of square M-QAM on AWGN with average symbol
/// energy es and complex noise variance n0.
inline double square_qam_ser(int order, double es, double n0) {
  const double sqrt_m = std::sqrt(static_cast<double>(order));
  const double arg = std::sqrt(3.0 * es / ((order - 1) * n0));
  const double q = 0.5 * std::erfc(arg / std::sqrt(2.0));
  const double p_axis = 2.0 * (1.0 - 1.0 / sqrt_m) * q;
  return 1.0 - (1.0 - p_axis) * (1.0 - p_axis);
}

} // namespace otfs_sc
