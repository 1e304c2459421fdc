#pragma once

// Training-loss arithmetic, evaluated outside any training framework.
//
//   L1 = rate(y) + rate(z) + mse
//   L2 = ce + lambda_mse * mse - lambda_em * kappa
//
// All logarithms are base 2.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#include "otfs_sc/types.hpp"

namespace otfs_sc {

inline constexpr double kMinProbability = 0x1p-64;

struct RateEstimate {
  double bits = 0.0;
};

struct LossWeights {
  double lambda_mse = 20.0;
  double lambda_em = 0.5;
};

/// Sum of -log2(p), probabilities floored at 2^-64.
inline RateEstimate rate_term(std::span<const double> probs) {
  RateEstimate r;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    detail::require_valid(p > 0.0 && p <= 1.0,
                          "rate_term: probability[" + std::to_string(i) + "] must lie in (0, 1]");
    r.bits -= std::log2(std::max(p, kMinProbability));
  }
  return r;
}

inline double l1_loss(RateEstimate rate_y, RateEstimate rate_z, double mse) {
  detail::require_valid(mse >= 0.0, "l1_loss: mse must be >= 0");
  return rate_y.bits + rate_z.bits + mse;
}

/// -log2 predicted[true_label] with a one-hot ground truth.
inline double cross_entropy(std::size_t true_label, std::span<const double> predicted) {
  detail::require_valid(true_label < predicted.size(), "cross_entropy: true_label out of range");
  double total = 0.0;
  for (double p : predicted) {
    detail::require_valid(p >= 0.0 && p <= 1.0, "cross_entropy: probabilities must lie in [0, 1]");
    total += p;
  }
  detail::require_valid(std::abs(total - 1.0) <= 1e-6, "cross_entropy: probabilities must sum to 1");
  return -std::log2(std::max(predicted[true_label], kMinProbability));
}

/// Batch mean of per-sample cross entropies.
inline double mean_cross_entropy(std::span<const double> per_sample) {
  detail::require_valid(!per_sample.empty(), "mean_cross_entropy: empty batch");
  return std::accumulate(per_sample.begin(), per_sample.end(), 0.0) / static_cast<double>(per_sample.size());
}

inline double l2_loss(double ce, double mse, double kappa, const LossWeights &weights = {}) {
  detail::require_valid(mse >= 0.0, "l2_loss: mse must be >= 0");
  return ce + weights.lambda_mse * mse - weights.lambda_em * kappa;
}

} // namespace otfs_sc
