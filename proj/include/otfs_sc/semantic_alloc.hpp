#pragma once

// Importance scoring and importance-to-sub-channel allocation.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "otfs_sc/types.hpp"

namespace otfs_sc {

inline constexpr double kMaxSurpriseBits = 64.0;

struct ImportanceVector {
  std::vector<double> w; // bits, >= 0

  void validate() const {
    for (std::size_t k = 0; k < w.size(); ++k)
      detail::require_valid(std::isfinite(w[k]) && w[k] >= 0.0,
                            "importance[" + std::to_string(k) + "] must be finite and >= 0");
  }
  std::size_t size() const { return w.size(); }
};

struct GaussianParams {
  std::vector<double> mu;
  std::vector<double> sigma;
};

struct QuantizedLatent {
  std::vector<long long> y_hat;
};

/// pi[s] is the payload element carried on sub-channel s.
struct AllocationPermutation {
  std::vector<std::size_t> pi;

  std::size_t size() const { return pi.size(); }

  void validate() const {
    std::vector<char> seen(pi.size(), 0);
    for (std::size_t s = 0; s < pi.size(); ++s) {
      detail::require_valid(pi[s] < pi.size() && !seen[pi[s]],
                            "allocation: not a bijection at sub-channel " + std::to_string(s));
      seen[pi[s]] = 1;
    }
  }

  static AllocationPermutation identity(std::size_t k) {
    AllocationPermutation p;
    p.pi.resize(k);
    std::iota(p.pi.begin(), p.pi.end(), std::size_t{0});
    return p;
  }
};

namespace detail {

// Phi(b) - Phi(a) for a < b, evaluated on the side of zero where the
// complementary error function does not cancel.
inline double normal_interval_probability(double a, double b) {
  const double r = 1.0 / std::sqrt(2.0);
  if (a >= 0.0) return 0.5 * (std::erfc(a * r) - std::erfc(b * r));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * r) - std::erfc(-a * r));
  return 1.0 - 0.5 * (std::erfc(-a * r) + std::erfc(b * r));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

} // namespace detail

/// Surprise (bits) of each quantized value under its unit-width Gaussian bin:
/// w_k = -log2[Phi((y+0.5-mu)/sigma) - Phi((y-0.5-mu)/sigma)], capped at 64.
inline ImportanceVector gaussian_bin_entropy(const GaussianParams &params, const QuantizedLatent &latent) {
  const std::size_t k = latent.y_hat.size();
  detail::require_dim(params.mu.size() == k && params.sigma.size() == k,
                      "gaussian_bin_entropy: mu, sigma and y_hat lengths differ");
  ImportanceVector out;
  out.w.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double s = params.sigma[i];
    detail::require_valid(s > 0.0 && std::isfinite(s),
                          "gaussian_bin_entropy: sigma[" + std::to_string(i) + "] must be > 0");
    const double centre = static_cast<double>(latent.y_hat[i]) - params.mu[i];
    const double p = detail::normal_interval_probability((centre - 0.5) / s, (centre + 0.5) / s);
    out.w[i] = p > 0.0 ? std::min(-std::log2(p), kMaxSurpriseBits) : kMaxSurpriseBits;
  }
  return out;
}

/// Kendall tau-a: (concordant - discordant) / (K(K-1)/2); tied pairs count zero.
inline double exact_kendall_tau(std::span<const double> w, std::span<const double> g) {
  detail::require_dim(w.size() == g.size(), "exact_kendall_tau: length mismatch");
  detail::require_valid(w.size() >= 2, "exact_kendall_tau: need at least two elements");
  const std::size_t k = w.size();
  long long score = 0;
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t t = s + 1; t < k; ++t) {
      const double prod = (w[s] - w[t]) * (g[s] - g[t]);
      score += (prod > 0.0) - (prod < 0.0);
    }
  }
  return static_cast<double>(score) / (0.5 * static_cast<double>(k) * static_cast<double>(k - 1));
}

/// Sigmoid-smoothed pair agreement:
///   kappa = 2/(K(K-1)) * sum_{s<s'} sigmoid(sign * sharpness * (w_s-w_s')(g_s-g_s')).
/// sign = -1, sharpness = 2 is the published surrogate; sign = +1 tends to
/// (tau + 1) / 2 as sharpness grows.
inline double soft_kendall(std::span<const double> w, std::span<const double> g, double sharpness = 2.0,
                           int sign = -1) {
  detail::require_dim(w.size() == g.size(), "soft_kendall: length mismatch");
  detail::require_valid(w.size() >= 2, "soft_kendall: need at least two elements");
  detail::require_valid(sharpness > 0.0, "soft_kendall: sharpness must be > 0");
  detail::require_valid(sign == 1 || sign == -1, "soft_kendall: sign must be +1 or -1");
  const std::size_t k = w.size();
  double acc = 0.0;
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t t = s + 1; t < k; ++t)
      acc += detail::sigmoid(sign * sharpness * (w[s] - w[t]) * (g[s] - g[t]));
  return 2.0 * acc / (static_cast<double>(k) * static_cast<double>(k - 1));
}

namespace detail {

// indices sorted by value descending, ties by ascending index
inline std::vector<std::size_t> descending_order(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

} // namespace detail

/// Sort matching: the k-th most important element rides the k-th strongest
/// sub-channel.
inline AllocationPermutation allocate(std::span<const double> w, std::span<const double> g) {
  detail::require_dim(w.size() == g.size(), "allocate: importance and gain lengths differ");
  const auto by_importance = detail::descending_order(w);
  const auto by_gain = detail::descending_order(g);
  AllocationPermutation p;
  p.pi.resize(w.size());
  for (std::size_t r = 0; r < w.size(); ++r) p.pi[by_gain[r]] = by_importance[r];
  return p;
}

inline AllocationPermutation allocate(const ImportanceVector &w, const RVector &g) {
  return allocate(std::span<const double>(w.w), std::span<const double>(g.data(), static_cast<std::size_t>(g.size())));
}

/// stream[s] = payload[pi[s]].
template <typename T>
std::vector<T> apply_allocation(std::span<const T> payload, const AllocationPermutation &p) {
  detail::require_dim(payload.size() == p.size(), "apply_allocation: length mismatch");
  p.validate();
  std::vector<T> stream(payload.size());
  for (std::size_t s = 0; s < p.size(); ++s) stream[s] = payload[p.pi[s]];
  return stream;
}

/// payload[pi[s]] = received[s].
template <typename T>
std::vector<T> invert_allocation(std::span<const T> received, const AllocationPermutation &p) {
  detail::require_dim(received.size() == p.size(), "invert_allocation: length mismatch");
  p.validate();
  std::vector<T> payload(received.size());
  for (std::size_t s = 0; s < p.size(); ++s) payload[p.pi[s]] = received[s];
  return payload;
}

template <typename T>
std::vector<T> apply_allocation(const std::vector<T> &payload, const AllocationPermutation &p) {
  return apply_allocation(std::span<const T>(payload), p);
}

template <typename T>
std::vector<T> invert_allocation(const std::vector<T> &received, const AllocationPermutation &p) {
  return invert_allocation(std::span<const T>(received), p);
}

} // namespace otfs_sc
