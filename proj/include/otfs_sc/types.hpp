#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace otfs_sc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kJ{0.0, 1.0};

// Argument shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A value lies outside its documented domain.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The channel cannot carry the requested number of parallel streams.
class RankDeficiencyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Seed for a deterministic pseudo-random stream.
struct RngSeed {
  std::uint64_t value = 0;
};

/// splitmix64 step; used to derive independent sub-seeds from one seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline RngSeed derive_seed(RngSeed base, std::uint64_t stream) {
  return RngSeed{mix_seed(base.value ^ mix_seed(stream + 0x51ed2705ULL))};
}

namespace detail {

inline void require_dim(bool ok, const std::string &what) {
  if (!ok) throw DimensionError(what);
}

inline void require_valid(bool ok, const std::string &what) {
  if (!ok) throw ValidationError(what);
}

} // namespace detail
} // namespace otfs_sc
