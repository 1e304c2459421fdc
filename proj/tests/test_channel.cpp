#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "otfs_sc/channel.hpp"

using namespace otfs_sc;

TEST(UlaResponse, Broadside) {
  const CVector a = ula_response(kPi / 2, 4);
  for (Index i = 0; i < 4; ++i) EXPECT_LT(std::abs(a(i) - Complex(0.5, 0.0)), 1e-15);
}

TEST(UlaResponse, SingleAntenna) {
  const CVector a = ula_response(1.234, 1);
  ASSERT_EQ(a.size(), 1);
  EXPECT_LT(std::abs(a(0) - Complex(1.0, 0.0)), 1e-15);
}

TEST(UlaResponse, Endfire) {
  const CVector a = ula_response(0.0, 2);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_LT(std::abs(a(0) - Complex(r, 0.0)), 1e-15);
  EXPECT_LT(std::abs(a(1) - Complex(-r, 0.0)), 1e-15);
}

TEST(UlaResponse, UnitNormAndZeroAntennasThrows) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(ula_response(u(rng), 1 + i % 16).norm(), 1.0, 1e-14);
  EXPECT_THROW(ula_response(0.3, 0), DimensionError);
}

TEST(CyclicShift, ForwardShiftAndClosure) {
  const RMatrix pi = cyclic_shift_matrix(4, 1);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(4);
  e0(0) = 1;
  const Eigen::VectorXd out = pi * e0;
  EXPECT_EQ(out(1), 1.0);
  EXPECT_EQ(out.sum(), 1.0);
  EXPECT_TRUE(cyclic_shift_matrix(4, 0) == RMatrix::Identity(4, 4));
  EXPECT_TRUE(cyclic_shift_matrix(4, 4) == RMatrix::Identity(4, 4));
  RMatrix p = RMatrix::Identity(6, 6);
  for (int i = 0; i < 6; ++i) p = p * cyclic_shift_matrix(6, 1);
  EXPECT_TRUE(p == RMatrix::Identity(6, 6));
  EXPECT_TRUE((pi.transpose() * pi) == RMatrix::Identity(4, 4));
}

TEST(PhaseRotation, FourthRootsOfUnity) {
  const CMatrix d = phase_rotation_matrix(4, 1);
  const Complex expect[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (Index q = 0; q < 4; ++q) EXPECT_LT(std::abs(d(q, q) - expect[q]), 1e-15);
  EXPECT_TRUE(phase_rotation_matrix(5, 0) == CMatrix::Identity(5, 5));
  EXPECT_LT((phase_rotation_matrix(8, -1) - phase_rotation_matrix(8, 1).conjugate()).norm(), 1e-15);
}

TEST(PhaseRotation, PowerSizeIsIdentityAndUnitary) {
  const Index mn = 16;
  CMatrix p = CMatrix::Identity(mn, mn);
  const CMatrix d = phase_rotation_matrix(mn, 1);
  for (Index i = 0; i < mn; ++i) p = p * d;
  EXPECT_LT((p - CMatrix::Identity(mn, mn)).norm(), 1e-12);
  EXPECT_TRUE(phase_rotation_matrix(mn, mn) == CMatrix::Identity(mn, mn));
  EXPECT_LT((d.adjoint() * d - CMatrix::Identity(mn, mn)).norm(), 1e-13);
}

TEST(BuildTimeChannel, IdentityPath) {
  DdMimoChannel c;
  c.m_delay = c.n_doppler = 2;
  c.paths = {PathParams{{1.0, 0.0}, 0, 0, 0.7, 2.1}};
  const auto h = build_time_channel(c);
  EXPECT_LT((h.data - CMatrix::Identity(4, 4)).norm(), 1e-15);
}

TEST(BuildTimeChannel, PureShift) {
  DdMimoChannel c;
  c.m_delay = c.n_doppler = 2;
  c.paths = {PathParams{{1.0, 0.0}, 1, 0, 0.0, 0.0}};
  const auto h = build_time_channel(c);
  EXPECT_LT((h.data - cyclic_shift_matrix(4, 1).cast<Complex>()).norm(), 1e-15);
}

TEST(BuildTimeChannel, MatchesEntryOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const ChannelConfig cc{2, 2, 2, 2, 3, 3, 1};
    const auto chan = sample_channel(cc, RngSeed{rng()});
    const auto h = build_time_channel(chan);
    EXPECT_LT((h.data - oracle::channel_by_entries(chan)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BuildTimeChannel, SingleAntennaKroneckerStructure) {
  const ChannelConfig cc{1, 1, 4, 2, 4, 5, 1};
  const auto chan = sample_channel(cc, RngSeed{5});
  const Index mn = 8;
  CMatrix ref = CMatrix::Zero(mn, mn);
  for (const auto &p : chan.paths)
    ref += p.gain * cyclic_shift_matrix(mn, p.delay_tap).cast<Complex>() * phase_rotation_matrix(mn, p.doppler_tap);
  EXPECT_LT((build_time_channel(chan).data - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildTimeChannel, LinearInGains) {
  auto chan = sample_channel(ChannelConfig{2, 3, 2, 2, 4, 3, 1}, RngSeed{9});
  const CMatrix h1 = build_time_channel(chan).data;
  for (auto &p : chan.paths) p.gain *= 2.0;
  EXPECT_LT((build_time_channel(chan).data - 2.0 * h1).norm(), 1e-13);
  EXPECT_EQ(h1.rows(), 3 * 4);
  EXPECT_EQ(h1.cols(), 2 * 4);
}

TEST(BuildTimeChannel, RejectsOutOfRangeTaps) {
  DdMimoChannel c;
  c.m_delay = c.n_doppler = 2;
  c.paths = {PathParams{{1.0, 0.0}, 4, 0, 0.0, 0.0}};
  EXPECT_THROW(build_time_channel(c), ValidationError);
  c.paths = {PathParams{{1.0, 0.0}, 0, -4, 0.0, 0.0}};
  EXPECT_THROW(build_time_channel(c), ValidationError);
  c.paths.clear();
  EXPECT_THROW(build_time_channel(c), ValidationError);
}

TEST(SampleChannel, DefaultBoundsAndDeterminism) {
  const ChannelConfig cc; // 8x8 antennas, 8x8 grid, 10 paths, taps <= 5 / |1|
  const auto a = sample_channel(cc, RngSeed{42});
  const auto b = sample_channel(cc, RngSeed{42});
  ASSERT_EQ(a.paths.size(), 10u);
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    const auto &p = a.paths[i];
    EXPECT_GE(p.delay_tap, 0);
    EXPECT_LE(p.delay_tap, 5);
    EXPECT_LE(std::abs(p.doppler_tap), 1);
    EXPECT_GE(p.aod, 0.0);
    EXPECT_LE(p.aod, kPi);
    EXPECT_GE(p.aoa, 0.0);
    EXPECT_LE(p.aoa, kPi);
    EXPECT_EQ(p.gain, b.paths[i].gain);
    EXPECT_EQ(p.delay_tap, b.paths[i].delay_tap);
    EXPECT_EQ(p.doppler_tap, b.paths[i].doppler_tap);
  }
}

TEST(SampleChannel, GainSecondMomentAndTapCoverage) {
  ChannelConfig cc;
  cc.paths = 1;
  double sum = 0.0;
  std::array<int, 6> delays{};
  std::array<int, 3> dopplers{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto c = sample_channel(cc, RngSeed{static_cast<std::uint64_t>(i) * 7919 + 1});
    sum += std::norm(c.paths[0].gain);
    ++delays[static_cast<std::size_t>(c.paths[0].delay_tap)];
    ++dopplers[static_cast<std::size_t>(c.paths[0].doppler_tap + 1)];
  }
  EXPECT_NEAR(sum / n, 1.0, 0.05);
  for (int d : delays) EXPECT_GT(d, n / 6 / 2);
  for (int d : dopplers) EXPECT_GT(d, n / 3 / 2);
}

TEST(SampleChannel, InvalidBoundsThrow) {
  ChannelConfig cc;
  cc.m_delay = cc.n_doppler = 2;
  cc.max_delay_tap = 4;
  EXPECT_THROW(sample_channel(cc, RngSeed{1}), ValidationError);
  cc.max_delay_tap = 1;
  cc.max_doppler_tap = 4;
  EXPECT_THROW(sample_channel(cc, RngSeed{1}), ValidationError);
}

TEST(ApplyChannel, NoiselessIsExactProduct) {
  std::mt19937_64 rng(8);
  const auto h = build_time_channel(sample_channel(ChannelConfig{2, 2, 2, 2, 3, 3, 1}, RngSeed{3}));
  const CVector y = oracle::random_cvector(8, rng);
  EXPECT_TRUE(apply_channel(h, y, 0.0, RngSeed{1}) == h.data * y);
  ChannelMatrix id{CMatrix::Identity(8, 8), 1, 1, 8};
  EXPECT_TRUE(apply_channel(id, y, 0.0, RngSeed{1}) == y);
}

TEST(ApplyChannel, DimensionMismatchThrows) {
  ChannelMatrix id{CMatrix::Identity(8, 8), 1, 1, 8};
  EXPECT_THROW(apply_channel(id, CVector::Zero(7), 0.0, RngSeed{1}), DimensionError);
}

TEST(ApplyChannel, NoiseVarianceAndCircularity) {
  // H = I_4, y = 0: 25000 applications give 1e5 noise draws
  const ChannelMatrix id{CMatrix::Identity(4, 4), 1, 1, 4};
  const CVector y = CVector::Zero(4);
  std::mt19937_64 rng(99);
  std::vector<Complex> r;
  r.reserve(100000);
  for (int i = 0; i < 25000; ++i) {
    const CVector out = apply_channel(id, y, 1.0, rng);
    for (Index k = 0; k < 4; ++k) r.push_back(out(k));
  }
  const double n = static_cast<double>(r.size());
  Complex mean{0.0, 0.0};
  for (const auto &v : r) mean += v;
  mean /= n;
  double var = 0.0, var_re = 0.0;
  Complex pseudo{0.0, 0.0};
  for (const auto &v : r) {
    var += std::norm(v - mean);
    var_re += (v.real() - mean.real()) * (v.real() - mean.real());
    pseudo += (v - mean) * (v - mean);
  }
  EXPECT_NEAR(var / n, 1.0, 0.05);
  EXPECT_NEAR(var_re / n, 0.5, 0.025);
  EXPECT_LT(std::abs(mean), 0.02);
  EXPECT_LT(std::abs(pseudo / n), 0.02);
}
