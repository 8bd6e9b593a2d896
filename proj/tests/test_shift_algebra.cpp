#include "nearcomm/shift_algebra.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nearcomm;

namespace {

ShiftSystem single(std::vector<double> w) {
  Orbit o;
  o.two_lo = 0;
  o.two_hi = 2 * static_cast<long long>(w.size());
  o.weights = std::move(w);
  return make_system(1, {o});
}

double dense_self_commutator(const Eigen::MatrixXd& S) {
  return dense_norm(S.transpose() * S - S * S.transpose());
}

// Random system with a random orthogonal rotation applied on each level.
ShiftSystem random_rotated(std::mt19937_64& rng, int orbits, int span) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_int_distribution<int> len(1, span);
  std::vector<Orbit> os;
  for (int r = 0; r < orbits; ++r) {
    Orbit o;
    const int n = len(rng);
    o.two_lo = 2 * std::uniform_int_distribution<int>(0, span - n)(rng);
    o.two_hi = o.two_lo + 2 * (n - 1);
    for (int k = 0; k + 1 < n; ++k) o.weights.push_back(U(rng));
    os.push_back(o);
  }
  ShiftSystem s = make_system(3, os);
  for (auto& L : s.levels) {
    if (L.size() == 0) continue;
    Eigen::MatrixXd G(L.size(), L.size());
    for (int i = 0; i < G.size(); ++i) G.data()[i] = U(rng);
    L.rotation = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
  }
  return s;
}

}  // namespace

TEST(BuildSystem, DefiningRepresentation) {
  auto [d, s] = build_system({IrrepSpec{HalfInt{1}}}, 1);
  ASSERT_EQ(s.levels.size(), 2u);
  EXPECT_DOUBLE_EQ(d.eigenvalue[0], -0.5);
  EXPECT_DOUBLE_EQ(d.eigenvalue[1], 0.5);
  Eigen::MatrixXd expect(2, 2);
  expect << 0, 0, 1, 0;
  EXPECT_EQ(to_dense(s), expect);
}

TEST(BuildSystem, NestedMotivatingSystem) {
  std::vector<IrrepSpec> spins;
  for (long long l = 1900; l <= 4900; l += 500) spins.push_back(IrrepSpec{HalfInt::from_int(l)});
  auto [d, s] = build_system(spins, 4900);
  EXPECT_EQ(s.orbits.size(), 7u);
  EXPECT_EQ(s.levels.size(), 9801u);
  EXPECT_EQ(s.dimension(), 7u * 0 + (3801u + 4801u + 5801u + 6801u + 7801u + 8801u + 9801u));
  for (std::size_t r = 0; r + 1 < s.orbits.size(); ++r) {
    EXPECT_GE(s.orbits[r].two_lo, s.orbits[r + 1].two_lo);
    EXPECT_LE(s.orbits[r].two_hi, s.orbits[r + 1].two_hi);
  }
  EXPECT_NEAR(self_commutator_norm(s), 2.0 * 4900 / (4900.0 * 4900.0), 1e-15);
}

TEST(BuildSystem, DuplicateSummand) {
  auto [d, s] = build_system({IrrepSpec{HalfInt{4}}, IrrepSpec{HalfInt{4}}}, 2);
  EXPECT_EQ(s.levels.size(), 5u);
  for (const auto& L : s.levels) EXPECT_EQ(L.size(), 2);
}

TEST(BuildSystem, RejectsMixedParityAndUnsorted) {
  EXPECT_THROW(build_system({IrrepSpec{HalfInt{1}}, IrrepSpec{HalfInt{2}}}, 1), std::invalid_argument);
  EXPECT_THROW(build_system({IrrepSpec{HalfInt{4}}, IrrepSpec{HalfInt{2}}}, 1), std::invalid_argument);
}

TEST(LevelDiagonal, SpinOne) {
  auto [d, s] = build_system({IrrepSpec{HalfInt{2}}}, 1);
  Eigen::MatrixXd expect = Eigen::Vector3d(-1, 0, 1).asDiagonal();
  EXPECT_EQ(to_dense(d), expect);
}

TEST(PhaseNormalize, MixedSigns) {
  const ShiftSystem s = single({1, -2, 3});
  const auto p = phase_normalize(s);
  std::vector<int> signs;
  for (const auto& L : p.system.levels) signs.push_back(L.sign[0]);
  EXPECT_EQ(signs, (std::vector<int>{1, 1, -1, -1}));
  EXPECT_EQ(p.system.levels[0].weight[0], 1.0);
  EXPECT_EQ(p.system.levels[1].weight[0], 2.0);
  EXPECT_EQ(p.system.levels[2].weight[0], 3.0);
  // The operator is unchanged; in the slot basis it is conjugated by the recorded flips.
  EXPECT_EQ(to_dense(p.system), to_dense(s));
  Eigen::VectorXd f(4);
  for (int i = 0; i < 4; ++i) f(i) = p.record.flip[static_cast<std::size_t>(i)][0];
  const Eigen::MatrixXd W = f.asDiagonal();
  EXPECT_EQ(W.transpose() * shift_dense(s) * W, shift_dense(p.system));
}

TEST(PhaseNormalize, IdentityOnNonnegative) {
  const ShiftSystem s = single({1, 2, 0.5});
  const auto p = phase_normalize(s);
  for (const auto& row : p.record.flip)
    for (int f : row) EXPECT_EQ(f, 1);
}

TEST(PhaseNormalize, SingleTransition) {
  const auto p = phase_normalize(single({-1}));
  EXPECT_EQ(p.system.levels[0].weight[0], 1.0);
  EXPECT_EQ(p.record.flip[1][0], -1);
}

TEST(PhaseNormalize, RandomRotatedEquivalence) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const ShiftSystem s = random_rotated(rng, 4, 8);
    const auto p = phase_normalize(s);
    for (const auto& L : p.system.levels)
      for (int t = 0; t < L.size(); ++t)
        if (L.next[static_cast<std::size_t>(t)] >= 0) EXPECT_GE(L.weight[static_cast<std::size_t>(t)], 0.0);
    EXPECT_LT((to_dense(p.system) - to_dense(s)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(SelfCommutator, Examples) {
  auto [d, s] = build_system({IrrepSpec{HalfInt{4}}}, 1);
  EXPECT_NEAR(self_commutator_norm(s), 4.0, 1e-13);
  EXPECT_NEAR(self_commutator_norm(single({0.3, 0.3, 0.3, 0.3})), 0.09, 1e-15);
  EXPECT_NEAR(self_commutator_norm(single({1, 2, 2, 1})), 3.0, 1e-15);
}

TEST(SelfCommutator, SpinFamilyEqualsTwoLambda) {
  for (long long tl = 1; tl <= 40; ++tl) {
    auto [d, s] = build_system({IrrepSpec{HalfInt{tl}}}, 1);
    EXPECT_NEAR(self_commutator_norm(s), static_cast<double>(tl), 1e-11 * tl);
    EXPECT_NEAR(dense_self_commutator(to_dense(s)), static_cast<double>(tl), 1e-10 * tl);
  }
}

TEST(SelfCommutator, MatchesDenseOnRandomSystems) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const ShiftSystem s = random_rotated(rng, 5, 20);
    const Eigen::MatrixXd D = to_dense(s);
    EXPECT_NEAR(self_commutator_norm(s), dense_self_commutator(D), 1e-10);
    EXPECT_NEAR(operator_norm(s), dense_norm(D), 1e-10);
  }
}

TEST(SuperdiagonalNorm, Examples) {
  const ShiftSystem a = single({1, 2, 3});
  EXPECT_EQ(superdiagonal_norm(a, a), 0.0);
  ShiftSystem b = a;
  b.levels[1].weight[0] = 0.0;
  b.levels[1].next[0] = -1;
  EXPECT_NEAR(superdiagonal_norm(a, b), 2.0, 1e-15);
  EXPECT_THROW(superdiagonal_norm(a, single({1, 2})), std::invalid_argument);
}

TEST(SuperdiagonalNorm, MatchesDenseOnRandomPairs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    ShiftSystem x = random_rotated(rng, 3, 6);
    ShiftSystem y = x;
    std::normal_distribution<double> g(0, 1);
    for (auto& L : y.levels)
      for (auto& w : L.weight) w += g(rng);
    const double dense = dense_norm(to_dense(x) - to_dense(y));
    EXPECT_NEAR(superdiagonal_norm(x, y), dense, 1e-10 * (1 + dense));
  }
}

TEST(DenseBridge, SlotBasisRoundTrip) {
  std::mt19937_64 rng(9);
  const ShiftSystem s = random_rotated(rng, 4, 10);
  const Eigen::MatrixXd Q = slot_basis(s);
  const Eigen::Index n = Q.rows();
  EXPECT_LT((Q.transpose() * Q - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((Q * shift_dense(s) * Q.transpose() - to_dense(s)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DenseBridge, ProjectionIsOrthogonal) {
  std::mt19937_64 rng(13);
  const ShiftSystem s = random_rotated(rng, 3, 6);
  LevelProjection p;
  for (const auto& L : s.levels) {
    p.slots.emplace_back();
    for (int t = 0; t < L.size(); t += 2) p.slots.back().push_back(t);
  }
  const Eigen::MatrixXd P = projection_dense(s, p);
  EXPECT_LT((P * P - P).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(P.trace(), static_cast<double>(p.rank()), 1e-12);
}

TEST(DenseBridge, CapEnforced) {
  auto [d, s] = build_system({IrrepSpec{HalfInt{100}}}, 1);
  EXPECT_THROW(to_dense(s, 50), std::length_error);
}

TEST(Chains, PlainSystemHasOneChainPerOrbit) {
  auto [d, s] = build_system({IrrepSpec{HalfInt{2}}, IrrepSpec{HalfInt{4}}}, 1);
  const auto c = chains(s);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].nodes.size(), 5u);
  EXPECT_EQ(c[1].nodes.size(), 3u);
}
