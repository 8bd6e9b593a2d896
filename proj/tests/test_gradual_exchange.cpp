#include "nearcomm/gradual_exchange.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace nearcomm;

namespace {

ShiftSystem two_orbits(const std::vector<double>& a, const std::vector<double>& b) {
  Orbit oa{0, 2 * static_cast<long long>(a.size()), a};
  Orbit ob{0, 2 * static_cast<long long>(b.size()), b};
  return make_system(1, {oa, ob});
}

double dense_comm(const Eigen::MatrixXd& S) { return dense_norm(S.transpose() * S - S * S.transpose()); }

}  // namespace

TEST(Exchange, ConstantWeightsMatchChordLength) {
  for (int n0 : {2, 3, 5, 8, 13}) {
    const double b = 0.7;
    const ShiftSystem s = two_orbits(std::vector<double>(n0 + 4, b), std::vector<double>(n0 + 4, b));
    const ExchangePlan plan{0, 1, 2, 2 + n0};
    auto [sp, rec] = exchange_two_orbits(s, plan);
    EXPECT_NEAR(rec.measured_norm, 2 * b * std::sin(std::numbers::pi / (4 * n0)), 1e-14);
    EXPECT_NEAR(rec.bound, b * std::numbers::pi / (2 * n0), 1e-15);
    EXPECT_LE(rec.measured_norm, rec.bound);
  }
}

TEST(Exchange, ZeroWeightsLeaveOperatorUnchanged) {
  const ShiftSystem s = two_orbits(std::vector<double>(8, 0.0), std::vector<double>(8, 0.0));
  auto [sp, rec] = exchange_two_orbits(s, ExchangePlan{0, 1, 1, 6});
  EXPECT_EQ(rec.measured_norm, 0.0);
  EXPECT_EQ(to_dense(sp), to_dense(s));
}

TEST(Exchange, OrbitInterchangeByMatrixPower) {
  // Window of 8 levels (N0 = 7), weights 1 and 2.
  const ShiftSystem s = two_orbits(std::vector<double>(9, 1.0), std::vector<double>(9, 2.0));
  const ExchangePlan plan{0, 1, 1, 8};
  auto [sp, rec] = exchange_two_orbits(s, plan);
  EXPECT_NEAR(rec.bound, 1 + std::numbers::pi / 14 * 2, 1e-14);
  EXPECT_LE(rec.measured_norm, rec.bound + 1e-12);

  const Eigen::MatrixXd D = to_dense(sp);
  const auto off = sp.offsets();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(D.rows());
  x(static_cast<Eigen::Index>(off[1]) + 0) = 1.0;  // v at the first window level
  Eigen::VectorXd y = x;
  for (int k = 0; k < 7; ++k) y = D * y;
  // The image lies entirely on the w coordinate of the last window level.
  const Eigen::Index w_top = static_cast<Eigen::Index>(off[8]) + 1;
  EXPECT_GT(std::abs(y(w_top)), 1.0);
  EXPECT_NEAR(y.norm(), std::abs(y(w_top)), 1e-12);
}

TEST(Exchange, BoundaryIdentitiesExact) {
  const ShiftSystem s = two_orbits({0.5, 0.6, 0.7, 0.8, 0.9, 1.0}, {1.0, 0.9, 0.8, 0.7, 0.6, 0.5});
  auto [sp, rec] = exchange_two_orbits(s, ExchangePlan{0, 1, 1, 4});
  const Level& lo = sp.levels[1];
  EXPECT_EQ(lo.slot_vector(0), Eigen::Vector2d(1, 0));
  EXPECT_EQ(lo.slot_vector(1), Eigen::Vector2d(0, 1));
  const Level& hi = sp.levels[4];
  EXPECT_EQ(hi.slot_vector(0), Eigen::Vector2d(0, 1));
  EXPECT_EQ(hi.slot_vector(1), Eigen::Vector2d(-1, 0));
  EXPECT_EQ(hi.sign[1], -1);
  // Weights stay nonnegative after the downstream sign push.
  for (const auto& L : sp.levels)
    for (double w : L.weight) EXPECT_GE(w, 0.0);
}

TEST(Exchange, RandomizedBoundsSupportAndInterpolation) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int len = std::uniform_int_distribution<int>(4, 40)(rng);
    std::vector<double> a(static_cast<std::size_t>(len)), b(static_cast<std::size_t>(len));
    for (auto& x : a) x = U(rng);
    for (auto& x : b) x = U(rng);
    const ShiftSystem s = two_orbits(a, b);
    const int lo = std::uniform_int_distribution<int>(0, len - 3)(rng);
    const int hi = std::uniform_int_distribution<int>(lo + 2, len)(rng);
    const ExchangePlan plan{trial % 2, 1 - trial % 2, lo, hi};
    auto [sp, rec] = exchange_two_orbits(s, plan);
    const double scale = 1.0;
    EXPECT_LE(rec.measured_norm, rec.bound + 1e-10 * scale);
    EXPECT_LE(rec.commutator_measured, rec.commutator_bound + 1e-10 * scale);

    const Eigen::MatrixXd D0 = to_dense(s), D1 = to_dense(sp);
    EXPECT_NEAR(rec.measured_norm, dense_norm(D1 - D0), 1e-10);
    EXPECT_NEAR(rec.commutator_measured, dense_comm(D1), 1e-10);
    // Support: S' - S vanishes outside the window rows/columns.
    const auto off = s.offsets();
    const Eigen::MatrixXd diff = D1 - D0;
    for (Eigen::Index c = 0; c < diff.cols(); ++c)
      for (Eigen::Index r = 0; r < diff.rows(); ++r)
        if (diff(r, c) != 0.0) {
          EXPECT_GE(c, static_cast<Eigen::Index>(off[static_cast<std::size_t>(lo)]));
          EXPECT_LT(c, static_cast<Eigen::Index>(off[static_cast<std::size_t>(hi)]));
        }
    for (int i = lo; i < hi; ++i) {
      const auto& L0 = s.levels[static_cast<std::size_t>(i)];
      const auto& L1 = sp.levels[static_cast<std::size_t>(i)];
      const double mn = std::min(L0.weight[0], L0.weight[1]), mx = std::max(L0.weight[0], L0.weight[1]);
      for (int t = 0; t < 2; ++t) {
        EXPECT_GE(L1.weight[static_cast<std::size_t>(t)], mn - 1e-15);
        EXPECT_LE(L1.weight[static_cast<std::size_t>(t)], mx + 1e-15);
      }
    }
  }
}

TEST(Exchange, RejectsReuseOfVectors) {
  const ShiftSystem s = two_orbits(std::vector<double>(12, 1.0), std::vector<double>(12, 1.0));
  ShiftSystem sp = s;
  apply_exchange(sp, ExchangePlan{0, 1, 1, 5});
  EXPECT_THROW(apply_exchange(sp, ExchangePlan{0, 1, 5, 8}), std::invalid_argument);
  EXPECT_NO_THROW(apply_exchange(sp, ExchangePlan{0, 1, 6, 9}));
  EXPECT_THROW(apply_exchange(sp, ExchangePlan{0, 1, 10, 11}), std::invalid_argument);
}

TEST(BraidedSchedule, SmallCases) {
  const auto c2 = braided_schedule(2, 3);
  ASSERT_EQ(c2.size(), 1u);
  EXPECT_EQ(c2[0].pairs, (std::vector<std::pair<int, int>>{{2, 1}}));
  const auto c4 = braided_schedule(4, 2);
  ASSERT_EQ(c4.size(), 5u);
  EXPECT_EQ(c4[2].pairs, (std::vector<std::pair<int, int>>{{4, 3}, {2, 1}}));
  EXPECT_EQ(c4[0].rel_lo, 3);
  EXPECT_EQ(c4[0].rel_hi, 5);
  EXPECT_EQ(c4[4].rel_hi, 2 + 3 * 5);
  EXPECT_THROW(braided_schedule(1, 2), std::invalid_argument);
}

TEST(BraidedSchedule, EveryHeadReachesTrackOne) {
  for (int m = 2; m <= 12; ++m) {
    const auto cols = braided_schedule(m, 2);
    EXPECT_EQ(static_cast<int>(cols.size()), 2 * m - 3);
    std::vector<int> occupant(static_cast<std::size_t>(m + 1));
    for (int t = 1; t <= m; ++t) occupant[static_cast<std::size_t>(t)] = t;
    std::set<int> visited{occupant[1]};
    int prev_hi = 2;
    for (const auto& c : cols) {
      EXPECT_EQ(c.rel_lo, prev_hi + 1);
      prev_hi = c.rel_hi;
      std::set<int> used;
      for (auto [v, w] : c.pairs) {
        EXPECT_EQ(v, w + 1);
        EXPECT_TRUE(used.insert(v).second);
        EXPECT_TRUE(used.insert(w).second);
        std::swap(occupant[static_cast<std::size_t>(v)], occupant[static_cast<std::size_t>(w)]);
      }
      visited.insert(occupant[1]);
    }
    EXPECT_EQ(static_cast<int>(visited.size()), m) << "m=" << m;
  }
}
