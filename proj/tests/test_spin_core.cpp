#include "nearcomm/spin_core.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nearcomm;

TEST(DWeight, FrozenValues) {
  EXPECT_DOUBLE_EQ(d_weight(HalfInt{10}, HalfInt{-10}), std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(d_weight(HalfInt{1}, HalfInt{-1}), 1.0);
  EXPECT_DOUBLE_EQ(d_weight(HalfInt{200}, HalfInt{0}), std::sqrt(10100.0));
  EXPECT_NEAR(d_weight(HalfInt{200}, HalfInt{0}), 100.498756211, 1e-9);
  EXPECT_DOUBLE_EQ(d_weight(HalfInt{4}, HalfInt{4}), 0.0);
}

TEST(DWeight, RejectsInvalid) {
  EXPECT_THROW(d_weight(HalfInt{4}, HalfInt{1}), std::invalid_argument);
  EXPECT_THROW(d_weight(HalfInt{4}, HalfInt{6}), std::invalid_argument);
  EXPECT_THROW(d_weight(HalfInt{4}, HalfInt{-6}), std::invalid_argument);
}

TEST(DWeight, SquareMatchesExactProduct) {
  for (long long tl = 0; tl <= 400; ++tl)
    for (long long tm = -tl; tm < tl; tm += 2) {
      const double d = d_weight(HalfInt{tl}, HalfInt{tm});
      const double exact = static_cast<double>((tl - tm) * (tl + tm + 2) / 4);
      EXPECT_NEAR(d * d, exact, 1e-15 * exact);
    }
}

TEST(IrrepGenerators, Examples) {
  auto g = irrep_generators(IrrepSpec{HalfInt{1}});
  ASSERT_EQ(g.diagonal.size(), 2u);
  EXPECT_EQ(g.diagonal[0].two_x, -1);
  EXPECT_EQ(g.diagonal[1].two_x, 1);
  ASSERT_EQ(g.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(g.weights[0], 1.0);

  g = irrep_generators(IrrepSpec{HalfInt{0}});
  EXPECT_EQ(g.diagonal.size(), 1u);
  EXPECT_TRUE(g.weights.empty());

  g = irrep_generators(IrrepSpec{HalfInt{4}});
  ASSERT_EQ(g.weights.size(), 4u);
  EXPECT_DOUBLE_EQ(g.weights[0], 2.0);
  EXPECT_DOUBLE_EQ(g.weights[1], std::sqrt(6.0));
  EXPECT_DOUBLE_EQ(g.weights[2], std::sqrt(6.0));
  EXPECT_DOUBLE_EQ(g.weights[3], 2.0);
}

TEST(TensorMultiplicity, SmallTables) {
  EXPECT_EQ(tensor_multiplicity(3, HalfInt{1}), 2);
  EXPECT_EQ(tensor_multiplicity(3, HalfInt{3}), 1);
  EXPECT_EQ(tensor_multiplicity(4, HalfInt{0}), 2);
  EXPECT_EQ(tensor_multiplicity(4, HalfInt{2}), 3);
  EXPECT_EQ(tensor_multiplicity(4, HalfInt{4}), 1);
  EXPECT_EQ(tensor_multiplicity(2, HalfInt{1}), 0);
  EXPECT_EQ(multiplicity_table(4).dimension_sum(), 16);
}

TEST(TensorMultiplicity, DimensionSumIsPowerOfTwo) {
  for (int N = 1; N <= 64; ++N) {
    const auto t = multiplicity_table(N);
    EXPECT_EQ(t.dimension_sum(), BigInt(1) << N) << "N=" << N;
    for (const auto& [tl, n] : t.entries) EXPECT_EQ((tl - N) % 2, 0);
  }
}

TEST(TensorMultiplicity, FrozenLargeValue) {
  // C(64,32) - C(64,33) computed independently.
  EXPECT_EQ(tensor_multiplicity(64, HalfInt{0}), BigInt("55534064877048198"));
}

TEST(TurningPoint, Values) {
  EXPECT_NEAR(multiplicity_turning_point(1000), 14.8271, 1e-4);
  EXPECT_LT(multiplicity_turning_point(1000), std::sqrt(1000.0) / 2);
  EXPECT_DOUBLE_EQ(multiplicity_turning_point(2), 0.0);
}

TEST(TurningPoint, StrictDecreaseBeyond) {
  for (int N = 1; N <= 64; ++N) {
    const double ls = multiplicity_turning_point(N);
    for (long long tl = N % 2; tl + 2 <= N; tl += 2) {
      const BigInt a = tensor_multiplicity(N, HalfInt{tl});
      const BigInt b = tensor_multiplicity(N, HalfInt{tl + 2});
      const double lam = tl / 2.0;
      if (lam > ls) EXPECT_GT(a, b) << "N=" << N << " 2lambda=" << tl;
      if (lam < ls) EXPECT_LT(a, b) << "N=" << N << " 2lambda=" << tl;
    }
  }
}

TEST(WeightEstimates, RandomizedInequalities) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const long long tl = std::uniform_int_distribution<long long>(0, 400)(rng);
    const long long tmu = tl - 2 * std::uniform_int_distribution<long long>(0, tl / 2)(rng);
    const long long ti = -tmu + 2 * std::uniform_int_distribution<long long>(0, tmu)(rng);
    if (ti > tmu) continue;
    const double L = (tl - tmu) / 2.0 + std::uniform_real_distribution<double>(0, 3)(rng);
    const double M = std::uniform_real_distribution<double>(0, 50)(rng);
    const double l = std::uniform_real_distribution<double>(0.5, 50)(rng);
    const double C = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto w = weight_estimates(HalfInt{tl}, HalfInt{tmu}, HalfInt{ti}, L, M, l, C);
    const double tol = 1e-9 * (1 + tl);
    EXPECT_LE(w.d_mu_i, w.d_lambda_i + tol);
    EXPECT_LE(w.d_lambda_i, w.monotone_cap + tol);
    if (w.edge_applies) {
      EXPECT_LE(w.d_lambda_i, w.edge_bound + tol);
    }
    EXPECT_LE(w.d_lambda_i - w.d_mu_i, w.gap_bound + tol);
    EXPECT_LE(w.d_lambda_i * w.d_lambda_i - w.d_mu_i * w.d_mu_i, w.square_gap_bound + tol);
    EXPECT_LE(w.d_lambda_i - w.d_mu_i + C * std::max(w.d_lambda_i, w.d_mu_i), w.combined_bound + tol);
  }
}

TEST(WeightEstimates, EdgeExample) {
  const auto w = weight_estimates(HalfInt{100}, HalfInt{100}, HalfInt{-98}, 0, 1, 1, 0);
  EXPECT_TRUE(w.edge_applies);
  EXPECT_DOUBLE_EQ(w.d_lambda_i, std::sqrt(198.0));
  EXPECT_DOUBLE_EQ(w.edge_bound, std::sqrt(200.0));
}

TEST(WeightEstimates, RejectsBadTuple) {
  EXPECT_THROW(weight_estimates(HalfInt{4}, HalfInt{6}, HalfInt{0}, 1, 1, 1, 0), std::invalid_argument);
  EXPECT_THROW(weight_estimates(HalfInt{4}, HalfInt{2}, HalfInt{4}, 1, 1, 1, 0), std::invalid_argument);
}

TEST(TurningPoint, TrichotomyHelper) {
  for (int N = 1; N <= 64; ++N) EXPECT_EQ(turning_point_violations(multiplicity_table(N)), 0) << N;
  // N = 2: lambda* = 0 exactly and n_0 = n_1 = 1.
  EXPECT_DOUBLE_EQ(multiplicity_turning_point(2), 0.0);
  MultiplicityTable broken = multiplicity_table(10);
  broken.entries[10] = 1000;
  EXPECT_EQ(turning_point_violations(broken), 1);
}

TEST(TensorMultiplicity, TableMatchesPerEntryFormula) {
  for (int N : {1, 2, 99, 100, 1001}) {
    const MultiplicityTable t = multiplicity_table(N);
    for (long long tl = N % 2; tl <= N; tl += 2) EXPECT_EQ(t.at(tl), tensor_multiplicity(N, HalfInt{tl})) << N << " " << tl;
    EXPECT_EQ(t.dimension_sum(), BigInt(1) << N);
  }
  EXPECT_THROW(multiplicity_table(0), std::invalid_argument);
}
