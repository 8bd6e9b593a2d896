#include "nearcomm/tensor_verifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <map>

using namespace nearcomm;

namespace {

using cd = std::complex<double>;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

Eigen::Matrix2d real_form(int i) {
  Eigen::Matrix2d m;
  if (i == 1) m << 0, 0.5, 0.5, 0;
  if (i == 2) m << 0, -0.5, 0.5, 0;
  if (i == 3) m << -0.5, 0, 0, 0.5;
  return m;
}

double op_norm(const Eigen::MatrixXcd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

OgataResult override_case() {
  OgataOptions opt;
  opt.partition = PartitionOptions{5, 0.0};
  opt.delta = 4.0 / 11.0;
  opt.ell = 2.0;
  return ogata_construct(11, opt);
}

}  // namespace

TEST(TensorObservable, SingleSiteIsTheInput) {
  Eigen::Matrix2cd A;
  A << cd(1, 2), cd(-3, 0.5), cd(0.25, -1), cd(4, 0);
  EXPECT_TRUE(build_tensor_observable(1, A).matrix.isApprox(A, 0.0));
}

TEST(TensorObservable, CommutationRelations) {
  for (int N = 1; N <= 8; ++N) {
    const Eigen::MatrixXcd s1 = build_tensor_observable(N, 1).matrix, s2 = build_tensor_observable(N, 2).matrix,
                           s3 = build_tensor_observable(N, 3).matrix;
    const cd f(0, 1.0 / N);
    EXPECT_LT((s1 * s2 - s2 * s1 - f * s3).cwiseAbs().maxCoeff(), 1e-14) << N;
    EXPECT_LT((s2 * s3 - s3 * s2 - f * s1).cwiseAbs().maxCoeff(), 1e-14) << N;
    EXPECT_LT((s3 * s1 - s1 * s3 - f * s2).cwiseAbs().maxCoeff(), 1e-14) << N;
  }
}

TEST(TensorObservable, DiagonalSpectrum) {
  const Eigen::MatrixXcd s3 = build_tensor_observable(4, 3).matrix;
  for (Eigen::Index x = 0; x < 16; ++x) {
    int k = 0;
    for (int b = 0; b < 4; ++b) k += (x >> b) & 1;
    EXPECT_DOUBLE_EQ(s3(x, x).real(), (k - 2) / 4.0);
  }
  EXPECT_TRUE(s3.isDiagonal(0.0));
}

TEST(TensorObservable, NormsAreOneHalf) {
  for (int N = 1; N <= 6; ++N)
    for (int i = 1; i <= 3; ++i) EXPECT_NEAR(op_norm(build_tensor_observable(N, i).matrix), 0.5, 1e-12);
  for (int N = 7; N <= 10; ++N) {
    EXPECT_NEAR(symmetric_norm(tensor_real(N, real_form(1))), 0.5, 1e-12);
    EXPECT_NEAR(antisymmetric_norm(tensor_real(N, real_form(2))), 0.5, 1e-12);
  }
}

TEST(TensorObservable, RealFormMatchesComplex) {
  for (int N = 1; N <= 6; ++N) {
    EXPECT_TRUE(tensor_real(N, real_form(1)).cast<cd>().isApprox(build_tensor_observable(N, 1).matrix, 0.0));
    EXPECT_LT((tensor_real(N, real_form(2)).cast<cd>() - cd(0, 1) * build_tensor_observable(N, 2).matrix).cwiseAbs().maxCoeff(),
              1e-15);
  }
}

TEST(TensorObservable, CapIsEnforced) {
  EXPECT_THROW(build_tensor_observable(13, 1), std::invalid_argument);
  EXPECT_THROW(build_tensor_observable(5, 1, 4), std::invalid_argument);
  EXPECT_THROW(decomposition_unitary(13), std::invalid_argument);
  EXPECT_THROW(decomposition_unitary(0), std::invalid_argument);
}

TEST(Decomposition, SingletAndTriplet) {
  const DecompositionUnitary u = decomposition_unitary(2);
  ASSERT_EQ(u.blocks.size(), 2u);
  EXPECT_EQ(u.blocks[0].lambda.two_x, 0);
  EXPECT_EQ(u.blocks[1].lambda.two_x, 2);
  const double r = 1 / std::sqrt(2.0);
  Eigen::Vector4d singlet(0, r, -r, 0);
  EXPECT_NEAR(std::abs(u.U.col(0).dot(singlet)), 1.0, 1e-15);
  // Triplet: lowest is both bits clear, highest both set.
  EXPECT_NEAR(std::abs(u.U(0, 1)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(u.U(3, 3)), 1.0, 1e-15);
}

TEST(Decomposition, ThreeSites) {
  const DecompositionUnitary u = decomposition_unitary(3);
  ASSERT_EQ(u.blocks.size(), 3u);
  EXPECT_EQ(u.blocks[0].lambda.two_x, 1);
  EXPECT_EQ(u.blocks[1].lambda.two_x, 1);
  EXPECT_EQ(u.blocks[2].lambda.two_x, 3);
  EXPECT_EQ(u.blocks[0].copy, 0);
  EXPECT_EQ(u.blocks[1].copy, 1);
  EXPECT_EQ(u.blocks[2].offset, 4);
}

TEST(Decomposition, MultiplicitiesMatchBinomialFormula) {
  for (int N = 1; N <= 10; ++N) {
    const DecompositionUnitary u = decomposition_unitary(N);
    std::map<long long, int> count;
    Eigen::Index expected_offset = 0;
    for (const IrrepBlock& b : u.blocks) {
      EXPECT_EQ(b.offset, expected_offset);
      expected_offset += b.lambda.two_x + 1;
      ++count[b.lambda.two_x];
    }
    EXPECT_EQ(expected_offset, Eigen::Index{1} << N);
    for (long long tl = N % 2; tl <= N; tl += 2) {
      const int k = static_cast<int>((N - tl) / 2);
      EXPECT_EQ(count[tl], binom(N, k) - binom(N, k - 1)) << N << " " << tl;
    }
    EXPECT_LE(u.orthogonality_residual, 1e-12) << N;
    EXPECT_LE(u.block_residual, 1e-10) << N;
  }
}

TEST(Decomposition, DenseConjugationIsBlockDiagonal) {
  const int N = 5;
  const DecompositionUnitary u = decomposition_unitary(N);
  EXPECT_LT((u.U.transpose() * u.U - Eigen::MatrixXd::Identity(32, 32)).cwiseAbs().maxCoeff(), 1e-13);
  const Eigen::MatrixXd B3 = u.U.transpose() * tensor_real(N, real_form(3)) * u.U;
  EXPECT_TRUE(B3.isDiagonal(1e-13));
  for (const IrrepBlock& b : u.blocks)
    for (long long j = 0; j <= b.lambda.two_x; ++j)
      EXPECT_NEAR(B3(b.offset + j, b.offset + j), (2.0 * j - b.lambda.two_x) / (2.0 * N), 1e-13);
}

TEST(VerifyFull, ThreeSitesTrivial) {
  const VerificationReport rep = verify_full(ogata_construct(3));
  EXPECT_NEAR(rep.distance[0], 0.5, 1e-12);
  EXPECT_NEAR(rep.distance[1], 0.5, 1e-12);
  EXPECT_NEAR(rep.distance[2], 0.0, 1e-12);
  EXPECT_EQ(rep.commutator, 0.0);
  for (const BoundCheck& c : rep.checks.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.measured;
}

TEST(VerifyFull, DefaultOddN) {
  for (int N : {1, 5, 7, 9}) {
    const VerificationReport rep = verify_full(ogata_construct(N));
    EXPECT_TRUE(rep.checks.all_pass()) << N;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(rep.distance[i], rep.structured[i], 1e-10);
  }
}

TEST(VerifyFull, OverrideCaseMatchesStructuredDistances) {
  const OgataResult r = override_case();
  const VerificationReport rep = verify_full(r);
  for (const BoundCheck& c : rep.checks.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.measured << " vs " << c.stated;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(rep.distance[i], rep.structured[i], 1e-10);
  EXPECT_GT(rep.distance[2], 0.0);
  EXPECT_LT(rep.commutator, 1e-12);
}

TEST(EvenExtension, DenseIdentity) {
  for (int N : {1, 3, 5, 7}) {
    const OgataResult r = ogata_construct(N);
    const DecompositionUnitary u = decomposition_unitary(N);
    const DenseFamily Y = materialize(r, u);
    const EvenExtension e = extend_even(r);
    const Eigen::MatrixXd Ys[3] = {Y.y1, Y.iy2, Y.y3};
    for (int i = 1; i <= 3; ++i) {
      const Eigen::MatrixXd T = tensor_real(N, real_form(i)), T1 = tensor_real(N + 1, real_form(i));
      // T_{N+1}(A) = N/(N+1) T_N(A) (x) I + 1/(N+1) I (x) A, the new site being bit 0.
      Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(T1.rows(), T1.cols());
      for (Eigen::Index x = 0; x < T.rows(); ++x) tail.block(2 * x, 2 * x, 2, 2) = real_form(i) / (N + 1.0);
      EXPECT_LT((T1 - extend_dense(T, N) - tail).cwiseAbs().maxCoeff(), 1e-15);

      const Eigen::MatrixXd D = T1 - extend_dense(Ys[i - 1], N);
      const double d = i == 2 ? antisymmetric_norm(D) : symmetric_norm(D);
      EXPECT_LE(d, (i == 3 ? e.distance3 : e.distance12) + 1e-12);
    }
    const Eigen::MatrixXd E1 = extend_dense(Y.y1, N), E2 = extend_dense(Y.iy2, N), E3 = extend_dense(Y.y3, N);
    EXPECT_LT((E1 * E2 - E2 * E1).norm(), 1e-12);
    EXPECT_LT((E1 * E3 - E3 * E1).norm(), 1e-12);
    EXPECT_LT((E2 * E3 - E3 * E2).norm(), 1e-12);
  }
}

TEST(Norms, SymmetricAndAntisymmetric) {
  Eigen::Matrix3d s;
  s << 2, 1, 0, 1, -3, 0, 0, 0, 1;
  EXPECT_NEAR(symmetric_norm(s), Eigen::JacobiSVD<Eigen::Matrix3d>(s).singularValues()(0), 1e-13);
  Eigen::Matrix3d a;
  a << 0, 1, -2, -1, 0, 3, 2, -3, 0;
  EXPECT_NEAR(antisymmetric_norm(a), std::sqrt(14.0), 1e-13);
}
