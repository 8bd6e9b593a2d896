#pragma once

#include "nearcomm/ogata_pipeline.hpp"
#include "nearcomm/report.hpp"
#include "nearcomm/spin_core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace nearcomm {

inline constexpr int kTensorCap = 12;

// T_N(A) = (1/N) sum_k I^(N-1-k) (x) A (x) I^k; site k acts on bit k of the basis index.
struct DenseObservable {
  int N = 0;
  Eigen::MatrixXcd matrix;
};

DenseObservable build_tensor_observable(int N, const Eigen::Matrix2cd& A, int cap = kTensorCap);
DenseObservable build_tensor_observable(int N, int pauli_index, int cap = kTensorCap);

// Real form for real 2x2 inputs (sigma_1, i sigma_2, sigma_3).
Eigen::MatrixXd tensor_real(int N, const Eigen::Matrix2d& A, int cap = kTensorCap);

struct IrrepBlock {
  HalfInt lambda;
  long long copy = 0;
  Eigen::Index offset = 0;  // first column; columns run over m = -lambda .. lambda
};

// Real orthogonal U with U^T T_N(sigma_i) U = (+)_blocks (1/N) S^lambda(sigma_i).
struct DecompositionUnitary {
  int N = 0;
  Eigen::MatrixXd U;
  std::vector<IrrepBlock> blocks;  // ascending lambda, copies contiguous
  double orthogonality_residual = 0;  // max |U^T U - I|
  double block_residual = 0;          // max_i max |T_N(sigma_i) U - U B_i|
};

DecompositionUnitary decomposition_unitary(int N, int cap = kTensorCap, double tol = 1e-10);

// A_1', i A_2', A_3' of an OgataResult in the 2^N computational basis.
struct DenseFamily {
  Eigen::MatrixXd y1, iy2, y3;
};

DenseFamily materialize(const OgataResult& r, const DecompositionUnitary& u);

struct VerificationReport {
  int N = 0;
  BoundsRecord checks;
  double distance[3] = {0, 0, 0};    // dense ||T_N(sigma_i) - Y_i||
  double structured[3] = {0, 0, 0};  // predictions carried by the OgataResult
  double commutator = 0;             // max Frobenius norm of [Y_i, Y_j]
  double orthogonality = 0, block_residual = 0;
};

VerificationReport verify_full(const OgataResult& r, const DecompositionUnitary& u);
VerificationReport verify_full(const OgataResult& r, int cap = kTensorCap);

// N/(N+1) Y (x) I, the even extension in the computational basis.
Eigen::MatrixXd extend_dense(const Eigen::MatrixXd& Y, int N);

// Largest absolute eigenvalue of a symmetric matrix; largest singular value of an antisymmetric one.
double symmetric_norm(const Eigen::MatrixXd& m);
double antisymmetric_norm(const Eigen::MatrixXd& m);

}  // namespace nearcomm
