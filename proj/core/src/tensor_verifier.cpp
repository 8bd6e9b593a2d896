#include "nearcomm/tensor_verifier.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace nearcomm {

namespace {

void check_cap(int N, int cap) {
  if (N < 1) throw std::invalid_argument("tensor: N must be positive");
  if (N > cap) throw std::invalid_argument("tensor: N = " + std::to_string(N) + " exceeds the cap " + std::to_string(cap));
}

// J_+ = sum_k sigma_+ at site k (unnormalized): flips a clear bit to set.
Eigen::VectorXd raise(const Eigen::VectorXd& v, int n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index x = 0; x < v.size(); ++x) {
    if (v(x) == 0.0) continue;
    for (int k = 0; k < n; ++k)
      if (!(x >> k & 1)) out(x | (Eigen::Index{1} << k)) += v(x);
  }
  return out;
}

// Appends one site as bit 0: index 2 x + s.
Eigen::VectorXd append_site(const Eigen::VectorXd& v, int s) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * v.size());
  for (Eigen::Index x = 0; x < v.size(); ++x) out(2 * x + s) = v(x);
  return out;
}

void orthonormalize(std::vector<Eigen::VectorXd>& vs) {
  for (std::size_t a = 0; a < vs.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) vs[a] -= vs[b].dot(vs[a]) * vs[b];
    const double n = vs[a].norm();
    if (!(n > 0.5)) throw std::logic_error("decomposition: lowest-weight vectors are dependent");
    vs[a] /= n;
  }
}

double d_of(long long two_lambda, long long two_m) {
  return d_weight(HalfInt::from_twice(two_lambda), HalfInt::from_twice(two_m));
}

// Structural product T U with T = (1/N) sum_k A at site k, A real 2x2.
Eigen::MatrixXd apply_tensor(const Eigen::Matrix2d& A, const Eigen::MatrixXd& U, int N) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(U.rows(), U.cols());
  const double inv = 1.0 / N;
  for (Eigen::Index c = 0; c < U.cols(); ++c)
    for (Eigen::Index x = 0; x < U.rows(); ++x) {
      const double v = U(x, c);
      if (v == 0.0) continue;
      for (int k = 0; k < N; ++k) {
        const int b = static_cast<int>(x >> k & 1);
        const Eigen::Index y0 = x & ~(Eigen::Index{1} << k);
        out(y0, c) += inv * A(0, b) * v;
        out(y0 | (Eigen::Index{1} << k), c) += inv * A(1, b) * v;
      }
    }
  return out;
}

Eigen::Matrix2d real_pauli(int i) {
  Eigen::Matrix2d m;
  switch (i) {
    case 1: m << 0, 0.5, 0.5, 0; break;
    case 2: m << 0, -0.5, 0.5, 0; break;  // i sigma_2
    default: m << -0.5, 0, 0, 0.5; break;
  }
  return m;
}

enum class Symmetry { symmetric, antisymmetric };

// U Yb U^T evaluated on one triangle and mirrored, so the transpose structure is exact.
Eigen::MatrixXd conjugate(const Eigen::MatrixXd& U, const Eigen::SparseMatrix<double>& Yb, Symmetry sym) {
  const Eigen::Index n = U.rows();
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
  if (Yb.nonZeros() == 0) return Y;
  const Eigen::MatrixXd W = U * Yb;
  Y.triangularView<Eigen::Upper>() = W * U.transpose();
  if (sym == Symmetry::symmetric) {
    Y.triangularView<Eigen::StrictlyLower>() = Y.transpose();
  } else {
    Y.diagonal().setZero();
    Y.triangularView<Eigen::StrictlyLower>() = -Y.transpose();
  }
  return Y;
}

double frobenius_commutator(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sign) {
  // [x, y] = P + sign P^T with P = x y, valid when x, y are each symmetric or antisymmetric.
  if (x.isZero(0.0) || y.isZero(0.0)) return 0.0;
  const Eigen::MatrixXd P = x * y;
  return (P + sign * P.transpose()).norm();
}

}  // namespace

DenseObservable build_tensor_observable(int N, const Eigen::Matrix2cd& A, int cap) {
  check_cap(N, cap);
  const Eigen::Index dim = Eigen::Index{1} << N;
  DenseObservable o;
  o.N = N;
  o.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  const double inv = 1.0 / N;
  for (Eigen::Index x = 0; x < dim; ++x)
    for (int k = 0; k < N; ++k) {
      const int b = static_cast<int>(x >> k & 1);
      const Eigen::Index y0 = x & ~(Eigen::Index{1} << k);
      o.matrix(y0, x) += inv * A(0, b);
      o.matrix(y0 | (Eigen::Index{1} << k), x) += inv * A(1, b);
    }
  return o;
}

DenseObservable build_tensor_observable(int N, int pauli_index, int cap) {
  return build_tensor_observable(N, pauli_matrix(pauli_index), cap);
}

Eigen::MatrixXd tensor_real(int N, const Eigen::Matrix2d& A, int cap) {
  check_cap(N, cap);
  const Eigen::Index dim = Eigen::Index{1} << N;
  return apply_tensor(A, Eigen::MatrixXd::Identity(dim, dim), N);
}

DecompositionUnitary decomposition_unitary(int N, int cap, double tol) {
  check_cap(N, cap);
  // Lowest-weight vector per block, keyed by 2 lambda; one site: the spin-1/2 block with lowest state bit 0.
  std::map<long long, std::vector<Eigen::VectorXd>> blocks;
  blocks[1].push_back(Eigen::VectorXd::Unit(2, 0));
  for (int n = 1; n < N; ++n) {
    std::map<long long, std::vector<Eigen::VectorXd>> next;
    for (const auto& [two_l, vs] : blocks)
      for (const Eigen::VectorXd& v0 : vs) {
        next[two_l + 1].push_back(append_site(v0, 0));
        if (two_l >= 1) {
          // Lowest weight of lambda - 1/2: annihilated by J_- = J_+^T.
          const double d = std::sqrt(static_cast<double>(two_l));  // d_{lambda,-lambda}
          const Eigen::VectorXd v1 = raise(v0, n) / d;
          next[two_l - 1].push_back((-d * append_site(v0, 1) + append_site(v1, 0)) / std::sqrt(two_l + 1.0));
        }
      }
    for (auto& [two_l, vs] : next) orthonormalize(vs);
    blocks = std::move(next);
  }

  DecompositionUnitary u;
  u.N = N;
  const Eigen::Index dim = Eigen::Index{1} << N;
  u.U = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::Index col = 0;
  for (const auto& [two_l, vs] : blocks)
    for (std::size_t c = 0; c < vs.size(); ++c) {
      u.blocks.push_back(IrrepBlock{HalfInt::from_twice(two_l), static_cast<long long>(c), col});
      Eigen::VectorXd v = vs[c];
      for (long long two_m = -two_l; two_m <= two_l; two_m += 2) {
        u.U.col(col++) = v;
        if (two_m < two_l) v = raise(v, N) / d_of(two_l, two_m);
      }
    }
  if (col != dim) throw std::logic_error("decomposition: dimension mismatch");

  // Orthogonality per J_3 sector (columns with 2m = 2k - N live on rows with k set bits); entries
  // outside the sector must vanish exactly.
  std::vector<std::vector<Eigen::Index>> rows(static_cast<std::size_t>(N) + 1), cols(static_cast<std::size_t>(N) + 1);
  for (Eigen::Index x = 0; x < dim; ++x) rows[static_cast<std::size_t>(std::popcount(static_cast<unsigned long long>(x)))].push_back(x);
  for (const IrrepBlock& b : u.blocks)
    for (long long two_m = -b.lambda.two_x, j = 0; two_m <= b.lambda.two_x; two_m += 2, ++j)
      cols[static_cast<std::size_t>((two_m + N) / 2)].push_back(b.offset + j);
  for (std::size_t k = 0; k <= static_cast<std::size_t>(N); ++k) {
    std::vector<char> in(static_cast<std::size_t>(dim), 0);
    for (Eigen::Index x : rows[k]) in[static_cast<std::size_t>(x)] = 1;
    Eigen::MatrixXd S(static_cast<Eigen::Index>(rows[k].size()), static_cast<Eigen::Index>(cols[k].size()));
    for (std::size_t j = 0; j < cols[k].size(); ++j) {
      for (std::size_t i = 0; i < rows[k].size(); ++i) S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u.U(rows[k][i], cols[k][j]);
      for (Eigen::Index x = 0; x < dim; ++x)
        if (!in[static_cast<std::size_t>(x)]) u.orthogonality_residual = std::max(u.orthogonality_residual, std::abs(u.U(x, cols[k][j])));
    }
    const Eigen::MatrixXd G = S.transpose() * S - Eigen::MatrixXd::Identity(S.cols(), S.cols());
    if (G.size() > 0) u.orthogonality_residual = std::max(u.orthogonality_residual, G.cwiseAbs().maxCoeff());
  }

  // T_N(sigma_i) U = U B_i with B_i the block sum of (1/N) S^lambda(sigma_i).
  for (int i = 1; i <= 3; ++i) {
    const Eigen::MatrixXd TU = apply_tensor(real_pauli(i), u.U, N);
    Eigen::MatrixXd UB = Eigen::MatrixXd::Zero(dim, dim);
    for (const IrrepBlock& b : u.blocks) {
      const long long tl = b.lambda.two_x;
      for (long long two_m = -tl, j = 0; two_m <= tl; two_m += 2, ++j) {
        auto c = UB.col(b.offset + j);
        if (i == 3) {
          c += (static_cast<double>(two_m) / (2.0 * N)) * u.U.col(b.offset + j);
          continue;
        }
        // Column m of B: entries at m + 1 (from S_+) and m - 1 (from S_+^T).
        if (two_m > -tl) c += (i == 1 ? 1.0 : -1.0) * d_of(tl, two_m - 2) / (2.0 * N) * u.U.col(b.offset + j - 1);
        if (two_m < tl) c += d_of(tl, two_m) / (2.0 * N) * u.U.col(b.offset + j + 1);
      }
    }
    u.block_residual = std::max(u.block_residual, (TU - UB).cwiseAbs().maxCoeff());
  }
  if (u.orthogonality_residual > 1e-12 || u.block_residual > tol)
    throw std::runtime_error("decomposition: residual over tolerance (orthogonality " +
                             std::to_string(u.orthogonality_residual) + ", block " + std::to_string(u.block_residual) + ")");
  return u;
}

DenseFamily materialize(const OgataResult& r, const DecompositionUnitary& u) {
  if (r.N != u.N) throw std::invalid_argument("materialize: N mismatch");
  std::map<long long, std::vector<Eigen::Index>> offsets;  // 2 lambda -> first column per copy
  for (const IrrepBlock& b : u.blocks) offsets[b.lambda.two_x].push_back(b.offset);
  std::map<long long, std::size_t> used;

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> t1, t2, t3;
  for (const BlockResult& blk : r.blocks) {
    const BlockDense d = block_dense(blk, r.N);
    const long long copies = static_cast<long long>(blk.multiplicity);
    for (long long inst = 0; inst < copies; ++inst) {
      std::vector<Eigen::Index> base;
      for (HalfInt s : blk.spins) {
        auto& list = offsets[s.two_x];
        auto& k = used[s.two_x];
        if (k >= list.size()) throw std::logic_error("materialize: more copies of a spin than the table holds");
        base.push_back(list[k++]);
      }
      std::vector<Eigen::Index> col;
      for (auto [r_idx, two_m] : d.layout)
        col.push_back(base[static_cast<std::size_t>(r_idx)] + (two_m + blk.spins[static_cast<std::size_t>(r_idx)].two_x) / 2);
      for (Eigen::Index a = 0; a < d.y1.rows(); ++a)
        for (Eigen::Index b = 0; b < d.y1.cols(); ++b) {
          const auto ca = col[static_cast<std::size_t>(a)], cb = col[static_cast<std::size_t>(b)];
          if (d.y1(a, b) != 0.0) t1.emplace_back(ca, cb, d.y1(a, b));
          if (d.iy2(a, b) != 0.0) t2.emplace_back(ca, cb, d.iy2(a, b));
          if (d.y3(a, b) != 0.0) t3.emplace_back(ca, cb, d.y3(a, b));
        }
    }
  }
  for (const auto& [two, list] : offsets)
    if (used[two] != list.size()) throw std::logic_error("materialize: some irreducible copies are not covered");
  const Eigen::Index dim = u.U.rows();
  Eigen::SparseMatrix<double> Y1(dim, dim), Y2(dim, dim), Y3(dim, dim);
  Y1.setFromTriplets(t1.begin(), t1.end());
  Y2.setFromTriplets(t2.begin(), t2.end());
  Y3.setFromTriplets(t3.begin(), t3.end());
  return DenseFamily{conjugate(u.U, Y1, Symmetry::symmetric), conjugate(u.U, Y2, Symmetry::antisymmetric),
                     conjugate(u.U, Y3, Symmetry::symmetric)};
}

double symmetric_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double antisymmetric_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m.cols(), m.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

VerificationReport verify_full(const OgataResult& r, const DecompositionUnitary& u) {
  VerificationReport rep;
  rep.N = r.N;
  rep.orthogonality = u.orthogonality_residual;
  rep.block_residual = u.block_residual;
  BoundsRecord& c = rep.checks;

  BigInt total = 0;
  for (const BlockResult& b : r.blocks)
    for (HalfInt s : b.spins) total += b.multiplicity * (s.two_x + 1);
  c.add("dimension accounting sum n_lambda (2 lambda + 1) = 2^N", 0.0,
        static_cast<double>(abs(total - (BigInt(1) << r.N))));
  c.add("U^T U = I", 1e-12, u.orthogonality_residual);
  c.add("simultaneous block-diagonalization", 1e-10, u.block_residual);

  bool block_structure = true;
  bool all_exact = true;
  for (const BlockResult& b : r.blocks) {
    all_exact = all_exact && b.exact;
    const BlockDense d = block_dense(b, r.N);
    block_structure = block_structure && d.y1 == d.y1.transpose() && d.iy2 == -d.iy2.transpose() &&
                      d.y3 == d.y3.transpose();
  }
  c.add("block operators: A_1', A_3' symmetric, i A_2' antisymmetric (bitwise)", 0.0, block_structure ? 0.0 : 1.0);

  const DenseFamily Y = materialize(r, u);
  const Eigen::MatrixXd T1 = tensor_real(r.N, real_pauli(1), r.N), T2 = tensor_real(r.N, real_pauli(2), r.N),
                        T3 = tensor_real(r.N, real_pauli(3), r.N);
  rep.distance[0] = symmetric_norm(T1 - Y.y1);
  rep.distance[1] = antisymmetric_norm(T2 - Y.iy2);
  rep.distance[2] = symmetric_norm(T3 - Y.y3);
  rep.structured[0] = r.distance1;
  rep.structured[1] = r.distance2;
  rep.structured[2] = r.distance3;
  rep.commutator = std::max({frobenius_commutator(Y.y1, Y.iy2, 1.0), frobenius_commutator(Y.y1, Y.y3, -1.0),
                             frobenius_commutator(Y.iy2, Y.y3, 1.0)});
  c.add("||[Y_i, Y_j]|| (Frobenius)", 1e-12, rep.commutator);
  const char* names[3] = {"1", "2", "3"};
  for (int i = 0; i < 3; ++i) {
    const std::string s = names[i];
    if (all_exact)
      c.add("|dense - structured| distance " + s, 1e-10, std::abs(rep.distance[i] - rep.structured[i]));
    else
      c.add("dense distance " + s + " <= structured estimate", rep.structured[i], rep.distance[i], 1e-10);
    c.add("||T_N(sigma_" + s + ") - Y_" + s + "|| <= bound", i < 2 ? r.bound12 : r.bound3, rep.distance[i]);
  }
  c.add("Y_1 symmetric", 0.0, (Y.y1 - Y.y1.transpose()).cwiseAbs().maxCoeff());
  c.add("i Y_2 antisymmetric (Y_2^T = -Y_2)", 0.0, (Y.iy2 + Y.iy2.transpose()).cwiseAbs().maxCoeff());
  c.add("Y_3 symmetric", 0.0, (Y.y3 - Y.y3.transpose()).cwiseAbs().maxCoeff());
  c.add("Y_1, i Y_2, Y_3 real", 0.0, r.real ? 0.0 : 1.0);
  return rep;
}

VerificationReport verify_full(const OgataResult& r, int cap) {
  return verify_full(r, decomposition_unitary(r.N, cap));
}

Eigen::MatrixXd extend_dense(const Eigen::MatrixXd& Y, int N) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * Y.rows(), 2 * Y.cols());
  const double s = static_cast<double>(N) / (N + 1.0);
  for (Eigen::Index a = 0; a < Y.rows(); ++a)
    for (Eigen::Index b = 0; b < Y.cols(); ++b)
      for (int t = 0; t < 2; ++t) out(2 * a + t, 2 * b + t) = s * Y(a, b);
  return out;
}

}  // namespace nearcomm
