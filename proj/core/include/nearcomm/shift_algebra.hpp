#pragma once

#include "nearcomm/spin_core.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace nearcomm {

// One weighted shift orbit living on the eigenvalue levels [two_lo, two_hi] (step 2).
struct Orbit {
  long long two_lo = 0;
  long long two_hi = 0;
  std::vector<double> weights;  // one per transition, size (two_hi - two_lo) / 2

  long long length() const { return (two_hi - two_lo) / 2 + 1; }
  bool active_at(long long two_m) const { return two_lo <= two_m && two_m <= two_hi; }
};

// Per-level data. Slot t carries the basis vector sign[t] * rotation.col(t) written in the
// coordinates of the active orbits; the operator maps slot t to weight[t] times slot next[t]
// of the following level (next == -1 means the slot is annihilated).
struct Level {
  long long two_m = 0;
  std::vector<int> active;  // ascending orbit indices; coordinate c belongs to orbit active[c]
  Eigen::MatrixXd rotation;
  std::vector<int> sign;
  std::vector<double> weight;
  std::vector<int> next;

  int size() const { return static_cast<int>(active.size()); }
  int coordinate_of(int orbit) const;  // -1 when inactive
  Eigen::VectorXd slot_vector(int t) const { return sign[static_cast<std::size_t>(t)] * rotation.col(t); }
};

// Direct sum of weighted shifts over a shared grid of eigenvalues two_m / (2 N).
struct ShiftSystem {
  long long divisor = 1;
  std::vector<Orbit> orbits;
  std::vector<Level> levels;  // consecutive two_m values, step 2

  long long two_m_min() const { return levels.empty() ? 0 : levels.front().two_m; }
  int level_index(long long two_m) const;  // -1 when outside the grid
  double eigenvalue(int level) const;
  std::size_t dimension() const;
  std::vector<std::size_t> offsets() const;  // level-major offsets, size levels()+1
};

struct LevelDiagonal {
  long long divisor = 1;
  std::vector<long long> two_m;  // per level
  std::vector<double> eigenvalue;
  std::vector<int> dimension;
};

// Per-level subset of slots.
struct LevelProjection {
  std::vector<std::vector<int>> slots;  // indexed by level

  std::size_t rank() const;
};

// Plain system from orbits: identity rotations, positive signs, weights copied.
ShiftSystem make_system(long long divisor, std::vector<Orbit> orbits);

// (1/N) S^lambda_1 (+) ... (+) S^lambda_m; spins ascending with common parity.
std::pair<LevelDiagonal, ShiftSystem> build_system(const std::vector<IrrepSpec>& spins, long long divisor);

LevelDiagonal level_diagonal(const ShiftSystem& system);

// Structural validation: orthogonal rotations, injective next maps, shape consistency.
void validate(const ShiftSystem& system, double tol = 1e-12);

struct PhaseRecord {
  std::vector<std::vector<int>> flip;  // per level per slot, +1 or -1
};

struct PhaseNormalized {
  ShiftSystem system;
  PhaseRecord record;
};

// Rescales slot vectors by +-1 so every weight becomes nonnegative; the operator is unchanged.
PhaseNormalized phase_normalize(const ShiftSystem& system);

// Block of the operator from level i to level i+1 in orbit coordinates.
Eigen::MatrixXd level_block(const ShiftSystem& system, int level);

double self_commutator_norm(const ShiftSystem& system);
double operator_norm(const ShiftSystem& system);
double superdiagonal_norm(const ShiftSystem& x, const ShiftSystem& y);

// Maximal chains of the slot graph, each as a list of (level, slot) with the outgoing weights.
struct Chain {
  std::vector<std::pair<int, int>> nodes;
  std::vector<double> weights;  // size nodes.size() - 1
};
std::vector<Chain> chains(const ShiftSystem& system);

// Dense oracles (level-major ordering, orbit coordinates within a level).
Eigen::MatrixXd to_dense(const ShiftSystem& system, std::size_t cap = 4096);
Eigen::MatrixXd to_dense(const LevelDiagonal& diag, std::size_t cap = 4096);
Eigen::MatrixXd slot_basis(const ShiftSystem& system, std::size_t cap = 4096);
// Matrix of the operator in the slot basis: entry (slot', slot) = weight.
Eigen::MatrixXd shift_dense(const ShiftSystem& system, std::size_t cap = 4096);
Eigen::MatrixXd projection_dense(const ShiftSystem& system, const LevelProjection& proj,
                                 std::size_t cap = 4096);

double dense_norm(const Eigen::MatrixXd& m);

}  // namespace nearcomm
