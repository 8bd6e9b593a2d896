#pragma once

#include "nearcomm/exchange_process.hpp"
#include "nearcomm/report.hpp"
#include "nearcomm/spin_core.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nearcomm {

inline constexpr double kPlanarBound = 6.286;      // ||A_i' - S(sigma_i)||, i = 1, 2, in units of N^(-1/7)
inline constexpr double kDiagonalBound = 1.083;    // ||A_3' - S(sigma_3)|| in units of N^(-3/7)
inline constexpr double kObservableBound = 17.92;  // ||T_N(A) - Y_N(A)|| in units of ||A|| N^(-1/7)
inline constexpr double kThresholdN = 4.962e7;     // N_*: below it the trivial choice is taken
inline constexpr double kLowerSpinC2 = 6.285;      // lambda_m below 6.285 N^(6/7) takes the trivial choice
inline constexpr double kStepC3 = 1.045;           // L = floor(1.045 N^(4/7))
inline constexpr double kEllC4 = 18.65;            // l = 18.65 N^(5/7)
inline constexpr double kDeltaC5 = 1.082;          // Delta = 1.082 N^(-3/7)

// Spins lambda_1 <= ... <= lambda_m of one parity, scaled by 1/N.
struct SnearbyParams {
  std::vector<HalfInt> spins;
  long long N = 1;
  double delta = 0;            // Delta
  double ell = 0;              // l
  double gap = -1;             // L; negative means the largest consecutive gap
  int steps_override = 0;      // N0 used instead of the closed form when positive
};

// Closed-form quantities for the construction on (1/N)(S^lambda_1 (+) ... (+) S^lambda_m).
struct SnearbyConstants {
  int m = 0;
  double Lambda = 0, lambda1 = 0, L = 0;
  long long n_delta = 0;
  double c_delta = 0;
  int N0 = 0;
  double T = 0, G = 0, D = 0;
  double bound12 = 0;  // max(G, D) + C ((Lambda + 1/2)/N)^(1/3) max(T^(1/3), D^(2/3))
  double bound3 = 0;   // c_delta
  double c_delta_cap = 0;  // 2 Lambda / (2 Lambda / Delta - N)
};

// Validates the parameters and evaluates the closed forms (no construction).
SnearbyConstants snearby_constants(const SnearbyParams& p);

struct SnearbyResult {
  SnearbyParams params;
  SnearbyConstants constants;
  GepResult gep;
  NormalizedOrbits normal;
  double distance12 = 0;  // ||S' - S|| + ||S'' - S'||, an upper bound of ||A_i' - S(sigma_i)||, i = 1, 2
  double distance3 = 0;   // ||A' - A|| (exact)
  BoundsRecord bounds;
};

SnearbyResult snearby(const SnearbyParams& p);

// Per-case outcome of the fixed-step construction.
enum class StepCase { small_top, below_threshold, nontrivial };

std::string to_string(StepCase c);

struct StepConstants {
  long long L = 0;
  double Lambda0 = 0;
  double delta = 0, ell = 0;
  // Intermediate constants of the asymptotic estimate for N >= N_*.
  double c0 = 0, c1 = 0, d_delta = 0, d0 = 0;
  double G = 0, D = 0, T_alpha = 0, D_2alpha = 0;
  double planar = 0;    // max(G, D) + C max(T^alpha, D^(2 alpha)) at N_*; must not exceed 6.286
  double diagonal = 0;  // d_delta; must not exceed 1.083
  double trivial = 0;   // (1/2) N_*^(1/7); must not exceed 6.286
  bool requirements = false;  // side conditions on c_i and N_*
};

// Step L, threshold data and the derived constants behind 6.286 and 1.083.
StepConstants step_constants(double N);

double planar_bound(double N);    // 6.286 N^(-1/7)
double diagonal_bound(double N);  // 1.083 N^(-3/7)

struct StepResult {
  StepCase which = StepCase::below_threshold;
  std::optional<SnearbyResult> construction;
  double distance12 = 0;  // exact for the trivial cases
  double distance3 = 0;
  double bound12 = 0, bound3 = 0;
};

// Lemma-level construction for a progression of step L; the trivial cases return A_1' = A_2' = 0.
StepResult big_L_step(const std::vector<HalfInt>& spins, long long N);

// Dispatch only, for N too large to materialize.
StepCase big_L_step_case(double lambda_top, double N);

struct Pattern {
  std::vector<HalfInt> spins;  // ascending with step L
  BigInt multiplicity = 0;
};

struct PartitionPlan {
  int N = 0;
  long long L = 0;
  double Lambda0 = 0;
  std::vector<std::pair<HalfInt, BigInt>> discarded;  // spins handled by the trivial choice
  std::vector<Pattern> patterns;
};

struct PartitionOptions {
  std::optional<long long> L;
  std::optional<double> Lambda0;
};

PartitionPlan partition_representation(const MultiplicityTable& table, const PartitionOptions& opt = {});

// Multiset union of pattern copies and discarded spins.
MultiplicityTable plan_multiset(const PartitionPlan& plan);

struct OgataOptions {
  PartitionOptions partition;
  // When both are set, every pattern runs the lemma-level construction with these parameters.
  std::optional<double> delta, ell;
  std::size_t dense_cap = 2048;  // exact dense distances up to this block dimension
};

// One summand of the orthogonal decomposition: a pattern (or a discarded spin) and its operators.
struct BlockResult {
  std::vector<HalfInt> spins;
  BigInt multiplicity = 0;
  bool discarded = false;
  StepCase which = StepCase::below_threshold;
  std::optional<SnearbyResult> construction;
  double distance1 = 0, distance2 = 0, distance3 = 0;
  bool exact = true;  // distances are exact rather than triangle bounds
  double commutator = 0;  // max ||[A_i', A_j']|| on the block (dense when materialized)
  std::string note;       // why a requested construction fell back to the trivial choice
};

struct OgataResult {
  int N = 0;
  PartitionPlan plan;
  std::vector<BlockResult> blocks;
  double distance1 = 0, distance2 = 0, distance3 = 0;
  double bound12 = 0, bound3 = 0;
  bool real = true;  // A_1', i A_2', A_3' real
  double commutator = 0;
};

OgataResult ogata_construct(int N, const OgataOptions& opt = {});

struct OgataBounds {
  double N = 0;
  double planar = 0, diagonal = 0, observable = 0;
};

OgataBounds ogata_bounds(double N);

// Dense operators of one block in its own coordinates (level-major, orbit order within a level).
struct BlockDense {
  std::vector<std::pair<int, long long>> layout;  // (spin index, 2m) per coordinate
  Eigen::MatrixXd y1, iy2, y3;  // A_1', i A_2', A_3'
  Eigen::MatrixXd s1, is2, s3;  // S(sigma_1), i S(sigma_2), S(sigma_3)
};

BlockDense block_dense(const BlockResult& block, int N, std::size_t cap = 4096);

// A = c_1 sigma_1 + c_2 sigma_2 + c_3 sigma_3 + c_4 I.
using PauliCoefficients = std::array<std::complex<double>, 4>;

PauliCoefficients pauli_coefficients(const Eigen::Matrix2cd& A);
Eigen::Matrix2cd pauli_matrix(int i);  // i = 1, 2, 3; 0 is the identity
double matrix_norm(const Eigen::Matrix2cd& A);

struct Observable {
  PauliCoefficients c{};
  double norm = 0;           // ||A||
  double bound = 0;          // 2 sqrt(2 * 6.286^2 + 1.083^2 N^(-4/7)) ||A|| N^(-1/7)
  double distance_bound = 0; // sum |c_i| measured distance_i
};

Observable assemble_observable(const OgataResult& r, const PauliCoefficients& c);

// Dense Y_N(A) on one block.
Eigen::MatrixXcd observable_block(const BlockDense& b, const PauliCoefficients& c);

struct EvenExtension {
  int N = 0;        // even target N + 1
  double scale = 0; // N / (N + 1) of the odd source
  double bound12 = 0, bound3 = 0;         // stated bounds degraded by the extension identity
  double distance12 = 0, distance3 = 0;   // measured distances degraded the same way
};

// Y_{i,N+1} = N/(N+1) Y_{i,N} (x) I.
EvenExtension extend_even(const OgataResult& r);

}  // namespace nearcomm
