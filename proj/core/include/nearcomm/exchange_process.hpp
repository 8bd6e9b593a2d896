#pragma once

#include "nearcomm/berg_normalizer.hpp"
#include "nearcomm/gradual_exchange.hpp"
#include "nearcomm/shift_algebra.hpp"

#include <utility>
#include <vector>

namespace nearcomm {

// Cut points a_0 < ... < a_K; window k is [a_k, a_{k+1}) (the last one closed) with step count N_k.
struct WindowPartition {
  std::vector<double> cuts;
  std::vector<int> steps;  // N_k, one per window; ignored for windows holding a single spanning orbit
};

// Cuts every `width` levels (a short tail is merged into the last window) and picks the largest
// admissible N_k per window, optionally capped.
WindowPartition uniform_partition(const ShiftSystem& system, int width, int max_steps = 0);

struct GepWindow {
  double a = 0, b = 0;          // cut points
  int level_lo = 0, level_hi = 0;  // a^sigma and b^sigma as level indices
  int r0 = -1;                  // first spanning orbit, -1 when none spans the window
  int m = 0;                    // number of spanning orbits
  int steps = 0;                // N0
  double G = 0, D = 0, T = 0;   // stated window estimates
  double measured_norm = 0;     // ||(S' - S)|| restricted to the window blocks
  std::vector<std::pair<int, int>> zeroed;   // (level, slot) whose weight was set to zero
  std::vector<std::vector<int>> F, Fc;       // slots per window level (index level - level_lo)
  int F_top = 0;                // highest window-relative level (1-based) used by F
};

// Applies the process on the closed spectral window [a, b] in place and returns its record. The
// orbit ranges must be nested (ascending orbit index) and the weights nonnegative.
GepWindow gep_window(ShiftSystem& system, double a, double b, int steps);

struct GepResult {
  ShiftSystem original;
  ShiftSystem shifted;   // S'
  std::vector<double> cuts;
  std::vector<std::vector<int>> e_index;     // per level per slot: index k of E_k
  std::vector<std::vector<double>> a_prime;  // per level per slot: eigenvalue of A'
  std::vector<GepWindow> windows;

  double max_diam = 0;
  double stated_norm = 0;    // max_k max(G, D)
  double stated_comm = 0;    // max_k max(||[S*,S]|| + T, D^2)
  double original_comm = 0;
  double measured_a = 0;     // ||A' - A||
  double measured_norm = 0;  // ||S' - S||
  double measured_comm = 0;  // ||[S'*, S']||
  double commutator = 0;     // structural ||[A', S']||, 0 when every nonzero edge stays inside one E_k
};

GepResult gep(const ShiftSystem& system, const WindowPartition& partition);

// Projection onto the range of E_k in the slot basis of S'.
LevelProjection e_projection(const GepResult& r, int k);
LevelProjection window_projection(const GepResult& r, const GepWindow& w, bool complement);

// Dense A' in orbit coordinates (level-major), for oracles.
Eigen::MatrixXd a_prime_dense(const GepResult& r, std::size_t cap = 4096);

struct NormalPiece {
  std::vector<std::pair<int, int>> nodes;  // (level, slot) in S'
  BergResult berg;
};

struct NormalizedOrbits {
  std::vector<NormalPiece> pieces;
  double distance = 0;          // ||S'' - S'|| = max piece distance
  double bound = 0;             // 5.3308 ||S||^(1/3) ||[S'*, S']||^(1/3)
  double normality_residual = 0;
  bool real = true;
  bool commutes = true;         // every piece lies in one eigenspace of A'
};

// Splits S' into its weighted shift orbits (cut at zero weights) and normalizes each one.
NormalizedOrbits normalize_orbits(const GepResult& r);

// Dense S'' in orbit coordinates.
Eigen::MatrixXd normal_dense(const GepResult& r, const NormalizedOrbits& n, std::size_t cap = 4096);

}  // namespace nearcomm
