#pragma once

#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace nearcomm {

using cplx = std::complex<double>;

// Bilateral weighted shift: e_k -> c_k e_{k+1 mod n}.
struct BilateralShift {
  std::vector<cplx> weights;

  static BilateralShift from_real(const std::vector<double>& w);
  // Unilateral ws(c_1..c_{n-1}) embedded as the bilateral shift with a closing zero weight.
  static BilateralShift from_unilateral(const std::vector<double>& w);

  int size() const { return static_cast<int>(weights.size()); }
  bool is_real() const;
  double norm() const;                   // max |c_k|
  double min_modulus() const;            // min |c_k|
  double self_commutator_norm() const;   // max_k ||c_k|^2 - |c_{k-1}|^2| (cyclic)
};

Eigen::SparseMatrix<cplx> shift_matrix(const BilateralShift& s);

// Almost-normal test profile c_k = amp sin(pi k / n).
BilateralShift davidson_profile(int n, double amp = 0.55);

// Random smooth cyclic profile: squared moduli 1/2 + sum_{j=1..3} a_j sin(2 pi j k / n + phi_j), scaled
// so consecutive squared moduli differ by less than `slope`; moduli lie in [sqrt(0.05), sqrt(0.95)].
BilateralShift random_smooth_profile(int n, double slope, std::uint64_t seed);

// Rotation data and exact local perturbation norm of the two-run exchange used by the normalizer:
// xi_k = alpha_k v_k + beta_k w_k, eta_k = -beta_k v_k + alpha_k w_k, alpha/beta at angle pi k/(2 k0).
struct GelRotation {
  int k0 = 0;
  double a = 0, b = 0;
  std::vector<double> alpha, beta;  // size k0 + 1, endpoints exact
  double measured_norm = 0;         // exact ||S' - S||
  double bound = 0;                 // |b - a| + |b| pi / (2 k0)
};

GelRotation gel_for_normal(int k0, double b, double a);

enum class BergMode { cubic, sigma };

// Rounded level structure: intervals in original index coordinates (cyclic), grid s_r = ||S|| - r h.
struct LevelInterval {
  int start = 0;  // first index
  int length = 0;
  long long r = 0;
  double value = 0;
};

struct LevelStructure {
  int M = 0;
  double grid_step = 0;  // h; 1/M in the unscaled lemma
  std::vector<LevelInterval> intervals;  // before merging, in cyclic order starting at the long interval
  std::vector<LevelInterval> merged;
  int omega_index = -1;                  // index carrying the residual phase
};

// Basis element in the phase-normalized coordinates f_k = u_k e_k: ci f_i + cj f_j (j = -1 when single).
struct BasisElement {
  int i = -1;
  int j = -1;
  double ci = 0;
  double cj = 0;
};

struct NormalAssembly {
  int n = 0;
  std::string branch;  // "radial", "levels", "zero"
  LevelStructure levels;
  std::vector<cplx> phases;  // u_k
  std::vector<BasisElement> basis;
  std::vector<int> image;           // N basis[t] = image_weight[t] * basis[image[t]]
  std::vector<cplx> image_weight;
  std::vector<std::vector<int>> orbits;
  std::vector<double> orbit_modulus;
  double norm = 0;                 // max orbit modulus
  double distance = 0;             // exact ||N - S||
  double step1_distance = 0;       // exact ||S_1 - S|| (rounded levels) when branch == "levels"
  double normality_residual = 0;   // Frobenius norm of N^*N - N N^*
  std::size_t surgeries = 0;
};

// Direct construction with an even M >= 4 under the stated commutator precondition.
NormalAssembly normalize_shift(const BilateralShift& s, int M, BergMode mode = BergMode::cubic,
                               double sigma = 0.0);

// Same construction with an arbitrary grid step h (the wrapper uses h = ||S|| / (r M)).
NormalAssembly normalize_with_step(const BilateralShift& s, int M, double h);

NormalAssembly zero_assembly(const BilateralShift& s);

double helping_bound(double norm, int M, double h);

struct BergResult {
  NormalAssembly assembly;
  double bound = 0;    // C ||S||^(1-2 alpha) ||[S^*,S]||^alpha
  double x = 0;        // rescaled commutator quantity driving the choice of M
  int M = 0;           // 0 when the trivial N = 0 branch was taken
  double lemma_bound = 0;
};

inline constexpr double kCubicConstant = 5.3308;
inline constexpr double kCubicM0 = 15.937;
inline constexpr double kCubicR = 0.162;
inline constexpr double kSigmaConstant = 4.8573;
inline constexpr double kSigmaM0 = 10.762;
inline constexpr double kSigmaR = 0.2897;

BergResult nearest_normal(const BilateralShift& s);
BergResult nearest_normal_sigma(const BilateralShift& s, double sigma);

// Sparse matrices of the assembly in the original basis.
Eigen::SparseMatrix<cplx> assembly_matrix(const NormalAssembly& a);
bool assembly_is_real(const NormalAssembly& a);

// Exact operator norm of a sparse matrix by splitting into connected components of its bipartite
// sparsity graph and taking dense singular values per component.
double sparse_component_norm(const Eigen::SparseMatrix<cplx>& m);

}  // namespace nearcomm
