#include "nearcomm/berg_normalizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nearcomm {

BilateralShift BilateralShift::from_real(const std::vector<double>& w) {
  BilateralShift s;
  s.weights.assign(w.begin(), w.end());
  return s;
}

BilateralShift BilateralShift::from_unilateral(const std::vector<double>& w) {
  BilateralShift s = from_real(w);
  s.weights.emplace_back(0.0);
  return s;
}

bool BilateralShift::is_real() const {
  return std::all_of(weights.begin(), weights.end(), [](cplx c) { return c.imag() == 0.0; });
}

double BilateralShift::norm() const {
  double m = 0;
  for (cplx c : weights) m = std::max(m, std::abs(c));
  return m;
}

double BilateralShift::min_modulus() const {
  if (weights.empty()) return 0;
  double m = std::abs(weights.front());
  for (cplx c : weights) m = std::min(m, std::abs(c));
  return m;
}

double BilateralShift::self_commutator_norm() const {
  const int n = size();
  double best = 0;
  for (int k = 0; k < n; ++k) {
    const double a = std::norm(weights[static_cast<std::size_t>(k)]);
    const double b = std::norm(weights[static_cast<std::size_t>((k + n - 1) % n)]);
    best = std::max(best, std::abs(a - b));
  }
  return best;
}

BilateralShift davidson_profile(int n, double amp) {
  if (n < 2) throw std::invalid_argument("davidson_profile: n must be at least 2");
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = amp * std::sin(std::numbers::pi * k / n);
  return BilateralShift::from_real(c);
}

BilateralShift random_smooth_profile(int n, double slope, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_smooth_profile: n must be at least 2");
  if (!(slope > 0)) throw std::invalid_argument("random_smooth_profile: slope must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double amp[3], phase[3], rate = 0, total = 0;
  for (int j = 0; j < 3; ++j) {
    amp[j] = 0.1 + U(rng);
    phase[j] = 2 * std::numbers::pi * U(rng);
    rate += amp[j] * 2 * std::numbers::pi * (j + 1) / n;
    total += amp[j];
  }
  // |f(k+1) - f(k)| <= max |f'| <= scale * rate.
  const double scale = std::min(0.9 * slope / rate, 0.45 / total);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double sq = 0.5;
    for (int j = 0; j < 3; ++j) sq += scale * amp[j] * std::sin(2 * std::numbers::pi * (j + 1) * k / n + phase[j]);
    w[static_cast<std::size_t>(k)] = std::sqrt(sq);
  }
  return BilateralShift::from_real(w);
}

Eigen::SparseMatrix<cplx> shift_matrix(const BilateralShift& s) {
  const int n = s.size();
  Eigen::SparseMatrix<cplx> m(n, n);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 0; k < n; ++k)
    if (s.weights[static_cast<std::size_t>(k)] != cplx(0)) t.emplace_back((k + 1) % n, k, s.weights[static_cast<std::size_t>(k)]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

namespace {

void rotation_tables(int k0, std::vector<double>& alpha, std::vector<double>& beta) {
  alpha.assign(static_cast<std::size_t>(k0 + 1), 0.0);
  beta.assign(static_cast<std::size_t>(k0 + 1), 0.0);
  for (int k = 0; k <= k0; ++k) {
    const double th = std::numbers::pi * k / (2.0 * k0);
    alpha[static_cast<std::size_t>(k)] = std::cos(th);
    beta[static_cast<std::size_t>(k)] = std::sin(th);
  }
  alpha.front() = 1.0;
  beta.front() = 0.0;
  alpha.back() = 0.0;
  beta.back() = 1.0;
}

cplx unit_phase(cplx c) {
  const double m = std::abs(c);
  if (m == 0.0) return 1.0;
  if (c.imag() == 0.0) return c.real() > 0 ? 1.0 : -1.0;
  return c / m;
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(static_cast<std::size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[static_cast<std::size_t>(x)] != x) x = p[static_cast<std::size_t>(x)] = p[static_cast<std::size_t>(p[static_cast<std::size_t>(x)])];
    return x;
  }
  void unite(int a, int b) { p[static_cast<std::size_t>(find(a))] = find(b); }
};

// Matrix of N in the f coordinates from the basis/image record.
Eigen::SparseMatrix<cplx> assembly_f_matrix(const NormalAssembly& a) {
  std::vector<Eigen::Triplet<cplx>> t;
  auto coeffs = [](const BasisElement& e) {
    std::vector<std::pair<int, double>> c{{e.i, e.ci}};
    if (e.j >= 0) c.emplace_back(e.j, e.cj);
    return c;
  };
  for (std::size_t s = 0; s < a.basis.size(); ++s) {
    const cplx w = a.image_weight[s];
    if (w == cplx(0)) continue;
    for (auto [i, ci] : coeffs(a.basis[s]))
      for (auto [j, cj] : coeffs(a.basis[static_cast<std::size_t>(a.image[s])]))
        if (ci != 0.0 && cj != 0.0) t.emplace_back(j, i, w * (cj * ci));
  }
  Eigen::SparseMatrix<cplx> m(a.n, a.n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// S in the f coordinates: f_k -> u_k c_k conj(u_{k+1}) f_{k+1}.
Eigen::SparseMatrix<cplx> shift_f_matrix(const BilateralShift& s, const std::vector<cplx>& u) {
  const int n = s.size();
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 0; k < n; ++k) {
    const cplx c = s.weights[static_cast<std::size_t>(k)];
    if (c == cplx(0)) continue;
    const cplx w = u[static_cast<std::size_t>(k)] * c * std::conj(u[static_cast<std::size_t>((k + 1) % n)]);
    t.emplace_back((k + 1) % n, k, w);
  }
  Eigen::SparseMatrix<cplx> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void audit_orbits(NormalAssembly& a) {
  const std::size_t m = a.basis.size();
  std::vector<int> pre(m, 0);
  for (int t : a.image) {
    if (t < 0 || static_cast<std::size_t>(t) >= m) throw std::logic_error("normalizer: image outside basis");
    ++pre[static_cast<std::size_t>(t)];
  }
  for (int c : pre)
    if (c != 1) throw std::logic_error("normalizer: basis vectors do not form a perfect partition into orbits");
  std::vector<char> seen(m, 0);
  a.orbits.clear();
  a.orbit_modulus.clear();
  a.norm = 0;
  for (std::size_t s = 0; s < m; ++s) {
    if (seen[s]) continue;
    std::vector<int> cyc;
    double lo = std::abs(a.image_weight[s]), hi = lo;
    for (std::size_t t = s; !seen[t]; t = static_cast<std::size_t>(a.image[t])) {
      seen[t] = 1;
      cyc.push_back(static_cast<int>(t));
      lo = std::min(lo, std::abs(a.image_weight[t]));
      hi = std::max(hi, std::abs(a.image_weight[t]));
    }
    if (hi - lo > 1e-14 * std::max(1.0, hi)) throw std::logic_error("normalizer: orbit with non-constant modulus");
    a.orbits.push_back(std::move(cyc));
    a.orbit_modulus.push_back(hi);
    a.norm = std::max(a.norm, hi);
  }
}

void measure(NormalAssembly& a, const BilateralShift& s) {
  audit_orbits(a);
  const Eigen::SparseMatrix<cplx> N = assembly_f_matrix(a);
  const Eigen::SparseMatrix<cplx> S = shift_f_matrix(s, a.phases);
  a.distance = sparse_component_norm(N - S);
  const Eigen::SparseMatrix<cplx> Nh = N.adjoint();
  const Eigen::SparseMatrix<cplx> R = Nh * N - N * Nh;
  a.normality_residual = R.norm();
}

// Phases u with u_{anchor+1} = 1 and u_{k+1} = u_k phase(c_k) along the cycle.
std::vector<cplx> phase_vector(const BilateralShift& s, int anchor) {
  const int n = s.size();
  std::vector<cplx> u(static_cast<std::size_t>(n), 1.0);
  int k = (anchor + 1) % n;
  for (int step = 0; step + 1 < n; ++step) {
    const int nx = (k + 1) % n;
    u[static_cast<std::size_t>(nx)] = u[static_cast<std::size_t>(k)] * unit_phase(s.weights[static_cast<std::size_t>(k)]);
    k = nx;
  }
  return u;
}

NormalAssembly single_orbit(const BilateralShift& s, int anchor, const std::vector<double>& modulus,
                            const std::string& branch) {
  const int n = s.size();
  NormalAssembly a;
  a.n = n;
  a.branch = branch;
  a.phases = phase_vector(s, anchor);
  const cplx omega = a.phases[static_cast<std::size_t>(anchor)] * unit_phase(s.weights[static_cast<std::size_t>(anchor)]);
  for (int k = 0; k < n; ++k) {
    a.basis.push_back(BasisElement{k, -1, 1.0, 0.0});
    a.image.push_back((k + 1) % n);
    a.image_weight.push_back(k == anchor ? omega * modulus[static_cast<std::size_t>(k)] : cplx(modulus[static_cast<std::size_t>(k)]));
  }
  return a;
}

}  // namespace

double sparse_component_norm(const Eigen::SparseMatrix<cplx>& m) {
  const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
  UnionFind uf(rows + cols);
  struct Entry {
    int r, c;
    cplx v;
  };
  std::vector<Entry> entries;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(m, k); it; ++it) {
      if (it.value() == cplx(0)) continue;
      entries.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()), it.value()});
      uf.unite(static_cast<int>(it.row()), rows + static_cast<int>(it.col()));
    }
  if (entries.empty()) return 0.0;
  // Group entries by component root and assign local row/column numbers.
  std::vector<int> root_id(static_cast<std::size_t>(rows + cols), -1);
  std::vector<std::vector<Entry>> comps;
  for (const Entry& e : entries) {
    const int r = uf.find(e.r);
    if (root_id[static_cast<std::size_t>(r)] < 0) {
      root_id[static_cast<std::size_t>(r)] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comps[static_cast<std::size_t>(root_id[static_cast<std::size_t>(r)])].push_back(e);
  }
  double best = 0.0;
  std::vector<int> lr(static_cast<std::size_t>(rows), -1), lc(static_cast<std::size_t>(cols), -1);
  for (const auto& comp : comps) {
    int nr = 0, nc = 0;
    bool real = true;
    for (const Entry& e : comp) {
      if (lr[static_cast<std::size_t>(e.r)] < 0) lr[static_cast<std::size_t>(e.r)] = nr++;
      if (lc[static_cast<std::size_t>(e.c)] < 0) lc[static_cast<std::size_t>(e.c)] = nc++;
      real = real && e.v.imag() == 0.0;
    }
    double s = 0;
    if (nr == 1 && nc == 1) {
      s = std::abs(comp.front().v);
    } else if (real) {
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nr, nc);
      for (const Entry& e : comp) d(lr[static_cast<std::size_t>(e.r)], lc[static_cast<std::size_t>(e.c)]) += e.v.real();
      s = Eigen::JacobiSVD<Eigen::MatrixXd>(d).singularValues()(0);
    } else {
      Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(nr, nc);
      for (const Entry& e : comp) d(lr[static_cast<std::size_t>(e.r)], lc[static_cast<std::size_t>(e.c)]) += e.v;
      s = Eigen::JacobiSVD<Eigen::MatrixXcd>(d).singularValues()(0);
    }
    best = std::max(best, s);
    for (const Entry& e : comp) {
      lr[static_cast<std::size_t>(e.r)] = -1;
      lc[static_cast<std::size_t>(e.c)] = -1;
    }
  }
  return best;
}

GelRotation gel_for_normal(int k0, double b, double a) {
  if (k0 < 1) throw std::invalid_argument("gel_for_normal: k0 must be at least 1");
  GelRotation g;
  g.k0 = k0;
  g.a = a;
  g.b = b;
  rotation_tables(k0, g.alpha, g.beta);
  g.bound = std::abs(b - a) + std::abs(b) * std::numbers::pi / (2.0 * k0);
  // Blocks of S' - S from span(v_k, w_k) to span(v_{k+1}, w_{k+1}) in the bases (xi_k, eta_k), (v, w).
  double best = std::abs(a - b);
  for (int k = 0; k < k0; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    Eigen::Matrix2d d;
    d << a * g.alpha[ks + 1] - b * g.alpha[ks], -b * g.beta[ks + 1] + b * g.beta[ks],
        a * g.beta[ks + 1] - b * g.beta[ks], b * g.alpha[ks + 1] - b * g.alpha[ks];
    best = std::max(best, Eigen::JacobiSVD<Eigen::Matrix2d>(d).singularValues()(0));
  }
  g.measured_norm = best;
  return g;
}

double helping_bound(double norm, int M, double h) { return norm * std::numbers::pi / (M - 2) + 2.0 * h; }

NormalAssembly zero_assembly(const BilateralShift& s) {
  NormalAssembly a = single_orbit(s, 0, std::vector<double>(static_cast<std::size_t>(s.size()), 0.0), "zero");
  measure(a, s);
  return a;
}

NormalAssembly normalize_with_step(const BilateralShift& s, int M, double h) {
  const int n = s.size();
  if (n < 1) throw std::invalid_argument("normalizer: empty shift");
  if (M < 4 || M % 2 != 0) throw std::invalid_argument("normalizer: M must be an even integer >= 4");
  if (!(h > 0)) throw std::invalid_argument("normalizer: grid step must be positive");
  std::vector<double> mod(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) mod[static_cast<std::size_t>(k)] = std::abs(s.weights[static_cast<std::size_t>(k)]);
  const double nrm = *std::max_element(mod.begin(), mod.end());
  const double mn = *std::min_element(mod.begin(), mod.end());

  if (n <= 2 * M || nrm == mn) {
    const double mu = (nrm + mn) / 2;
    NormalAssembly a = single_orbit(s, 0, std::vector<double>(static_cast<std::size_t>(n), mu), "radial");
    a.levels.M = M;
    a.levels.grid_step = h;
    a.levels.omega_index = 0;
    measure(a, s);
    return a;
  }

  auto level = [&](long long r) { return nrm - static_cast<double>(r) * h; };
  const int kt = static_cast<int>(std::max_element(mod.begin(), mod.end()) - mod.begin());
  const int q = n / M, d = n % M;
  const int origin = ((kt - d) % n + n) % n;
  auto idx = [&](long long p) { return static_cast<int>(((origin + p) % n + n) % n); };

  // Step 1: intervals of M positions (the first holds M + d) and rounding onto the grid.
  LevelStructure ls;
  ls.M = M;
  ls.grid_step = h;
  std::vector<int> istart, ilen;
  istart.push_back(0);
  ilen.push_back(M + d);
  for (int j = 1; j < q; ++j) {
    istart.push_back(M + d + (j - 1) * M);
    ilen.push_back(M);
  }
  std::vector<long long> R(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) {
    double c = nrm;
    for (int p = 0; p < ilen[static_cast<std::size_t>(j)]; ++p) c = std::min(c, mod[static_cast<std::size_t>(idx(istart[static_cast<std::size_t>(j)] + p))]);
    long long r = static_cast<long long>(std::floor((nrm - c) / h));
    r = std::max(0LL, r);
    while (r > 0 && level(r) < c) --r;
    while (level(r + 1) >= c) ++r;
    R[static_cast<std::size_t>(j)] = r;
    ls.intervals.push_back(LevelInterval{idx(istart[static_cast<std::size_t>(j)]), ilen[static_cast<std::size_t>(j)], r, level(r)});
  }
  const long long rlow = *std::max_element(R.begin(), R.end());
  const int jlow = static_cast<int>(std::find(R.begin(), R.end(), rlow) - R.begin());
  const int kbar = istart[static_cast<std::size_t>(jlow)];  // position of the omega edge
  ls.omega_index = idx(kbar);

  NormalAssembly a;
  a.n = n;
  a.branch = "levels";
  a.phases = phase_vector(s, idx(kbar));
  const cplx omega = a.phases[static_cast<std::size_t>(idx(kbar))] * unit_phase(s.weights[static_cast<std::size_t>(idx(kbar))]);

  std::vector<long long> rpos(static_cast<std::size_t>(n));
  for (int j = 0; j < q; ++j)
    for (int p = 0; p < ilen[static_cast<std::size_t>(j)]; ++p) rpos[static_cast<std::size_t>(istart[static_cast<std::size_t>(j)] + p)] = R[static_cast<std::size_t>(j)];
  auto c1 = [&](int p) -> cplx {
    const double v = level(rpos[static_cast<std::size_t>(p)]);
    return p == kbar ? omega * v : cplx(v);
  };

  // Merge consecutive equal intervals cyclically.
  struct Run {
    long long start;
    int len;
    long long r;
  };
  std::vector<Run> runs;
  for (int j = 0; j < q; ++j) {
    if (!runs.empty() && runs.back().r == R[static_cast<std::size_t>(j)]) {
      runs.back().len += ilen[static_cast<std::size_t>(j)];
    } else {
      runs.push_back(Run{istart[static_cast<std::size_t>(j)], ilen[static_cast<std::size_t>(j)], R[static_cast<std::size_t>(j)]});
    }
  }
  if (runs.size() > 1 && runs.front().r == runs.back().r) {
    runs.front().start = runs.back().start - n;
    runs.front().len += runs.back().len;
    runs.pop_back();
  }
  for (const Run& r : runs) ls.merged.push_back(LevelInterval{idx(r.start), r.len, r.r, level(r.r)});
  a.levels = ls;

  // Basis in positions; each position starts as its own element.
  for (int p = 0; p < n; ++p) a.basis.push_back(BasisElement{idx(p), -1, 1.0, 0.0});
  a.image.assign(static_cast<std::size_t>(n), -1);
  a.image_weight.assign(static_cast<std::size_t>(n), 0.0);

  if (runs.size() == 1) {
    for (int p = 0; p < n; ++p) {
      a.image[static_cast<std::size_t>(p)] = (p + 1) % n;
      a.image_weight[static_cast<std::size_t>(p)] = c1(p);
    }
    measure(a, s);
    a.step1_distance = a.distance;
    return a;
  }

  const int nr = static_cast<int>(runs.size());
  for (int j = 0; j < nr; ++j)
    if (std::llabs(runs[static_cast<std::size_t>(j)].r - runs[static_cast<std::size_t>((j + 1) % nr)].r) != 1)
      throw std::logic_error("normalizer: adjacent rounded levels differ by more than one grid step");

  // ||S_1 - S|| before the surgeries.
  {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int p = 0; p < n; ++p) {
      const int k = idx(p);
      const cplx w = a.phases[static_cast<std::size_t>(k)] * s.weights[static_cast<std::size_t>(k)] *
                     std::conj(a.phases[static_cast<std::size_t>((k + 1) % n)]);
      t.emplace_back((k + 1) % n, k, c1(p) - w);
    }
    Eigen::SparseMatrix<cplx> D(n, n);
    D.setFromTriplets(t.begin(), t.end());
    a.step1_distance = sparse_component_norm(D);
  }

  // Linearize the cyclic run list starting at a lowest run so that components never wrap.
  const int jl = static_cast<int>(std::find_if(runs.begin(), runs.end(), [&](const Run& r) { return r.r == rlow; }) - runs.begin());
  std::rotate(runs.begin(), runs.begin() + jl, runs.end());

  const int k0 = (M - 2) / 2;
  std::vector<double> alpha, beta;
  rotation_tables(k0, alpha, beta);

  // Roles of positions touched by surgeries.
  enum Kind : char { plain = 0, vrun, wrun };
  struct Role {
    Kind kind = plain;
    int surgery = -1;
    int k = -1;
  };
  struct Surgery {
    std::vector<int> v, w;  // positions; w has k0 + 2 entries
    long long rb;
  };
  std::vector<Role> role(static_cast<std::size_t>(n));
  std::vector<Surgery> surg;
  auto posmod = [&](long long p) { return static_cast<int>(((p % n) + n) % n); };
  auto claim = [&](int p, Kind kind, int sid, int k) {
    if (role[static_cast<std::size_t>(p)].kind != plain) throw std::logic_error("normalizer: surgery vectors overlap");
    role[static_cast<std::size_t>(p)] = Role{kind, sid, k};
  };

  // Step 2: each connected component of J_b, b above the lowest level.
  for (long long rb = 0; rb < rlow; ++rb) {
    int j = 0;
    while (j < nr) {
      if (runs[static_cast<std::size_t>(j)].r > rb) {
        ++j;
        continue;
      }
      int j1 = j;
      while (j1 + 1 < nr && runs[static_cast<std::size_t>(j1 + 1)].r <= rb) ++j1;
      const Run& first = runs[static_cast<std::size_t>(j)];
      const Run& last = runs[static_cast<std::size_t>(j1)];
      if (first.r != rb || last.r != rb) throw std::logic_error("normalizer: component boundary off the level grid");
      Surgery sg;
      sg.rb = rb;
      const int sid = static_cast<int>(surg.size());
      const long long last_pos = last.start + last.len - 1;
      for (int k = 0; k <= k0; ++k) sg.v.push_back(posmod(first.start + k));
      for (int k = 0; k <= k0 + 1; ++k) sg.w.push_back(posmod(last_pos - k0 + k));
      for (int k = 0; k <= k0; ++k) claim(sg.v[static_cast<std::size_t>(k)], vrun, sid, k);
      for (int k = 0; k <= k0; ++k) claim(sg.w[static_cast<std::size_t>(k)], wrun, sid, k);
      surg.push_back(std::move(sg));
      j = j1 + 1;
    }
  }
  a.surgeries = surg.size();

  // Element ids: xi_k lives at element v_k, eta_k at element w_k.
  for (const Surgery& sg : surg)
    for (int k = 0; k <= k0; ++k) {
      const int pv = sg.v[static_cast<std::size_t>(k)], pw = sg.w[static_cast<std::size_t>(k)];
      const double al = alpha[static_cast<std::size_t>(k)], be = beta[static_cast<std::size_t>(k)];
      auto make = [&](double cv, double cw) {
        if (cw == 0.0) return BasisElement{idx(pv), -1, cv, 0.0};
        if (cv == 0.0) return BasisElement{idx(pw), -1, cw, 0.0};
        return BasisElement{idx(pv), idx(pw), cv, cw};
      };
      a.basis[static_cast<std::size_t>(pv)] = make(al, be);
      a.basis[static_cast<std::size_t>(pw)] = make(-be, al);
    }

  // Representation of a standard vector e_p as a basis element with sign.
  auto repr = [&](int p) -> std::pair<int, double> {
    const Role& ro = role[static_cast<std::size_t>(p)];
    if (ro.kind == plain) return {p, 1.0};
    const Surgery& sg = surg[static_cast<std::size_t>(ro.surgery)];
    if (ro.kind == vrun && ro.k == 0) return {p, 1.0};                                       // xi_0 = v_0
    if (ro.kind == wrun && ro.k == 0) return {p, 1.0};                                       // eta_0 = w_0
    if (ro.kind == vrun && ro.k == k0) return {sg.w[static_cast<std::size_t>(k0)], -1.0};   // eta_k0 = -v_k0
    if (ro.kind == wrun && ro.k == k0) return {sg.v[static_cast<std::size_t>(k0)], 1.0};    // xi_k0 = w_k0
    throw std::logic_error("normalizer: image lands on an interior rotated vector");
  };

  for (int p = 0; p < n; ++p) {
    if (role[static_cast<std::size_t>(p)].kind != plain) continue;
    const auto [t, sg] = repr(posmod(p + 1));
    a.image[static_cast<std::size_t>(p)] = t;
    a.image_weight[static_cast<std::size_t>(p)] = c1(p) * sg;
  }
  for (const Surgery& sg : surg) {
    const double b = level(sg.rb), av = level(sg.rb + 1);
    for (int k = 0; k < k0; ++k) {
      a.image[static_cast<std::size_t>(sg.v[static_cast<std::size_t>(k)])] = sg.v[static_cast<std::size_t>(k + 1)];
      a.image_weight[static_cast<std::size_t>(sg.v[static_cast<std::size_t>(k)])] = av;
      a.image[static_cast<std::size_t>(sg.w[static_cast<std::size_t>(k)])] = sg.w[static_cast<std::size_t>(k + 1)];
      a.image_weight[static_cast<std::size_t>(sg.w[static_cast<std::size_t>(k)])] = b;
    }
    const int vk = sg.v[static_cast<std::size_t>(k0)], wk = sg.w[static_cast<std::size_t>(k0)];
    const auto [tx, sx] = repr(sg.w[static_cast<std::size_t>(k0 + 1)]);
    a.image[static_cast<std::size_t>(vk)] = tx;
    a.image_weight[static_cast<std::size_t>(vk)] = av * sx;
    const auto [te, se] = repr(posmod(vk + 1));
    a.image[static_cast<std::size_t>(wk)] = te;
    a.image_weight[static_cast<std::size_t>(wk)] = -c1(vk) * se;
  }
  measure(a, s);
  return a;
}

NormalAssembly normalize_shift(const BilateralShift& s, int M, BergMode mode, double sigma) {
  if (M < 4 || M % 2 != 0) throw std::invalid_argument("normalizer: M must be an even integer >= 4");
  const double comm = s.self_commutator_norm();
  const double Md = M;
  if (mode == BergMode::cubic) {
    if (!(comm < 1.0 / (Md * Md * Md))) throw std::invalid_argument("normalizer: self-commutator not below 1/M^3");
  } else {
    if (!(sigma > 0)) throw std::invalid_argument("normalizer: sigma must be positive");
    if (s.min_modulus() < sigma) throw std::invalid_argument("normalizer: weight below sigma");
    if (!(comm < 2.0 * sigma / (Md * Md))) throw std::invalid_argument("normalizer: self-commutator not below 2 sigma/M^2");
  }
  return normalize_with_step(s, M, 1.0 / Md);
}

BergResult nearest_normal(const BilateralShift& s) {
  BergResult out;
  const double nrm = s.norm();
  const double comm = s.self_commutator_norm();
  out.bound = kCubicConstant * std::cbrt(nrm) * std::cbrt(comm);
  if (nrm == 0.0 || comm == 0.0) {
    // Constant moduli: the radial branch returns S itself.
    out.assembly = normalize_with_step(s, 4, 1.0);
    return out;
  }
  const double scale = kCubicR / nrm;
  out.x = comm * scale * scale;
  if (out.x > std::pow(kCubicM0 + 2.0, -3.0)) {
    out.assembly = zero_assembly(s);
    return out;
  }
  out.M = 2 * (static_cast<int>(std::ceil(std::cbrt(1.0 / out.x) / 2.0)) - 1);
  const double h = nrm / (kCubicR * out.M);
  out.assembly = normalize_with_step(s, out.M, h);
  out.lemma_bound = helping_bound(nrm, out.M, h);
  return out;
}

BergResult nearest_normal_sigma(const BilateralShift& s, double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("nearest_normal_sigma: sigma must be positive");
  if (s.min_modulus() < sigma) throw std::invalid_argument("nearest_normal_sigma: weight below sigma");
  BergResult out;
  const double nrm = s.norm();
  const double comm = s.self_commutator_norm();
  out.bound = kSigmaConstant * std::sqrt(nrm / sigma) * std::sqrt(comm);
  if (comm == 0.0) {
    out.assembly = normalize_with_step(s, 4, 1.0);
    return out;
  }
  // Rescaled operator r S/||S||: commutator scales by (r/||S||)^2, sigma by r/||S||.
  out.x = comm * kSigmaR / (2.0 * sigma * nrm);
  if (out.x > std::pow(kSigmaM0 + 2.0, -2.0)) {
    out.assembly = zero_assembly(s);
    return out;
  }
  out.M = 2 * (static_cast<int>(std::ceil(std::sqrt(1.0 / out.x) / 2.0)) - 1);
  const double h = nrm / (kSigmaR * out.M);
  out.assembly = normalize_with_step(s, out.M, h);
  out.lemma_bound = helping_bound(nrm, out.M, h);
  return out;
}

Eigen::SparseMatrix<cplx> assembly_matrix(const NormalAssembly& a) {
  Eigen::SparseMatrix<cplx> f = assembly_f_matrix(a);
  std::vector<Eigen::Triplet<cplx>> t;
  for (int k = 0; k < f.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(f, k); it; ++it)
      t.emplace_back(it.row(), it.col(),
                     a.phases[static_cast<std::size_t>(it.row())] * it.value() * std::conj(a.phases[static_cast<std::size_t>(it.col())]));
  Eigen::SparseMatrix<cplx> m(a.n, a.n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

bool assembly_is_real(const NormalAssembly& a) {
  auto real = [](cplx c) { return c.imag() == 0.0; };
  return std::all_of(a.phases.begin(), a.phases.end(), real) &&
         std::all_of(a.image_weight.begin(), a.image_weight.end(), real);
}

}  // namespace nearcomm
