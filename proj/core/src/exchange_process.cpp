#include "nearcomm/exchange_process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nearcomm {

namespace {

bool unit_column(const Eigen::MatrixXd& P, int c) {
  for (Eigen::Index r = 0; r < P.rows(); ++r)
    if (P(r, c) != (r == c ? 1.0 : 0.0)) return false;
  return true;
}

void check_nested(const ShiftSystem& s) {
  for (std::size_t r = 0; r + 1 < s.orbits.size(); ++r)
    if (s.orbits[r].two_lo < s.orbits[r + 1].two_lo || s.orbits[r].two_hi > s.orbits[r + 1].two_hi)
      throw std::invalid_argument("exchange process: orbit ranges are not nested in ascending order");
  for (const Orbit& o : s.orbits)
    for (double w : o.weights)
      if (w < 0) throw std::invalid_argument("exchange process: negative weight");
}

// Original weight c_i^r out of level two_m, zero past the end of the orbit.
double orbit_weight(const Orbit& o, long long two_m) {
  if (!o.active_at(two_m) || two_m == o.two_hi) return 0.0;
  return o.weights[static_cast<std::size_t>((two_m - o.two_lo) / 2)];
}

// Window-relative (1-based) levels whose track-1 weight is set to zero, one per spanning orbit.
std::vector<int> zero_levels(int m, int n0) {
  if (m == 1) return {2};
  std::vector<int> z{2};
  for (int r = 2; r <= m - 1; ++r) z.push_back(4 + (n0 + 1) * (2 * r - 3));
  z.push_back(3 + (n0 + 1) * (2 * m - 3));
  return z;
}

}  // namespace

GepWindow gep_window(ShiftSystem& system, double a, double b, int steps) {
  check_nested(system);
  if (!(a < b)) throw std::invalid_argument("gep_window: need a < b");
  GepWindow w;
  w.a = a;
  w.b = b;
  w.level_lo = -1;
  for (int i = 0; i < static_cast<int>(system.levels.size()); ++i) {
    const double x = system.eigenvalue(i);
    if (x < a || x > b || system.levels[static_cast<std::size_t>(i)].size() == 0) continue;
    if (w.level_lo < 0) w.level_lo = i;
    w.level_hi = i;
  }
  if (w.level_lo < 0) throw std::invalid_argument("gep_window: window holds no spectrum");
  for (int i = w.level_lo; i <= w.level_hi; ++i)
    if (system.levels[static_cast<std::size_t>(i)].size() == 0)
      throw std::invalid_argument("gep_window: gap in the spectrum inside the window");
  const int n0 = w.level_hi - w.level_lo + 1;
  const long long lo2 = system.levels[static_cast<std::size_t>(w.level_lo)].two_m;
  const long long hi2 = system.levels[static_cast<std::size_t>(w.level_hi)].two_m;

  const int m = static_cast<int>(system.orbits.size());
  for (int r = 0; r < m; ++r) {
    const Orbit& o = system.orbits[static_cast<std::size_t>(r)];
    if (o.active_at(lo2) && o.active_at(hi2)) {
      if (w.r0 < 0) w.r0 = r;
      ++w.m;
    }
  }
  const int mk = w.m;
  if (n0 < 3) throw std::invalid_argument("gep_window: spectral count " + std::to_string(n0) + " below 3");
  if (mk >= 2) {
    if (steps < 2) throw std::invalid_argument("gep_window: N0 must be at least 2");
    const long long need = static_cast<long long>(2 * mk - 3) * (steps + 1) + 4;
    if (n0 < need)
      throw std::invalid_argument("gep_window: spectral count " + std::to_string(n0) + " below required " +
                                  std::to_string(need));
  }
  w.steps = steps;

  // Stated estimates from the original weights.
  const double rot = mk >= 2 ? std::numbers::pi / (2.0 * steps) : 0.0;
  for (int i = w.level_lo; i <= w.level_hi; ++i) {
    const long long t2 = system.levels[static_cast<std::size_t>(i)].two_m;
    if (w.r0 >= 0) w.D = std::max(w.D, std::abs(orbit_weight(system.orbits[static_cast<std::size_t>(w.r0)], t2)));
    for (int r = w.r0; mk >= 2 && r + 1 < m; ++r) {
      const double c0 = std::abs(orbit_weight(system.orbits[static_cast<std::size_t>(r)], t2));
      const double c1 = std::abs(orbit_weight(system.orbits[static_cast<std::size_t>(r + 1)], t2));
      w.G = std::max(w.G, std::abs(c1 - c0) + rot * std::max(c0, c1));
      w.T = std::max(w.T, std::abs(c1 * c1 - c0 * c0) / steps);
    }
  }

  w.F.assign(static_cast<std::size_t>(n0), {});
  w.Fc.assign(static_cast<std::size_t>(n0), {});
  std::vector<std::vector<char>> inF(static_cast<std::size_t>(n0));
  for (int k = 0; k < n0; ++k) inF[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(system.levels[static_cast<std::size_t>(w.level_lo + k)].size()), 0);

  if (mk >= 1) {
    // Braided exchanges over the groupings U_j, then the track-1 cuts.
    if (mk >= 2)
      for (const ScheduleColumn& col : braided_schedule(mk, steps))
        for (auto [v, u] : col.pairs)
          apply_exchange(system, ExchangePlan{w.r0 + v - 1, w.r0 + u - 1, w.level_lo + col.rel_lo - 1,
                                              w.level_lo + col.rel_hi - 1});
    const std::vector<int> z = zero_levels(mk, steps);
    for (int rel : z) {
      const int li = w.level_lo + rel - 1;
      Level& L = system.levels[static_cast<std::size_t>(li)];
      const int c = L.coordinate_of(w.r0);
      if (!unit_column(L.rotation, c)) throw std::logic_error("gep_window: cut level touched by an exchange");
      L.weight[static_cast<std::size_t>(c)] = 0.0;
      L.next[static_cast<std::size_t>(c)] = -1;
      w.zeroed.emplace_back(li, c);
    }
    // F: orbit of the r-th spanning head up to its cut level.
    for (int r = 1; r <= mk; ++r) {
      const int top = z[static_cast<std::size_t>(r - 1)];
      w.F_top = std::max(w.F_top, top);
      int slot = system.levels[static_cast<std::size_t>(w.level_lo)].coordinate_of(w.r0 + r - 1);
      for (int k = 0; k < top; ++k) {
        const Level& L = system.levels[static_cast<std::size_t>(w.level_lo + k)];
        if (inF[static_cast<std::size_t>(k)][static_cast<std::size_t>(slot)])
          throw std::logic_error("gep_window: two head orbits share a vector");
        inF[static_cast<std::size_t>(k)][static_cast<std::size_t>(slot)] = 1;
        if (k + 1 == top) {
          if (std::make_pair(w.level_lo + k, slot) != w.zeroed[static_cast<std::size_t>(r - 1)])
            throw std::logic_error("gep_window: head orbit " + std::to_string(r) + " does not reach its cut");
          break;
        }
        slot = L.next[static_cast<std::size_t>(slot)];
        if (slot < 0) throw std::logic_error("gep_window: head orbit ends inside the window");
      }
    }
  }
  // Short orbits: whole window part joins F when the orbit is present at a^sigma.
  for (int r = 0; r < (w.r0 < 0 ? m : w.r0); ++r) {
    const Orbit& o = system.orbits[static_cast<std::size_t>(r)];
    const bool to_f = o.active_at(lo2);
    for (int k = 0; k < n0; ++k) {
      const Level& L = system.levels[static_cast<std::size_t>(w.level_lo + k)];
      const int c = L.coordinate_of(r);
      if (c >= 0 && to_f) inF[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)] = 1;
    }
  }
  for (int k = 0; k < n0; ++k)
    for (int t = 0; t < static_cast<int>(inF[static_cast<std::size_t>(k)].size()); ++t)
      (inF[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] ? w.F : w.Fc)[static_cast<std::size_t>(k)].push_back(t);
  return w;
}

WindowPartition uniform_partition(const ShiftSystem& system, int width, int max_steps) {
  if (width < 3) throw std::invalid_argument("uniform_partition: width must be at least 3");
  check_nested(system);
  const int nl = static_cast<int>(system.levels.size());
  if (nl < 3) throw std::invalid_argument("uniform_partition: fewer than 3 levels");
  std::vector<int> starts;
  for (int i = 0; i < nl; i += width) starts.push_back(i);
  if (starts.size() > 1 && nl - starts.back() < width) starts.pop_back();
  WindowPartition p;
  for (int s : starts) p.cuts.push_back(system.eigenvalue(s));
  p.cuts.push_back(system.eigenvalue(nl - 1));
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const int lo = starts[k];
    const int hi = k + 1 < starts.size() ? starts[k + 1] - 1 : nl - 1;
    const long long lo2 = system.levels[static_cast<std::size_t>(lo)].two_m;
    const long long hi2 = system.levels[static_cast<std::size_t>(hi)].two_m;
    int mk = 0;
    for (const Orbit& o : system.orbits) mk += o.active_at(lo2) && o.active_at(hi2);
    const int count = hi - lo + 1;
    int n = 0;
    if (mk >= 2) {
      n = (count - 4) / (2 * mk - 3) - 1;
      if (max_steps > 0) n = std::min(n, max_steps);
      if (n < 2)
        throw std::invalid_argument("uniform_partition: window " + std::to_string(k) + " too narrow for " +
                                    std::to_string(mk) + " spanning orbits");
    }
    p.steps.push_back(n);
  }
  return p;
}

GepResult gep(const ShiftSystem& system, const WindowPartition& partition) {
  check_nested(system);
  const std::size_t K = partition.steps.size();
  if (K == 0 || partition.cuts.size() != K + 1) throw std::invalid_argument("gep: need K windows and K + 1 cuts");
  for (std::size_t k = 0; k < K; ++k)
    if (!(partition.cuts[k] < partition.cuts[k + 1])) throw std::invalid_argument("gep: cuts must increase");
  GepResult res;
  res.original = system;
  res.shifted = system;
  res.cuts = partition.cuts;
  const int nl = static_cast<int>(system.levels.size());
  for (int i = 0; i < nl; ++i)
    if (system.levels[static_cast<std::size_t>(i)].size() > 0 &&
        (system.eigenvalue(i) < partition.cuts.front() || system.eigenvalue(i) > partition.cuts.back()))
      throw std::invalid_argument("gep: spectrum not covered by the windows");

  res.e_index.resize(static_cast<std::size_t>(nl));
  for (int i = 0; i < nl; ++i) res.e_index[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(system.levels[static_cast<std::size_t>(i)].size()), -1);

  for (std::size_t k = 0; k < K; ++k) {
    const double lo = partition.cuts[k], hi = partition.cuts[k + 1];
    const bool last = k + 1 == K;
    double as = 0, bs = 0;
    bool any = false;
    for (int i = 0; i < nl; ++i) {
      if (system.levels[static_cast<std::size_t>(i)].size() == 0) continue;
      const double x = system.eigenvalue(i);
      if (x >= lo && (x < hi || (last && x <= hi))) {
        if (!any) as = x;
        bs = x;
        any = true;
      }
    }
    if (!any) throw std::invalid_argument("gep: window " + std::to_string(k) + " holds no spectrum");
    if (as == bs) throw std::invalid_argument("gep: window " + std::to_string(k) + " holds fewer than 3 levels");
    GepWindow w = gep_window(res.shifted, as, bs, partition.steps[k]);
    w.a = lo;
    w.b = hi;
    for (std::size_t rel = 0; rel < w.F.size(); ++rel) {
      auto& e = res.e_index[static_cast<std::size_t>(w.level_lo) + rel];
      for (int t : w.F[rel]) e[static_cast<std::size_t>(t)] = static_cast<int>(k);
      for (int t : w.Fc[rel]) e[static_cast<std::size_t>(t)] = static_cast<int>(k + 1);
    }
    res.max_diam = std::max(res.max_diam, hi - lo);
    res.windows.push_back(std::move(w));
  }

  res.original_comm = self_commutator_norm(system);
  res.a_prime.resize(static_cast<std::size_t>(nl));
  for (int i = 0; i < nl; ++i) {
    const auto& e = res.e_index[static_cast<std::size_t>(i)];
    auto& ap = res.a_prime[static_cast<std::size_t>(i)];
    for (int idx : e) {
      if (idx < 0) throw std::logic_error("gep: slot outside every E_k at level " + std::to_string(i));
      ap.push_back(partition.cuts[static_cast<std::size_t>(idx)]);
      res.measured_a = std::max(res.measured_a, std::abs(ap.back() - system.eigenvalue(i)));
    }
  }
  for (const GepWindow& w : res.windows) {
    res.stated_norm = std::max(res.stated_norm, std::max(w.G, w.D));
    res.stated_comm = std::max(res.stated_comm, std::max(res.original_comm + w.T, w.D * w.D));
  }
  for (int i = 0; i + 1 < nl; ++i) {
    const Level& L = res.shifted.levels[static_cast<std::size_t>(i)];
    for (int t = 0; t < L.size(); ++t) {
      const int n = L.next[static_cast<std::size_t>(t)];
      if (n < 0) continue;
      const double da = res.a_prime[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(n)] -
                        res.a_prime[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      res.commutator = std::max(res.commutator, std::abs(da * L.weight[static_cast<std::size_t>(t)]));
    }
  }
  for (GepWindow& w : res.windows)
    for (int i = std::max(0, w.level_lo - 1); i <= w.level_hi && i + 1 < nl; ++i) {
      const Eigen::MatrixXd Dm = level_block(res.shifted, i) - level_block(system, i);
      if (Dm.size() > 0) w.measured_norm = std::max(w.measured_norm, dense_norm(Dm));
    }
  res.measured_norm = superdiagonal_norm(res.shifted, system);
  res.measured_comm = self_commutator_norm(res.shifted);
  return res;
}

LevelProjection e_projection(const GepResult& r, int k) {
  LevelProjection p;
  p.slots.resize(r.e_index.size());
  for (std::size_t i = 0; i < r.e_index.size(); ++i)
    for (int t = 0; t < static_cast<int>(r.e_index[i].size()); ++t)
      if (r.e_index[i][static_cast<std::size_t>(t)] == k) p.slots[i].push_back(t);
  return p;
}

LevelProjection window_projection(const GepResult& r, const GepWindow& w, bool complement) {
  LevelProjection p;
  p.slots.resize(r.shifted.levels.size());
  const auto& src = complement ? w.Fc : w.F;
  for (std::size_t rel = 0; rel < src.size(); ++rel) p.slots[static_cast<std::size_t>(w.level_lo) + rel] = src[rel];
  return p;
}

Eigen::MatrixXd a_prime_dense(const GepResult& r, std::size_t cap) {
  const Eigen::MatrixXd U = slot_basis(r.shifted, cap);
  Eigen::VectorXd d(U.cols());
  Eigen::Index k = 0;
  for (const auto& lev : r.a_prime)
    for (double x : lev) d(k++) = x;
  return U * d.asDiagonal() * U.transpose();
}

NormalizedOrbits normalize_orbits(const GepResult& r) {
  NormalizedOrbits out;
  const double snorm = operator_norm(r.original);
  out.bound = kCubicConstant * std::cbrt(snorm) * std::cbrt(r.measured_comm);
  for (const Chain& c : chains(r.shifted)) {
    std::size_t start = 0;
    for (std::size_t k = 0; k <= c.weights.size(); ++k) {
      if (k < c.weights.size() && c.weights[k] != 0.0) continue;
      NormalPiece piece;
      piece.nodes.assign(c.nodes.begin() + static_cast<std::ptrdiff_t>(start), c.nodes.begin() + static_cast<std::ptrdiff_t>(k) + 1);
      const std::vector<double> w(c.weights.begin() + static_cast<std::ptrdiff_t>(start), c.weights.begin() + static_cast<std::ptrdiff_t>(k));
      const auto [l0, s0] = piece.nodes.front();
      const int e0 = r.e_index[static_cast<std::size_t>(l0)][static_cast<std::size_t>(s0)];
      for (auto [l, s] : piece.nodes)
        if (r.e_index[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)] != e0) out.commutes = false;
      piece.berg = nearest_normal(BilateralShift::from_unilateral(w));
      out.distance = std::max(out.distance, piece.berg.assembly.distance);
      out.normality_residual = std::max(out.normality_residual, piece.berg.assembly.normality_residual);
      out.real = out.real && assembly_is_real(piece.berg.assembly);
      out.pieces.push_back(std::move(piece));
      start = k + 1;
    }
  }
  return out;
}

Eigen::MatrixXd normal_dense(const GepResult& r, const NormalizedOrbits& n, std::size_t cap) {
  const Eigen::MatrixXd U = slot_basis(r.shifted, cap);
  const auto off = r.shifted.offsets();
  auto col = [&](std::pair<int, int> node) {
    return static_cast<Eigen::Index>(off[static_cast<std::size_t>(node.first)]) + node.second;
  };
  // Assemble in the slot basis first, then rotate once.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(U.rows(), U.cols());
  for (const NormalPiece& p : n.pieces) {
    const Eigen::SparseMatrix<cplx> N = assembly_matrix(p.berg.assembly);
    for (int k = 0; k < N.outerSize(); ++k)
      for (Eigen::SparseMatrix<cplx>::InnerIterator it(N, k); it; ++it) {
        if (it.value().imag() != 0.0) throw std::logic_error("normal_dense: complex entry in a real assembly");
        M(col(p.nodes[static_cast<std::size_t>(it.row())]), col(p.nodes[static_cast<std::size_t>(it.col())])) += it.value().real();
      }
  }
  return U * M * U.transpose();
}

}  // namespace nearcomm
