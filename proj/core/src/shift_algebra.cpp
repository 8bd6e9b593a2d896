#include "nearcomm/shift_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nearcomm {

int Level::coordinate_of(int orbit) const {
  auto it = std::lower_bound(active.begin(), active.end(), orbit);
  if (it == active.end() || *it != orbit) return -1;
  return static_cast<int>(it - active.begin());
}

int ShiftSystem::level_index(long long two_m) const {
  if (levels.empty()) return -1;
  const long long d = two_m - levels.front().two_m;
  if (d < 0 || d % 2 != 0) return -1;
  const long long i = d / 2;
  return i < static_cast<long long>(levels.size()) ? static_cast<int>(i) : -1;
}

double ShiftSystem::eigenvalue(int level) const {
  return static_cast<double>(levels[static_cast<std::size_t>(level)].two_m) / (2.0 * static_cast<double>(divisor));
}

std::size_t ShiftSystem::dimension() const {
  std::size_t n = 0;
  for (const auto& l : levels) n += l.active.size();
  return n;
}

std::vector<std::size_t> ShiftSystem::offsets() const {
  std::vector<std::size_t> off(levels.size() + 1, 0);
  for (std::size_t i = 0; i < levels.size(); ++i) off[i + 1] = off[i] + levels[i].active.size();
  return off;
}

std::size_t LevelProjection::rank() const {
  std::size_t r = 0;
  for (const auto& s : slots) r += s.size();
  return r;
}

ShiftSystem make_system(long long divisor, std::vector<Orbit> orbits) {
  if (divisor <= 0) throw std::invalid_argument("make_system: divisor must be positive");
  if (orbits.empty()) throw std::invalid_argument("make_system: no orbits");
  const long long parity = ((orbits.front().two_lo % 2) + 2) % 2;
  long long lo = orbits.front().two_lo, hi = orbits.front().two_hi;
  for (const auto& o : orbits) {
    if (o.two_hi < o.two_lo) throw std::invalid_argument("make_system: empty orbit range");
    if (((o.two_lo % 2) + 2) % 2 != parity || ((o.two_hi % 2) + 2) % 2 != parity)
      throw std::invalid_argument("make_system: orbits on different grids (parity mismatch)");
    if (static_cast<long long>(o.weights.size()) != o.length() - 1)
      throw std::invalid_argument("make_system: weight count must equal number of transitions");
    lo = std::min(lo, o.two_lo);
    hi = std::max(hi, o.two_hi);
  }
  ShiftSystem s;
  s.divisor = divisor;
  s.orbits = std::move(orbits);
  const std::size_t nlev = static_cast<std::size_t>((hi - lo) / 2 + 1);
  s.levels.resize(nlev);
  for (std::size_t i = 0; i < nlev; ++i) {
    Level& L = s.levels[i];
    L.two_m = lo + 2 * static_cast<long long>(i);
    for (int r = 0; r < static_cast<int>(s.orbits.size()); ++r)
      if (s.orbits[static_cast<std::size_t>(r)].active_at(L.two_m)) L.active.push_back(r);
    const int k = L.size();
    L.rotation = Eigen::MatrixXd::Identity(k, k);
    L.sign.assign(static_cast<std::size_t>(k), 1);
    L.weight.assign(static_cast<std::size_t>(k), 0.0);
    L.next.assign(static_cast<std::size_t>(k), -1);
  }
  for (std::size_t i = 0; i + 1 < nlev; ++i) {
    Level& L = s.levels[i];
    const Level& U = s.levels[i + 1];
    for (int t = 0; t < L.size(); ++t) {
      const Orbit& o = s.orbits[static_cast<std::size_t>(L.active[static_cast<std::size_t>(t)])];
      if (L.two_m < o.two_hi) {
        L.weight[static_cast<std::size_t>(t)] = o.weights[static_cast<std::size_t>((L.two_m - o.two_lo) / 2)];
        L.next[static_cast<std::size_t>(t)] = U.coordinate_of(L.active[static_cast<std::size_t>(t)]);
      }
    }
  }
  return s;
}

std::pair<LevelDiagonal, ShiftSystem> build_system(const std::vector<IrrepSpec>& spins, long long divisor) {
  if (spins.empty()) throw std::invalid_argument("build_system: empty spin list");
  for (std::size_t r = 0; r < spins.size(); ++r) {
    if (spins[r].two_lambda.two_x < 0) throw std::invalid_argument("build_system: negative spin");
    if (r > 0 && spins[r].two_lambda < spins[r - 1].two_lambda)
      throw std::invalid_argument("build_system: spins must be sorted ascending");
    if (!compatible(spins[r].two_lambda, spins.front().two_lambda))
      throw std::invalid_argument("build_system: mixed integer and half-integer spins");
  }
  std::vector<Orbit> orbits;
  orbits.reserve(spins.size());
  const double inv = 1.0 / static_cast<double>(divisor);
  for (const auto& sp : spins) {
    const IrrepGenerators g = irrep_generators(sp);
    Orbit o;
    o.two_lo = -sp.two_lambda.two_x;
    o.two_hi = sp.two_lambda.two_x;
    o.weights.reserve(g.weights.size());
    for (double w : g.weights) o.weights.push_back(w * inv);
    orbits.push_back(std::move(o));
  }
  ShiftSystem s = make_system(divisor, std::move(orbits));
  LevelDiagonal d = level_diagonal(s);
  return {std::move(d), std::move(s)};
}

LevelDiagonal level_diagonal(const ShiftSystem& system) {
  LevelDiagonal d;
  d.divisor = system.divisor;
  for (std::size_t i = 0; i < system.levels.size(); ++i) {
    d.two_m.push_back(system.levels[i].two_m);
    d.eigenvalue.push_back(system.eigenvalue(static_cast<int>(i)));
    d.dimension.push_back(system.levels[i].size());
  }
  return d;
}

void validate(const ShiftSystem& system, double tol) {
  for (std::size_t i = 0; i < system.levels.size(); ++i) {
    const Level& L = system.levels[i];
    const int k = L.size();
    if (L.rotation.rows() != k || L.rotation.cols() != k || static_cast<int>(L.sign.size()) != k ||
        static_cast<int>(L.weight.size()) != k || static_cast<int>(L.next.size()) != k)
      throw std::logic_error("validate: inconsistent level shape at level " + std::to_string(i));
    if (i > 0 && L.two_m != system.levels[i - 1].two_m + 2)
      throw std::logic_error("validate: level grid not contiguous");
    if (k > 0) {
      const double res =
          (L.rotation.transpose() * L.rotation - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
      if (res > tol) throw std::logic_error("validate: rotation not orthogonal at level " + std::to_string(i));
    }
    std::vector<char> hit(i + 1 < system.levels.size() ? system.levels[i + 1].active.size() : 0, 0);
    for (int t = 0; t < k; ++t) {
      const int n = L.next[static_cast<std::size_t>(t)];
      if (n < 0) continue;
      if (n >= static_cast<int>(hit.size())) throw std::logic_error("validate: next slot out of range");
      if (hit[static_cast<std::size_t>(n)]) throw std::logic_error("validate: next map not injective");
      hit[static_cast<std::size_t>(n)] = 1;
    }
  }
}

PhaseNormalized phase_normalize(const ShiftSystem& system) {
  PhaseNormalized out{system, {}};
  auto& flip = out.record.flip;
  flip.resize(system.levels.size());
  for (std::size_t i = 0; i < system.levels.size(); ++i) flip[i].assign(system.levels[i].active.size(), 1);
  // Levels are processed bottom-up, so a slot's flip is final before it propagates upward.
  for (std::size_t i = 0; i < system.levels.size(); ++i) {
    Level& L = out.system.levels[i];
    for (int t = 0; t < L.size(); ++t) {
      const auto ts = static_cast<std::size_t>(t);
      const int f = flip[i][ts];
      L.sign[ts] *= f;
      const int n = L.next[ts];
      if (n < 0) {
        L.weight[ts] *= f;
        continue;
      }
      const double w = L.weight[ts] * f;
      const int g = w < 0 ? -1 : 1;
      flip[i + 1][static_cast<std::size_t>(n)] = g;
      L.weight[ts] = w * g;
    }
  }
  return out;
}

Eigen::MatrixXd level_block(const ShiftSystem& system, int level) {
  const Level& L = system.levels[static_cast<std::size_t>(level)];
  const Level& U = system.levels[static_cast<std::size_t>(level + 1)];
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(U.size(), L.size());
  for (int t = 0; t < L.size(); ++t) {
    const int n = L.next[static_cast<std::size_t>(t)];
    const double w = L.weight[static_cast<std::size_t>(t)];
    if (n < 0 || w == 0.0) continue;
    B.noalias() += w * U.slot_vector(n) * L.slot_vector(t).transpose();
  }
  return B;
}

double self_commutator_norm(const ShiftSystem& system) {
  validate(system, 1e-9);
  double best = 0.0;
  std::vector<double> incoming;
  for (std::size_t i = 0; i < system.levels.size(); ++i) {
    const Level& L = system.levels[i];
    std::vector<double> in_next(i + 1 < system.levels.size() ? system.levels[i + 1].active.size() : 0, 0.0);
    if (incoming.size() != L.active.size()) incoming.assign(L.active.size(), 0.0);
    for (int t = 0; t < L.size(); ++t) {
      const auto ts = static_cast<std::size_t>(t);
      const int n = L.next[ts];
      const double out = n < 0 ? 0.0 : L.weight[ts] * L.weight[ts];
      best = std::max(best, std::abs(out - incoming[ts]));
      if (n >= 0) in_next[static_cast<std::size_t>(n)] = out;
    }
    incoming = std::move(in_next);
  }
  return best;
}

double operator_norm(const ShiftSystem& system) {
  double best = 0.0;
  for (const auto& L : system.levels)
    for (int t = 0; t < L.size(); ++t)
      if (L.next[static_cast<std::size_t>(t)] >= 0) best = std::max(best, std::abs(L.weight[static_cast<std::size_t>(t)]));
  return best;
}

double superdiagonal_norm(const ShiftSystem& x, const ShiftSystem& y) {
  if (x.divisor != y.divisor || x.levels.size() != y.levels.size())
    throw std::invalid_argument("superdiagonal_norm: grid mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < x.levels.size(); ++i) {
    if (x.levels[i].two_m != y.levels[i].two_m || x.levels[i].active != y.levels[i].active)
      throw std::invalid_argument("superdiagonal_norm: grid mismatch at level " + std::to_string(i));
    if (i + 1 == x.levels.size()) break;
    const Eigen::MatrixXd D = level_block(x, static_cast<int>(i)) - level_block(y, static_cast<int>(i));
    if (D.size() == 0) continue;
    best = std::max(best, dense_norm(D));
  }
  return best;
}

std::vector<Chain> chains(const ShiftSystem& system) {
  std::vector<std::vector<char>> has_pred(system.levels.size());
  for (std::size_t i = 0; i < system.levels.size(); ++i) has_pred[i].assign(system.levels[i].active.size(), 0);
  for (std::size_t i = 0; i + 1 < system.levels.size(); ++i)
    for (int n : system.levels[i].next)
      if (n >= 0) has_pred[i + 1][static_cast<std::size_t>(n)] = 1;
  std::vector<Chain> out;
  for (std::size_t i = 0; i < system.levels.size(); ++i) {
    for (int t = 0; t < system.levels[i].size(); ++t) {
      if (has_pred[i][static_cast<std::size_t>(t)]) continue;
      Chain c;
      int li = static_cast<int>(i), s = t;
      while (true) {
        c.nodes.emplace_back(li, s);
        const Level& L = system.levels[static_cast<std::size_t>(li)];
        const int n = L.next[static_cast<std::size_t>(s)];
        if (n < 0) break;
        c.weights.push_back(L.weight[static_cast<std::size_t>(s)]);
        ++li;
        s = n;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

namespace {

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    throw std::length_error("dense materialization of dimension " + std::to_string(n) + " exceeds cap " +
                            std::to_string(cap));
}

}  // namespace

Eigen::MatrixXd to_dense(const ShiftSystem& system, std::size_t cap) {
  const std::size_t n = system.dimension();
  check_cap(n, cap);
  const auto off = system.offsets();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i + 1 < system.levels.size(); ++i) {
    const Eigen::MatrixXd B = level_block(system, static_cast<int>(i));
    if (B.size() == 0) continue;
    M.block(static_cast<Eigen::Index>(off[i + 1]), static_cast<Eigen::Index>(off[i]), B.rows(), B.cols()) = B;
  }
  return M;
}

Eigen::MatrixXd to_dense(const LevelDiagonal& diag, std::size_t cap) {
  const std::size_t n = static_cast<std::size_t>(std::accumulate(diag.dimension.begin(), diag.dimension.end(), 0LL));
  check_cap(n, cap);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < diag.dimension.size(); ++i)
    for (int j = 0; j < diag.dimension[i]; ++j) v(k++) = diag.eigenvalue[i];
  return v.asDiagonal();
}

Eigen::MatrixXd slot_basis(const ShiftSystem& system, std::size_t cap) {
  const std::size_t n = system.dimension();
  check_cap(n, cap);
  const auto off = system.offsets();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < system.levels.size(); ++i) {
    const Level& L = system.levels[i];
    for (int t = 0; t < L.size(); ++t)
      Q.block(static_cast<Eigen::Index>(off[i]), static_cast<Eigen::Index>(off[i]) + t, L.size(), 1) = L.slot_vector(t);
  }
  return Q;
}

Eigen::MatrixXd shift_dense(const ShiftSystem& system, std::size_t cap) {
  const std::size_t n = system.dimension();
  check_cap(n, cap);
  const auto off = system.offsets();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i + 1 < system.levels.size(); ++i) {
    const Level& L = system.levels[i];
    for (int t = 0; t < L.size(); ++t) {
      const int nx = L.next[static_cast<std::size_t>(t)];
      if (nx < 0) continue;
      M(static_cast<Eigen::Index>(off[i + 1]) + nx, static_cast<Eigen::Index>(off[i]) + t) =
          L.weight[static_cast<std::size_t>(t)];
    }
  }
  return M;
}

Eigen::MatrixXd projection_dense(const ShiftSystem& system, const LevelProjection& proj, std::size_t cap) {
  const std::size_t n = system.dimension();
  check_cap(n, cap);
  if (proj.slots.size() != system.levels.size()) throw std::invalid_argument("projection_dense: level count mismatch");
  const auto off = system.offsets();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < system.levels.size(); ++i) {
    const Level& L = system.levels[i];
    for (int t : proj.slots[i]) {
      const Eigen::VectorXd u = L.slot_vector(t);
      P.block(static_cast<Eigen::Index>(off[i]), static_cast<Eigen::Index>(off[i]), L.size(), L.size()).noalias() +=
          u * u.transpose();
    }
  }
  return P;
}

double dense_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= 16 && m.cols() <= 16) return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  // BDCSVD in Eigen 3.4.0 can lose accuracy on sparse structured inputs; the Gram eigenvalue route
  // is accurate for the largest singular value.
  const Eigen::MatrixXd g = m.rows() < m.cols() ? Eigen::MatrixXd(m * m.transpose()) : Eigen::MatrixXd(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace nearcomm
