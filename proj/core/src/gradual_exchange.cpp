#include "nearcomm/gradual_exchange.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nearcomm {

namespace {

struct TrackSlots {
  std::vector<int> v;  // slot of the v track per window level
  std::vector<int> w;
};

bool is_unit_column(const Eigen::MatrixXd& P, int c) {
  for (Eigen::Index r = 0; r < P.rows(); ++r)
    if (P(r, c) != (r == c ? 1.0 : 0.0)) return false;
  return true;
}

TrackSlots locate_tracks(const ShiftSystem& system, const ExchangePlan& plan) {
  if (plan.orbit_v == plan.orbit_w) throw std::invalid_argument("exchange: identical orbits");
  if (plan.steps() < 2) throw std::invalid_argument("exchange: window needs at least 3 levels");
  if (plan.level_lo < 0 || plan.level_hi >= static_cast<int>(system.levels.size()))
    throw std::invalid_argument("exchange: window outside the level grid");
  TrackSlots ts;
  for (int i = plan.level_lo; i <= plan.level_hi; ++i) {
    const Level& L = system.levels[static_cast<std::size_t>(i)];
    const int cv = L.coordinate_of(plan.orbit_v);
    const int cw = L.coordinate_of(plan.orbit_w);
    if (cv < 0 || cw < 0)
      throw std::invalid_argument("exchange: orbit inactive at window level " + std::to_string(i));
    if (!is_unit_column(L.rotation, cv) || !is_unit_column(L.rotation, cw))
      throw std::invalid_argument("exchange: window level " + std::to_string(i) +
                                  " already used by another exchange");
    ts.v.push_back(cv);
    ts.w.push_back(cw);
  }
  for (int k = 0; k < plan.steps(); ++k) {
    const Level& L = system.levels[static_cast<std::size_t>(plan.level_lo + k)];
    const auto v = static_cast<std::size_t>(ts.v[static_cast<std::size_t>(k)]);
    const auto w = static_cast<std::size_t>(ts.w[static_cast<std::size_t>(k)]);
    if (L.next[v] != ts.v[static_cast<std::size_t>(k + 1)] || L.next[w] != ts.w[static_cast<std::size_t>(k + 1)])
      throw std::invalid_argument("exchange: tracks not contiguous inside the window");
    if (L.weight[v] < 0 || L.weight[w] < 0) throw std::invalid_argument("exchange: negative weight in window");
  }
  return ts;
}

double out_weight(const Level& L, int slot) {
  return L.next[static_cast<std::size_t>(slot)] < 0 ? 0.0 : L.weight[static_cast<std::size_t>(slot)];
}

}  // namespace

ExchangeBounds exchange_bounds(const ShiftSystem& system, const ExchangePlan& plan) {
  const TrackSlots ts = locate_tracks(system, plan);
  const double n0 = plan.steps();
  ExchangeBounds b;
  for (int k = 0; k <= plan.steps(); ++k) {
    const Level& L = system.levels[static_cast<std::size_t>(plan.level_lo + k)];
    const double a = std::abs(out_weight(L, ts.v[static_cast<std::size_t>(k)]));
    const double c = std::abs(out_weight(L, ts.w[static_cast<std::size_t>(k)]));
    if (k < plan.steps()) b.norm_bound = std::max(b.norm_bound, std::abs(a - c) + std::numbers::pi / (2 * n0) * std::max(a, c));
    if (k > 0) b.commutator_increment = std::max(b.commutator_increment, std::abs(c * c - a * a) / n0);
  }
  return b;
}

void apply_exchange(ShiftSystem& system, const ExchangePlan& plan) {
  const TrackSlots ts = locate_tracks(system, plan);
  const int n0 = plan.steps();
  for (int k = 0; k < n0; ++k) {
    Level& L = system.levels[static_cast<std::size_t>(plan.level_lo + k)];
    const int cv = ts.v[static_cast<std::size_t>(k)], cw = ts.w[static_cast<std::size_t>(k)];
    const double s = static_cast<double>(k) / n0;
    const double th = std::numbers::pi / 2 * s;
    const Eigen::VectorXd uv = L.slot_vector(cv), uw = L.slot_vector(cw);
    L.rotation.col(cv) = std::cos(th) * uv + std::sin(th) * uw;
    L.rotation.col(cw) = -std::sin(th) * uv + std::cos(th) * uw;
    L.sign[static_cast<std::size_t>(cv)] = 1;
    L.sign[static_cast<std::size_t>(cw)] = 1;
    const double a = L.weight[static_cast<std::size_t>(cv)], b = L.weight[static_cast<std::size_t>(cw)];
    L.weight[static_cast<std::size_t>(cv)] = std::sqrt((1 - s) * a * a + s * b * b);
    L.weight[static_cast<std::size_t>(cw)] = std::sqrt(s * a * a + (1 - s) * b * b);
  }
  // Last window level: v' = w and w' = -v exactly.
  const std::size_t top = static_cast<std::size_t>(plan.level_hi);
  Level& L = system.levels[top];
  const int cv = ts.v.back(), cw = ts.w.back();
  const auto sv = static_cast<std::size_t>(cv), sw = static_cast<std::size_t>(cw);
  const Eigen::VectorXd uv = L.slot_vector(cv), uw = L.slot_vector(cw);
  const double a = L.weight[sv], b = L.weight[sw];
  const int nv = L.next[sv], nw = L.next[sw];
  L.rotation.col(cv) = uw;
  L.rotation.col(cw) = uv;
  L.sign[sv] = 1;
  L.sign[sw] = -1;
  L.weight[sv] = b;
  L.next[sv] = nw;
  L.weight[sw] = a;
  L.next[sw] = nv;
  // S(-v) = -a v_next: absorb the minus sign by flipping the downstream chain of the old v track.
  int slot = nv;
  for (std::size_t i = top + 1; slot >= 0 && i < system.levels.size(); ++i) {
    Level& U = system.levels[i];
    U.sign[static_cast<std::size_t>(slot)] *= -1;
    slot = U.next[static_cast<std::size_t>(slot)];
  }
}

std::pair<ShiftSystem, PerturbationRecord> exchange_two_orbits(const ShiftSystem& system,
                                                               const ExchangePlan& plan) {
  const ExchangeBounds b = exchange_bounds(system, plan);
  ShiftSystem out = system;
  apply_exchange(out, plan);
  PerturbationRecord rec;
  rec.level_lo = plan.level_lo;
  rec.level_hi = plan.level_hi;
  rec.bound = b.norm_bound;
  rec.measured_norm = superdiagonal_norm(out, system);
  rec.commutator_measured = self_commutator_norm(out);
  rec.commutator_bound = self_commutator_norm(system) + b.commutator_increment;
  return {std::move(out), rec};
}

std::vector<ScheduleColumn> braided_schedule(int m, int N0) {
  if (m < 2) throw std::invalid_argument("braided_schedule: need at least two orbits");
  if (N0 < 1) throw std::invalid_argument("braided_schedule: N0 must be positive");
  std::vector<ScheduleColumn> cols;
  for (int j = 1; j <= 2 * m - 3; ++j) {
    ScheduleColumn c;
    c.j = j;
    c.rel_lo = 3 + (N0 + 1) * (j - 1);
    c.rel_hi = c.rel_lo + N0;
    if (j <= m - 1) {
      for (int e = 0; e < j; e += 2) c.pairs.emplace_back(j + 1 - e, j - e);
    } else {
      for (int e = 0; e < 2 * m - j - 2; e += 2) c.pairs.emplace_back(2 * m - j - 1 - e, 2 * m - j - 2 - e);
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

}  // namespace nearcomm
