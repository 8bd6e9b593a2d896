#pragma once

#include "nearcomm/shift_algebra.hpp"

#include <utility>
#include <vector>

namespace nearcomm {

// Exchange of two orbit tracks over the level window [level_lo, level_hi]. The v track (orbit_v)
// is rotated onto the w track (orbit_w): after the window the chain entering along v continues
// along w and vice versa. Steps N0 = level_hi - level_lo.
struct ExchangePlan {
  int orbit_v = -1;
  int orbit_w = -1;
  int level_lo = 0;
  int level_hi = 0;

  int steps() const { return level_hi - level_lo; }
};

struct PerturbationRecord {
  double measured_norm = 0;        // ||S' - S||
  double bound = 0;                // max_{[i0,i1)} |a_i - b_i| + pi/(2 N0) max(a_i, b_i)
  double commutator_measured = 0;  // ||[S'^*, S']||
  double commutator_bound = 0;     // ||[S^*, S]|| + (1/N0) max_{(i0,i1]} |b_i^2 - a_i^2|
  int level_lo = 0;
  int level_hi = 0;
};

// Applies one exchange in place. The tracks must be untouched (unit slot vectors along the orbit
// coordinates with contiguous chains) on every window level, which also rejects reuse of vectors
// already consumed by another exchange. Weights on the window must be nonnegative.
void apply_exchange(ShiftSystem& system, const ExchangePlan& plan);

// Stated perturbation bounds for a plan evaluated on the unmodified system.
struct ExchangeBounds {
  double norm_bound = 0;
  double commutator_increment = 0;
};
ExchangeBounds exchange_bounds(const ShiftSystem& system, const ExchangePlan& plan);

// Copying variant returning the perturbation record with measured values.
std::pair<ShiftSystem, PerturbationRecord> exchange_two_orbits(const ShiftSystem& system,
                                                               const ExchangePlan& plan);

// One column of the braided schedule: window in relative levels [rel_lo, rel_hi] (1-based, counting
// from the smallest level of the window) and the disjoint position pairs (v, w) exchanged in it.
struct ScheduleColumn {
  int j = 0;
  int rel_lo = 0;
  int rel_hi = 0;
  std::vector<std::pair<int, int>> pairs;  // 1-based track positions, v = w + 1
};

std::vector<ScheduleColumn> braided_schedule(int m, int N0);

}  // namespace nearcomm
