#pragma once

#include <string>
#include <vector>

namespace nearcomm {

// A named inequality measured <= stated (or an exact comparison when stated is the tolerance).
struct BoundCheck {
  std::string name;
  double stated = 0;
  double measured = 0;
  bool pass = false;
};

struct BoundsRecord {
  std::vector<BoundCheck> checks;

  void add(std::string name, double stated, double measured, double slack = 0.0) {
    checks.push_back({std::move(name), stated, measured, measured <= stated + slack});
  }
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

}  // namespace nearcomm
