#include "report.hpp"

#include <cstdio>

#ifndef NEARCOMM_VERSION
#define NEARCOMM_VERSION "0.0.0"
#endif

namespace nearcomm::cli {

std::string config_hash(const json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json checks_json(const BoundsRecord& record) {
  json out = json::array();
  for (const BoundCheck& c : record.checks)
    out.push_back({{"name", c.name}, {"stated", c.stated}, {"measured", c.measured}, {"pass", c.pass}});
  return out;
}

void merge_checks(BoundsRecord& into, const BoundsRecord& from, const std::string& prefix) {
  for (BoundCheck c : from.checks) {
    c.name = prefix + c.name;
    into.checks.push_back(std::move(c));
  }
}

json Report::to_json() const {
  return json{{"schema_version", kSchemaVersion},
              {"tool", "nearcomm"},
              {"version", NEARCOMM_VERSION},
              {"subcommand", subcommand},
              {"config", config},
              {"config_hash", config_hash(config)},
              {"seed", seed},
              {"checks", checks_json(checks)},
              {"all_pass", checks.all_pass()},
              {"data", data}};
}

}  // namespace nearcomm::cli
