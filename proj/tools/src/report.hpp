#pragma once

#include "nearcomm/report.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace nearcomm::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Shared report of every subcommand. nlohmann::json objects keep keys sorted, so dumps are
// deterministic for a fixed configuration.
struct Report {
  std::string subcommand;
  json config = json::object();
  std::uint64_t seed = 0;
  BoundsRecord checks;
  json data = json::object();

  json to_json() const;
};

// FNV-1a over the compact dump of the configuration.
std::string config_hash(const json& config);

json checks_json(const BoundsRecord& record);

// Appends every check of `from` with a name prefix.
void merge_checks(BoundsRecord& into, const BoundsRecord& from, const std::string& prefix);

}  // namespace nearcomm::cli
