#pragma once

#include "report.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nearcomm::cli {

// Parsed command line. Each subcommand reads the fields it needs and echoes them in the report.
struct RunConfig {
  std::string subcommand;

  // Spins and scaling.
  int N = 0;
  double lambda = 0;
  std::vector<double> lambdas;
  std::optional<double> first, step;
  int count = 0;
  bool motivation = false;

  // Construction parameters.
  std::optional<double> delta, ell;
  double gap = -1;
  int steps = 0;
  int width = 0;
  int max_steps = 0;
  std::optional<long long> L;
  std::optional<double> Lambda0;

  // Normalizer.
  std::string profile = "davidson";
  int n = 4096;
  int M = 0;
  double amp = 0.55;
  double sigma = 0;
  int k0 = 8;
  double a = 0.5, b = 0.5;

  // Caps and tolerances.
  std::size_t cap = 1024;
  int tensor_cap = 12;
  double tol = 1e-10;
  std::uint64_t seed = 0;

  bool materialize = false;
  bool verify_tensor = false;

  // plot-data.
  std::string kind = "semicircle";
  std::string format = "json";
  double lambda_from = 5, lambda_to = 100, lambda_step = 5;
};

// Throws std::invalid_argument when a tolerance is not positive or a cap is below 2.
void validate(const RunConfig& c);

Report run_irrep(const RunConfig& c);
Report run_multiplicities(const RunConfig& c);
Report run_berg(const RunConfig& c);
Report run_gel(const RunConfig& c);
Report run_gep(const RunConfig& c);
Report run_snearby(const RunConfig& c);
Report run_ogata(const RunConfig& c);
Report run_verify_tensor(const RunConfig& c);

// Data series only; `data.columns` names the entries of every row in `data.rows`.
Report run_plot_data(const RunConfig& c);
std::string series_csv(const Report& r);

Report run(const RunConfig& c);

}  // namespace nearcomm::cli
