#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace {

using nearcomm::cli::json;
using nearcomm::cli::Report;
using nearcomm::cli::RunConfig;

constexpr int kExitFail = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitUsage = 64;

struct OutputOptions {
  bool json = false;
  std::string out;
};

void diagnostic(const std::string& subcommand, const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"schema_version", nearcomm::cli::kSchemaVersion},
                    {"subcommand", subcommand},
                    {"error", kind},
                    {"message", message},
                    {"exit_code", code}}
                   .dump()
            << "\n";
}

std::string default_path(const Report& r, const std::string& ext) {
  const char* dir = std::getenv("NEARCOMM_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  return (std::filesystem::path(dir) / (r.subcommand + ext)).string();
}

int emit(const Report& r, const RunConfig& c, const OutputOptions& o) {
  const bool csv = r.subcommand == "plot-data" && c.format == "csv";
  const std::string text = csv ? nearcomm::cli::series_csv(r) : r.to_json().dump(2) + "\n";
  const std::string path = o.out.empty() ? default_path(r, csv ? ".csv" : ".json") : o.out;
  if (!path.empty()) {
    std::ofstream f(path, std::ios::binary);
    if (!(f << text)) {
      diagnostic(r.subcommand, "io", "cannot write " + path, kExitPrecondition);
      return kExitPrecondition;
    }
  }
  if (o.json || r.subcommand == "plot-data") {
    if (path.empty() || o.json) std::cout << text;
  } else {
    for (const auto& ch : r.checks.checks)
      std::cout << (ch.pass ? "PASS  " : "FAIL  ") << ch.name << ": measured " << ch.measured << ", stated "
                << ch.stated << "\n";
    std::cout << (r.checks.all_pass() ? "all checks pass" : "some checks fail") << "\n";
  }
  return r.checks.all_pass() ? 0 : kExitFail;
}

// Options shared by the subcommands that take a spin list.
void spin_list_options(CLI::App* s, RunConfig& c) {
  s->add_option("--lambdas", c.lambdas, "Spins lambda_1 <= ... <= lambda_m (multiples of 1/2)")->delimiter(',');
  s->add_option("--first", c.first, "First spin of an arithmetic progression");
  s->add_option("--step", c.step, "Step of the progression");
  s->add_option("--count", c.count, "Number of spins in the progression");
  s->add_option("--N", c.N, "Scaling divisor N");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Almost commuting matrices: constructions, bounds and verification reports", "nearcomm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NEARCOMM_VERSION);
  RunConfig c;
  OutputOptions o;

  auto common = [&](CLI::App* s) {
    s->add_flag("--json", o.json, "Print the JSON report on stdout");
    s->add_option("--out", o.out, "Write the report to this file (default: $NEARCOMM_OUTPUT_DIR/<subcommand>.json)");
    s->add_option("--cap", c.cap, "Largest dense dimension for oracle checks");
    s->add_option("--tol", c.tol, "Residual tolerance");
    s->add_option("--seed", c.seed, "Seed for randomized inputs");
  };

  auto* irrep = app.add_subcommand("irrep", "Generators of S^lambda and their weight identities");
  irrep->add_option("--lambda", c.lambda, "Spin lambda")->required();
  common(irrep);

  auto* mult = app.add_subcommand("multiplicities", "Multiplicity table of the N-fold tensor power of S^(1/2)");
  mult->add_option("--N", c.N, "Number of sites")->required();
  common(mult);

  auto* berg = app.add_subcommand("berg", "Nearest normal operator to an almost-normal bilateral weighted shift");
  berg->add_option("--profile", c.profile, "davidson or random");
  berg->add_option("--n", c.n, "Dimension");
  berg->add_option("--M", c.M, "Even grid parameter for the direct construction (0: wrapper only)");
  berg->add_option("--amp", c.amp, "Amplitude of the davidson profile");
  berg->add_option("--sigma", c.sigma, "Also run the sigma variant with this lower modulus bound");
  common(berg);

  auto* gel = app.add_subcommand("gel", "Gradual exchange of two constant runs");
  gel->add_option("--k0", c.k0, "Number of rotation steps");
  gel->add_option("--a", c.a, "Weight a");
  gel->add_option("--b", c.b, "Weight b");
  common(gel);

  auto* gep = app.add_subcommand("gep", "Gradual exchange process on a direct sum of irreducible shifts");
  spin_list_options(gep, c);
  gep->add_flag("--motivation", c.motivation, "Use lambda = 1900..4900 step 500, N = 4900, width 99");
  gep->add_option("--width", c.width, "Window width in levels");
  gep->add_option("--max-steps", c.max_steps, "Cap on N_k per window");
  common(gep);

  auto* sn = app.add_subcommand("snearby", "Commuting approximants for one spin progression");
  spin_list_options(sn, c);
  sn->add_flag("--motivation", c.motivation, "Use lambda = 1900..4900 step 500, N = 4900");
  sn->add_option("--delta", c.delta, "Window size Delta")->required();
  sn->add_option("--ell", c.ell, "Edge parameter l")->required();
  sn->add_option("--gap", c.gap, "Gap L (default: largest consecutive gap)");
  sn->add_option("--steps", c.steps, "Override of the step count N0");
  common(sn);

  auto ogata_options = [&](CLI::App* s) {
    s->add_option("--N", c.N, "Odd number of sites")->required();
    s->add_option("--L", c.L, "Override of the pattern step L");
    s->add_option("--Lambda0", c.Lambda0, "Override of the discard threshold Lambda0");
    s->add_option("--delta", c.delta, "Override Delta for every pattern (with --ell)");
    s->add_option("--ell", c.ell, "Override l for every pattern (with --delta)");
    s->add_option("--tensor-cap", c.tensor_cap, "Largest N for 2^N dense matrices");
    common(s);
  };
  auto* og = app.add_subcommand("ogata", "Commuting approximants of the macroscopic observables");
  ogata_options(og);
  og->add_flag("--materialize", c.materialize, "Build the 2^N dense matrices and report dense distances");
  og->add_flag("--verify-tensor", c.verify_tensor, "Also add the full dense verification checks");

  auto* vt = app.add_subcommand("verify-tensor", "Dense end-to-end verification for small N");
  ogata_options(vt);

  auto* pd = app.add_subcommand("plot-data", "Data series for the figures (no rendering)");
  pd->add_option("--kind", c.kind, "semicircle, multiplicity or shift-diagram");
  pd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  pd->add_option("--lambda-from", c.lambda_from, "First spin (semicircle)");
  pd->add_option("--lambda-to", c.lambda_to, "Last spin (semicircle)");
  pd->add_option("--lambda-step", c.lambda_step, "Spin step (semicircle)");
  spin_list_options(pd, c);
  pd->add_flag("--motivation", c.motivation, "Shift diagram of lambda = 1900..4900 step 500, N = 4900");
  pd->add_option("--width", c.width, "Window width in levels (shift-diagram)");
  pd->add_option("--max-steps", c.max_steps, "Cap on N_k per window (shift-diagram)");
  common(pd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  c.subcommand = app.get_subcommands().front()->get_name();
  try {
    return emit(nearcomm::cli::run(c), c, o);
  } catch (const std::logic_error& e) {
    diagnostic(c.subcommand, "precondition", e.what(), kExitPrecondition);
    return kExitPrecondition;
  } catch (const std::exception& e) {
    diagnostic(c.subcommand, "failure", e.what(), kExitFail);
    return kExitFail;
  }
}
