#include "commands.hpp"

#include "nearcomm/berg_normalizer.hpp"
#include "nearcomm/exchange_process.hpp"
#include "nearcomm/ogata_pipeline.hpp"
#include "nearcomm/shift_algebra.hpp"
#include "nearcomm/spin_core.hpp"
#include "nearcomm/tensor_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nearcomm::cli {

namespace {

HalfInt to_spin(double v, const std::string& what) {
  const double t = 2 * v;
  if (!(v >= 0) || std::abs(t - std::round(t)) > 1e-9)
    throw std::invalid_argument(what + " must be a nonnegative multiple of 1/2");
  return HalfInt::from_twice(std::llround(t));
}

std::vector<HalfInt> spins_from(const RunConfig& c) {
  std::vector<HalfInt> out;
  if (c.motivation) {
    for (int k = 0; k < 7; ++k) out.push_back(HalfInt::from_twice(2 * (1900 + 500 * k)));
    return out;
  }
  if (!c.lambdas.empty()) {
    for (double v : c.lambdas) out.push_back(to_spin(v, "--lambdas"));
    return out;
  }
  if (c.first && c.step && c.count > 0) {
    for (int k = 0; k < c.count; ++k) out.push_back(to_spin(*c.first + *c.step * k, "--first/--step"));
    return out;
  }
  throw std::invalid_argument("give --lambdas, --first/--step/--count or --motivation");
}

long long divisor_from(const RunConfig& c) {
  if (c.motivation && c.N == 0) return 4900;
  if (c.N < 1) throw std::invalid_argument("--N must be positive");
  return c.N;
}

json spins_json(const std::vector<HalfInt>& s) {
  json a = json::array();
  for (HalfInt h : s) a.push_back(h.value());
  return a;
}

std::string big(const BigInt& v) { return v.str(); }

json gep_windows_json(const GepResult& r) {
  json a = json::array();
  for (const GepWindow& w : r.windows)
    a.push_back({{"a", w.a}, {"b", w.b}, {"spanning", w.m}, {"steps", w.steps}, {"G", w.G}, {"D", w.D},
                 {"T", w.T}, {"measured_norm", w.measured_norm}});
  return a;
}

OgataOptions ogata_options(const RunConfig& c) {
  OgataOptions o;
  o.partition.L = c.L;
  o.partition.Lambda0 = c.Lambda0;
  o.delta = c.delta;
  o.ell = c.ell;
  o.dense_cap = c.cap;
  if (o.delta.has_value() != o.ell.has_value())
    throw std::invalid_argument("--delta and --ell must be given together");
  return o;
}

json ogata_json(const OgataResult& r) {
  json patterns = json::array(), discarded = json::array(), blocks = json::array();
  for (const Pattern& p : r.plan.patterns)
    patterns.push_back({{"spins", spins_json(p.spins)}, {"multiplicity", big(p.multiplicity)}});
  for (const auto& [s, n] : r.plan.discarded) discarded.push_back({{"lambda", s.value()}, {"multiplicity", big(n)}});
  for (const BlockResult& b : r.blocks)
    blocks.push_back({{"spins", spins_json(b.spins)},
                      {"multiplicity", big(b.multiplicity)},
                      {"discarded", b.discarded},
                      {"case", to_string(b.which)},
                      {"distance", {b.distance1, b.distance2, b.distance3}},
                      {"exact", b.exact},
                      {"commutator", b.commutator},
                      {"note", b.note}});
  const OgataBounds ob = ogata_bounds(r.N);
  return {{"N", r.N},
          {"L", r.plan.L},
          {"Lambda0", r.plan.Lambda0},
          {"patterns", patterns},
          {"discarded", discarded},
          {"blocks", blocks},
          {"distance", {r.distance1, r.distance2, r.distance3}},
          {"bound12", r.bound12},
          {"bound3", r.bound3},
          {"observable_bound", ob.observable},
          {"commutator", r.commutator},
          {"real", r.real}};
}

void ogata_checks(BoundsRecord& rec, const OgataResult& r) {
  rec.add("||A_1' - S(sigma_1)|| <= 6.286 N^(-1/7)", r.bound12, r.distance1);
  rec.add("||A_2' - S(sigma_2)|| <= 6.286 N^(-1/7)", r.bound12, r.distance2);
  rec.add("||A_3' - S(sigma_3)|| <= 1.083 N^(-3/7)", r.bound3, r.distance3);
  rec.add("max ||[A_i', A_j']||", 1e-12, r.commutator);
  rec.add("A_1', i A_2', A_3' real", 0.0, r.real ? 0.0 : 1.0);
}

void tensor_section(Report& rep, const OgataResult& r, const RunConfig& c, bool with_checks) {
  if (r.N > c.tensor_cap)
    throw std::invalid_argument("--N exceeds the tensor cap " + std::to_string(c.tensor_cap));
  const DecompositionUnitary u = decomposition_unitary(r.N, c.tensor_cap, c.tol);
  const VerificationReport v = verify_full(r, u);
  rep.data["tensor"] = {{"dimension", std::int64_t{1} << r.N},
                        {"distance", {v.distance[0], v.distance[1], v.distance[2]}},
                        {"structured", {v.structured[0], v.structured[1], v.structured[2]}},
                        {"commutator", v.commutator},
                        {"orthogonality", v.orthogonality},
                        {"block_residual", v.block_residual}};
  if (with_checks) merge_checks(rep.checks, v.checks, "tensor: ");
}

}  // namespace

void validate(const RunConfig& c) {
  if (!(c.tol > 0)) throw std::invalid_argument("--tol must be positive");
  if (c.cap < 2) throw std::invalid_argument("--cap must be at least 2");
  if (c.tensor_cap < 2) throw std::invalid_argument("--tensor-cap must be at least 2");
}

Report run_irrep(const RunConfig& c) {
  const HalfInt lam = to_spin(c.lambda, "--lambda");
  Report rep;
  rep.subcommand = "irrep";
  rep.config = {{"lambda", lam.value()}, {"cap", c.cap}};
  const IrrepGenerators g = irrep_generators(IrrepSpec{lam});
  const auto dim = static_cast<std::size_t>(lam.two_x + 1);
  double dmax = 0, comm = 0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double cur = j + 1 < dim ? g.weights[j] : 0.0, prev = j > 0 ? g.weights[j - 1] : 0.0;
    dmax = std::max(dmax, cur);
    comm = std::max(comm, std::abs(cur * cur - prev * prev));
  }
  const double two_l = 2 * lam.value();
  rep.checks.add("max_m d_{lambda,m} <= lambda + 1/2", lam.value() + 0.5, dmax);
  rep.checks.add("| ||[S_+^*, S_+]|| - 2 lambda | (structural)", 1e-9 * (1 + two_l), std::abs(comm - two_l));
  if (dim <= c.cap) {
    const auto n = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n), S3 = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      S3(j, j) = g.diagonal[static_cast<std::size_t>(j)].value();
      if (j + 1 < n) S(j + 1, j) = g.weights[static_cast<std::size_t>(j)];
    }
    const double dense = dense_norm(S.transpose() * S - S * S.transpose());
    rep.checks.add("| ||[S_+^*, S_+]|| - 2 lambda | (dense)", 1e-9 * (1 + two_l), std::abs(dense - two_l));
    rep.checks.add("||[S_3, S_+] - S_+|| (dense)", 1e-12 * (1 + two_l), dense_norm(S3 * S - S * S3 - S));
    rep.data["dense_self_commutator"] = dense;
  }
  rep.data["dimension"] = dim;
  rep.data["self_commutator"] = comm;
  rep.data["max_weight"] = dmax;
  if (dim <= 4097) {
    json m = json::array();
    for (HalfInt h : g.diagonal) m.push_back(h.value());
    rep.data["diagonal"] = m;
    rep.data["weights"] = g.weights;
  }
  return rep;
}

Report run_multiplicities(const RunConfig& c) {
  if (c.N < 1 || c.N > 20000) throw std::invalid_argument("--N must lie in [1, 20000]");
  Report rep;
  rep.subcommand = "multiplicities";
  rep.config = {{"N", c.N}};
  const MultiplicityTable t = multiplicity_table(c.N);
  const BigInt sum = t.dimension_sum(), expect = BigInt(1) << c.N;
  rep.checks.add("sum n_lambda (2 lambda + 1) = 2^N (exact)", 0.0, sum == expect ? 0.0 : 1.0);
  rep.checks.add("turning point trichotomy violations", 0.0, static_cast<double>(turning_point_violations(t)));
  json entries = json::array();
  for (const auto& [tl, n] : t.entries)
    entries.push_back({{"lambda", tl / 2.0}, {"multiplicity", big(n)}});
  rep.data = {{"entries", entries},
              {"turning_point", multiplicity_turning_point(c.N)},
              {"dimension_sum", big(sum)}};
  return rep;
}

Report run_berg(const RunConfig& c) {
  if (c.n < 2 || c.n > (1 << 20)) throw std::invalid_argument("--n must lie in [2, 2^20]");
  if (c.M != 0 && (c.M < 4 || c.M % 2 != 0)) throw std::invalid_argument("--M must be an even integer >= 4");
  Report rep;
  rep.subcommand = "berg";
  rep.seed = c.seed;
  rep.config = {{"profile", c.profile}, {"n", c.n}, {"M", c.M}, {"amp", c.amp}, {"sigma", c.sigma}};
  BilateralShift s;
  if (c.profile == "davidson") {
    s = davidson_profile(c.n, c.amp);
  } else if (c.profile == "random") {
    const double slope = c.M > 0 ? 1.0 / (static_cast<double>(c.M) * c.M * c.M) : 1e-4;
    s = random_smooth_profile(c.n, slope, c.seed);
  } else {
    throw std::invalid_argument("--profile must be davidson or random");
  }
  const double norm = s.norm(), comm = s.self_commutator_norm();
  rep.data = {{"norm", norm}, {"self_commutator", comm}};

  if (c.M > 0) {
    const NormalAssembly a = normalize_shift(s, c.M);
    const double lemma = (norm * std::numbers::pi * c.M / (c.M - 2) + 2) / c.M;
    rep.checks.add("fixed M: normality residual <= 1e-10 ||N||^2", 1e-10 * std::max(1.0, a.norm * a.norm),
                   a.normality_residual);
    rep.checks.add("fixed M: ||N - S|| < (||S|| pi M/(M-2) + 2)/M", lemma, a.distance);
    rep.checks.add("fixed M: real input gives real output", 0.0, s.is_real() && !assembly_is_real(a) ? 1.0 : 0.0);
    rep.data["fixed_M"] = {{"branch", a.branch}, {"distance", a.distance}, {"bound", lemma}, {"surgeries", a.surgeries}};
  }
  const BergResult w = nearest_normal(s);
  rep.checks.add("||N - S|| <= 5.3308 ||S||^(1/3) ||[S^*,S]||^(1/3)", w.bound, w.assembly.distance);
  rep.checks.add("normality residual <= 1e-10 ||N||^2", 1e-10 * std::max(1.0, w.assembly.norm * w.assembly.norm),
                 w.assembly.normality_residual);
  rep.checks.add("real input gives real output", 0.0, s.is_real() && !assembly_is_real(w.assembly) ? 1.0 : 0.0);
  rep.data["cubic"] = {{"M", w.M}, {"branch", w.assembly.branch}, {"distance", w.assembly.distance}, {"bound", w.bound}};
  if (c.sigma > 0) {
    const BergResult v = nearest_normal_sigma(s, c.sigma);
    rep.checks.add("||N - S|| <= 4.8573 sqrt(||S||/sigma) ||[S^*,S]||^(1/2)", v.bound, v.assembly.distance);
    rep.data["sigma"] = {{"M", v.M}, {"branch", v.assembly.branch}, {"distance", v.assembly.distance}, {"bound", v.bound}};
  }
  return rep;
}

Report run_gel(const RunConfig& c) {
  Report rep;
  rep.subcommand = "gel";
  rep.config = {{"k0", c.k0}, {"a", c.a}, {"b", c.b}};
  const GelRotation g = gel_for_normal(c.k0, c.b, c.a);
  const auto k0 = static_cast<std::size_t>(c.k0);
  const bool ends = g.alpha[0] == 1.0 && g.beta[0] == 0.0 && g.alpha[k0] == 0.0 && g.beta[k0] == 1.0;
  rep.checks.add("||S' - S|| <= |b - a| + |b| pi/(2 k0)", g.bound, g.measured_norm);
  rep.checks.add("rotation endpoints exact", 0.0, ends ? 0.0 : 1.0);
  rep.data = {{"measured_norm", g.measured_norm}, {"bound", g.bound}, {"alpha", g.alpha}, {"beta", g.beta}};
  return rep;
}

Report run_gep(const RunConfig& c) {
  const std::vector<HalfInt> spins = spins_from(c);
  const long long N = divisor_from(c);
  const int width = c.width > 0 ? c.width : c.motivation ? 99 : 0;
  if (width < 1) throw std::invalid_argument("--width must be positive");
  Report rep;
  rep.subcommand = "gep";
  rep.config = {{"spins", spins_json(spins)}, {"N", N}, {"width", width}, {"max_steps", c.max_steps}, {"cap", c.cap}};
  std::vector<IrrepSpec> specs;
  for (HalfInt h : spins) specs.push_back(IrrepSpec{h});
  const ShiftSystem s = build_system(specs, N).second;
  const GepResult r = gep(s, uniform_partition(s, width, c.max_steps));
  const NormalizedOrbits n = normalize_orbits(r);
  rep.checks.add("[A', S'] = 0 (structural)", 1e-12, r.commutator);
  rep.checks.add("||A' - A|| <= max diam I_k", r.max_diam, r.measured_a, 1e-15);
  rep.checks.add("||S' - S|| <= max(G, D)", r.stated_norm, r.measured_norm, 1e-14);
  rep.checks.add("||[S'^*, S']|| <= max(||[S^*,S]|| + T, D^2)", r.stated_comm, r.measured_comm, 1e-14);
  rep.checks.add("||S'' - S'|| <= 5.3308 ||S||^(1/3) ||[S'^*,S']||^(1/3)", n.bound, n.distance, 1e-15);
  rep.checks.add("S'' normality residual", 1e-10, n.normality_residual);
  rep.checks.add("S'' pieces inside eigenspaces of A'", 0.0, n.commutes ? 0.0 : 1.0);
  rep.checks.add("S'' real", 0.0, n.real ? 0.0 : 1.0);
  const bool dense = s.dimension() <= c.cap;
  if (dense) {
    const Eigen::MatrixXd Ap = a_prime_dense(r, c.cap), Sp = to_dense(r.shifted, c.cap);
    const Eigen::MatrixXd Spp = normal_dense(r, n, c.cap);
    rep.checks.add("||[A', S']|| (dense)", 1e-12, dense_norm(Ap * Sp - Sp * Ap));
    rep.checks.add("||[A', S'']|| (dense)", 1e-12, dense_norm(Ap * Spp - Spp * Ap));
  }
  rep.data = {{"dimension", s.dimension()},
              {"dense", dense},
              {"windows", gep_windows_json(r)},
              {"max_diam", r.max_diam},
              {"measured_a", r.measured_a},
              {"measured_norm", r.measured_norm},
              {"stated_norm", r.stated_norm},
              {"measured_comm", r.measured_comm},
              {"stated_comm", r.stated_comm},
              {"original_comm", r.original_comm},
              {"normal_distance", n.distance},
              {"normal_bound", n.bound}};
  return rep;
}

Report run_snearby(const RunConfig& c) {
  if (!c.delta || !c.ell) throw std::invalid_argument("--delta and --ell are required");
  SnearbyParams p;
  p.spins = spins_from(c);
  p.N = divisor_from(c);
  p.delta = *c.delta;
  p.ell = *c.ell;
  p.gap = c.gap;
  p.steps_override = c.steps;
  Report rep;
  rep.subcommand = "snearby";
  rep.config = {{"spins", spins_json(p.spins)}, {"N", p.N}, {"delta", p.delta}, {"ell", p.ell},
                {"gap", p.gap}, {"steps", p.steps_override}};
  const SnearbyResult r = snearby(p);
  rep.checks = r.bounds;
  const SnearbyConstants& k = r.constants;
  rep.data = {{"m", k.m},
              {"Lambda", k.Lambda},
              {"lambda1", k.lambda1},
              {"L", k.L},
              {"n_delta", k.n_delta},
              {"c_delta", k.c_delta},
              {"N0", k.N0},
              {"T", k.T},
              {"G", k.G},
              {"D", k.D},
              {"bound12", k.bound12},
              {"bound3", k.bound3},
              {"distance12", r.distance12},
              {"distance3", r.distance3},
              {"windows", gep_windows_json(r.gep)}};
  return rep;
}

Report run_ogata(const RunConfig& c) {
  Report rep;
  rep.subcommand = "ogata";
  const OgataOptions o = ogata_options(c);
  rep.config = {{"N", c.N}, {"materialize", c.materialize}, {"verify_tensor", c.verify_tensor}, {"cap", c.cap},
                {"tensor_cap", c.tensor_cap}, {"tol", c.tol}};
  if (c.L) rep.config["L"] = *c.L;
  if (c.Lambda0) rep.config["Lambda0"] = *c.Lambda0;
  if (c.delta) rep.config["delta"] = *c.delta;
  if (c.ell) rep.config["ell"] = *c.ell;
  const OgataResult r = ogata_construct(c.N, o);
  ogata_checks(rep.checks, r);
  rep.data = ogata_json(r);
  if (c.materialize || c.verify_tensor) tensor_section(rep, r, c, c.verify_tensor);
  return rep;
}

Report run_verify_tensor(const RunConfig& c) {
  Report rep;
  rep.subcommand = "verify-tensor";
  const OgataOptions o = ogata_options(c);
  rep.config = {{"N", c.N}, {"tensor_cap", c.tensor_cap}, {"tol", c.tol}};
  if (c.L) rep.config["L"] = *c.L;
  if (c.Lambda0) rep.config["Lambda0"] = *c.Lambda0;
  if (c.delta) rep.config["delta"] = *c.delta;
  if (c.ell) rep.config["ell"] = *c.ell;
  if (c.N > c.tensor_cap) throw std::invalid_argument("--N exceeds the tensor cap " + std::to_string(c.tensor_cap));
  const OgataResult r = ogata_construct(c.N, o);
  rep.data = ogata_json(r);
  tensor_section(rep, r, c, true);
  return rep;
}

Report run_plot_data(const RunConfig& c) {
  Report rep;
  rep.subcommand = "plot-data";
  json rows = json::array();
  if (c.kind == "semicircle") {
    if (!(c.lambda_step > 0) || c.lambda_to < c.lambda_from) throw std::invalid_argument("bad lambda range");
    rep.config = {{"kind", c.kind}, {"lambda_from", c.lambda_from}, {"lambda_to", c.lambda_to},
                  {"lambda_step", c.lambda_step}};
    const long long count = std::llround(std::floor((c.lambda_to - c.lambda_from) / c.lambda_step + 1e-9)) + 1;
    if (count > 10000) throw std::invalid_argument("too many series");
    for (long long k = 0; k < count; ++k) {
      const HalfInt lam = to_spin(c.lambda_from + c.lambda_step * static_cast<double>(k), "lambda");
      if (lam.two_x > 20000) throw std::invalid_argument("lambda exceeds 10000");
      for (long long tm = -lam.two_x; tm < lam.two_x; tm += 2) {
        const HalfInt m = HalfInt::from_twice(tm);
        rows.push_back({lam.value(), m.value(), d_weight(lam, m)});
      }
    }
    rep.data["columns"] = {"lambda", "i", "d"};
  } else if (c.kind == "multiplicity") {
    if (c.N < 1 || c.N > 20000) throw std::invalid_argument("--N must lie in [1, 20000]");
    rep.config = {{"kind", c.kind}, {"N", c.N}};
    for (const auto& [tl, n] : multiplicity_table(c.N).entries) {
      const std::string digits = big(n);
      const std::size_t k = std::min<std::size_t>(digits.size(), 15);
      const double l10 = std::log10(std::stod(digits.substr(0, k))) + static_cast<double>(digits.size() - k);
      rows.push_back({tl / 2.0, digits, l10});
    }
    rep.data["columns"] = {"lambda", "multiplicity", "log10_multiplicity"};
    rep.data["turning_point"] = multiplicity_turning_point(c.N);
  } else if (c.kind == "shift-diagram") {
    const std::vector<HalfInt> spins = spins_from(c);
    const long long N = divisor_from(c);
    const int width = c.width > 0 ? c.width : c.motivation ? 99 : 0;
    if (width < 1) throw std::invalid_argument("--width must be positive");
    rep.config = {{"kind", c.kind}, {"spins", spins_json(spins)}, {"N", N}, {"width", width}, {"max_steps", c.max_steps}};
    std::vector<IrrepSpec> specs;
    for (HalfInt h : spins) specs.push_back(IrrepSpec{h});
    const ShiftSystem s = build_system(specs, N).second;
    const GepResult r = gep(s, uniform_partition(s, width, c.max_steps));
    const std::vector<Chain> ch = chains(r.shifted);
    for (std::size_t id = 0; id < ch.size(); ++id)
      for (std::size_t j = 0; j < ch[id].nodes.size(); ++j) {
        const auto [level, slot] = ch[id].nodes[j];
        const double w = j < ch[id].weights.size() ? ch[id].weights[j] : 0.0;
        rows.push_back({r.shifted.eigenvalue(level), slot, w, id,
                        r.e_index[static_cast<std::size_t>(level)][static_cast<std::size_t>(slot)]});
      }
    rep.data["columns"] = {"x", "y", "weight", "orbit_id", "window_id"};
    rep.data["cuts"] = r.cuts;
  } else {
    throw std::invalid_argument("--kind must be semicircle, multiplicity or shift-diagram");
  }
  rep.data["rows"] = rows;
  rep.data["format"] = c.format;
  return rep;
}

std::string series_csv(const Report& r) {
  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << " subcommand=" << r.subcommand
     << " config_hash=" << config_hash(r.config) << "\n";
  const json& cols = r.data.at("columns");
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i].get<std::string>();
  os << "\n";
  for (const json& row : r.data.at("rows")) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << (row[i].is_string() ? row[i].get<std::string>() : row[i].dump());
    os << "\n";
  }
  return os.str();
}

Report run(const RunConfig& c) {
  validate(c);
  if (c.subcommand == "irrep") return run_irrep(c);
  if (c.subcommand == "multiplicities") return run_multiplicities(c);
  if (c.subcommand == "berg") return run_berg(c);
  if (c.subcommand == "gel") return run_gel(c);
  if (c.subcommand == "gep") return run_gep(c);
  if (c.subcommand == "snearby") return run_snearby(c);
  if (c.subcommand == "ogata") return run_ogata(c);
  if (c.subcommand == "verify-tensor") return run_verify_tensor(c);
  if (c.subcommand == "plot-data") return run_plot_data(c);
  throw std::invalid_argument("unknown subcommand " + c.subcommand);
}

}  // namespace nearcomm::cli
