#include "nearcomm/ogata_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nearcomm {

namespace {

constexpr double kSlack = 1e-12;

std::string spin_text(HalfInt s) {
  return s.is_integer() ? std::to_string(s.two_x / 2) : std::to_string(s.two_x) + "/2";
}

void check_spins(const std::vector<HalfInt>& spins) {
  if (spins.empty()) throw std::invalid_argument("empty spin list");
  for (std::size_t r = 0; r < spins.size(); ++r) {
    if (spins[r].two_x < 0) throw std::invalid_argument("negative spin");
    if (r > 0 && spins[r] < spins[r - 1]) throw std::invalid_argument("spins must be ascending");
    if (!compatible(spins[r], spins.front())) throw std::invalid_argument("spins mix integers and half-integers");
  }
}

std::vector<IrrepSpec> specs(const std::vector<HalfInt>& spins) {
  std::vector<IrrepSpec> v;
  for (HalfInt s : spins) v.push_back(IrrepSpec{s});
  return v;
}

double default_gap(const std::vector<HalfInt>& spins) {
  double L = 0;
  for (std::size_t r = 0; r + 1 < spins.size(); ++r) L = std::max(L, spins[r + 1].value() - spins[r].value());
  return L;
}

long long default_step(double N) { return static_cast<long long>(std::floor(kStepC3 * std::pow(N, 4.0 / 7.0))); }
double default_lambda0(double N) { return 0.5 * std::sqrt(N) + 1.5; }

// Cuts a_k = -Lambda/N + k c_delta, each computed as one correctly rounded quotient of integers so
// that a cut equals a grid eigenvalue exactly when the underlying rationals agree.
WindowPartition snearby_partition(long long two_Lambda, long long N, long long n_delta, int steps) {
  WindowPartition p;
  const double den = 2.0 * static_cast<double>(N) * static_cast<double>(n_delta);
  for (long long k = 0; k <= n_delta; ++k)
    p.cuts.push_back(static_cast<double>(-two_Lambda * n_delta + 2 * two_Lambda * k) / den);
  p.steps.assign(static_cast<std::size_t>(n_delta), steps);
  return p;
}

double dense_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.size() == 0 ? 0.0 : dense_norm(a - b);
}

double dense_commutator(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.size() == 0) return 0.0;
  return dense_norm(x * y - y * x);
}

}  // namespace

SnearbyConstants snearby_constants(const SnearbyParams& p) {
  check_spins(p.spins);
  if (p.N < 1) throw std::invalid_argument("snearby: N must be positive");
  if (!(p.delta > 0) || !(p.ell > 0)) throw std::invalid_argument("snearby: Delta and l must be positive");
  SnearbyConstants c;
  const double N = static_cast<double>(p.N);
  c.m = static_cast<int>(p.spins.size());
  c.Lambda = p.spins.back().value();
  c.lambda1 = p.spins.front().value();
  c.L = p.gap < 0 ? default_gap(p.spins) : p.gap;
  if (default_gap(p.spins) > c.L) throw std::invalid_argument("snearby: a spin gap exceeds L");
  const double nd = N * p.delta;
  if (nd < 4.0) throw std::invalid_argument("snearby: N Delta = " + std::to_string(nd) + " is below 4");
  if (nd > 2.0 * c.Lambda) throw std::invalid_argument("snearby: N Delta exceeds 2 Lambda");
  c.n_delta = static_cast<long long>(std::floor((2.0 * c.Lambda / N) / p.delta));
  if (c.n_delta < 1) throw std::invalid_argument("snearby: no window fits");
  c.c_delta = (2.0 * c.Lambda / N) / static_cast<double>(c.n_delta);
  c.c_delta_cap = 2.0 * c.Lambda / (2.0 * c.Lambda / p.delta - N);
  if (c.m >= 2) {
    c.N0 = p.steps_override > 0 ? p.steps_override
                                : static_cast<int>(std::floor((nd - 5.0) / (2.0 * c.m - 3.0))) - 1;
    if (c.N0 < 2) throw std::invalid_argument("snearby: N0 = " + std::to_string(c.N0) + " is below 2");
  }
  const double Lam = c.Lambda, L = c.L, l = p.ell;
  if (c.m >= 2) {
    const double rot = std::numbers::pi / (2.0 * c.N0);
    c.T = (2.0 + 2.0 * L / c.N0) * Lam / (N * N);
    c.G = std::max(std::sqrt(Lam) * 2.0 * L / std::sqrt(l) + rot * (Lam + 0.5),
                   std::sqrt(2.0 * Lam * L) + rot * std::sqrt(2.0 * Lam * (l + 1.0))) / N;
  }
  c.D = std::max({std::sqrt(2.0 * Lam / N * ((L + 1.0) / N + c.c_delta)), (c.lambda1 + 0.5) / N,
                  c.c_delta / 2.0 + (L + 0.5) / N});
  c.bound12 = std::max(c.G, c.D) + kCubicConstant * std::cbrt((Lam + 0.5) / N) *
                                        std::max(std::cbrt(c.T), std::cbrt(c.D * c.D));
  c.bound3 = c.c_delta;
  return c;
}

SnearbyResult snearby(const SnearbyParams& p) {
  SnearbyResult r;
  r.params = p;
  r.constants = snearby_constants(p);
  const SnearbyConstants& c = r.constants;
  const ShiftSystem system = build_system(specs(p.spins), p.N).second;
  r.gep = gep(system, snearby_partition(p.spins.back().two_x, p.N, c.n_delta, c.N0));
  r.normal = normalize_orbits(r.gep);
  r.distance12 = r.gep.measured_norm + r.normal.distance;
  r.distance3 = r.gep.measured_a;

  double G = 0, D = 0, T = 0;
  for (const GepWindow& w : r.gep.windows) {
    G = std::max(G, w.G);
    D = std::max(D, w.D);
    T = std::max(T, w.T);
  }
  const double N = static_cast<double>(p.N);
  const double comm_cap = std::max(c.T, c.D * c.D);
  BoundsRecord& b = r.bounds;
  if (2.0 * c.Lambda / p.delta > N) b.add("c_delta <= 2 Lambda / (2 Lambda / Delta - N)", c.c_delta_cap, c.c_delta, kSlack);
  b.add("window G <= G", c.G, G, kSlack);
  b.add("window D <= D", c.D, D, kSlack);
  if (c.m >= 2) b.add("||[S*,S]|| + window T <= T", c.T, r.gep.original_comm + T, kSlack);
  b.add("||A' - A|| <= c_delta", c.c_delta, r.distance3, kSlack);
  b.add("||S' - S|| <= max(G, D)", std::max(c.G, c.D), r.gep.measured_norm, kSlack);
  b.add("||[S'*,S']|| <= max(T, D^2)", comm_cap, r.gep.measured_comm, kSlack);
  b.add("||S'' - S'|| <= C ((Lambda+1/2)/N)^(1/3) max(T, D^2)^(1/3)",
        kCubicConstant * std::cbrt((c.Lambda + 0.5) / N) * std::cbrt(comm_cap), r.normal.distance, kSlack);
  b.add("||A_i' - S(sigma_i)|| <= bound (i = 1, 2)", c.bound12, r.distance12, kSlack);
  b.add("||[A', S']|| = 0", 0.0, r.gep.commutator);
  b.add("S'' pieces inside one E_k", 0.0, r.normal.commutes ? 0.0 : 1.0);
  b.add("S'' real", 0.0, r.normal.real ? 0.0 : 1.0);
  return r;
}

std::string to_string(StepCase c) {
  switch (c) {
    case StepCase::small_top: return "small-top";
    case StepCase::below_threshold: return "below-threshold";
    case StepCase::nontrivial: return "nontrivial";
  }
  return "?";
}

double planar_bound(double N) { return kPlanarBound * std::pow(N, -1.0 / 7.0); }
double diagonal_bound(double N) { return kDiagonalBound * std::pow(N, -3.0 / 7.0); }

StepConstants step_constants(double N) {
  StepConstants s;
  s.L = default_step(N);
  s.Lambda0 = default_lambda0(N);
  s.delta = kDeltaC5 * std::pow(N, -3.0 / 7.0);
  s.ell = kEllC4 * std::pow(N, 5.0 / 7.0);

  // Asymptotic estimate evaluated at N_* with gamma_0 = gamma_3 = 4/7, gamma_2 = 1, lower gamma_2 = 6/7,
  // gamma_5 = 3/7, gamma = 1/7, alpha = 1/3 and c_2 = 1/2.
  const double Ns = kThresholdN, c2 = 0.5, c3 = kStepC3, c4 = kEllC4, c5 = kDeltaC5, cl2 = kLowerSpinC2;
  const double g0 = 4.0 / 7, g2 = 1.0, gl2 = 6.0 / 7, g3 = 4.0 / 7, g5 = 3.0 / 7, g = 1.0 / 7, a = 1.0 / 3;
  const double g1 = g2 - g3;
  auto P = [&](double e) { return std::pow(Ns, e); };
  s.c0 = 2 * c3 + 0.5 * P(-1.0 / 14) + 1.5 * P(-4.0 / 7);
  s.c1 = 1.0 / (2 * c3 - 2 * P(-4.0 / 7));
  s.d_delta = c5 * (2 * cl2 / (2 * cl2 - c5 * P(1 - gl2 - g5)));
  s.d0 = (c5 - 5 * P(g5 - 1)) / (2 * s.c1) - 2 * P(g1 + g5 - 1);
  if (!(s.d_delta > 0) || !(s.d0 > 0)) throw std::logic_error("step_constants: d_delta or d_0 not positive");
  s.requirements = 1 < 2 * s.c1 * P(g2 - g3) && 4 * s.c1 * P(g2 - g3 + g5 - 1) + 5 * P(g5 - 1) < c5 &&
                   4 <= c5 * P(1 - g5) && c5 < 2 * cl2 * P(gl2 + g5 - 1);
  const double pi = std::numbers::pi;
  s.G = std::max(2 * c3 * std::sqrt(c2 / c4) * P((2 * g2 + g5 - 3) / 2 + g) +
                     pi / (2 * s.d0) * (c2 + 0.5 * P(-g2)) * P(2 * g2 - g3 + g5 - 2 + g),
                 std::sqrt(2 * c2 * c3) * P((g2 + g3) / 2 - 1 + g) +
                     pi / (2 * s.d0) * std::sqrt(2 * c2 * c4 + 2 * c2 * P(g2 - 2 * g3 + g5 - 1)) *
                         P((2 * g2 + g5 - 3) / 2 + g));
  s.D = std::max({std::sqrt(2 * c2 * c3 * P(g2 + g3 - 2 + 2 * g) + 2 * c2 * P(g2 - 2 + 2 * g) +
                            2 * c2 * s.d_delta * P(g2 - g5 - 1 + 2 * g)),
                  s.c0 * P(g0 - 1 + g) + 0.5 * P(-1 + g),
                  s.d_delta / 2 * P(-g5 + g) + c3 * P(g3 - 1 + g) + 0.5 * P(-1 + g)});
  s.T_alpha = std::pow(2 * c2 * P(g2 - 2 + g / a) + 2 * c2 * c3 / s.d0 * P(2 * g2 + g5 - 3 + g / a), a);
  s.D_2alpha = std::pow(std::max({std::sqrt(2 * c2 * c3 * P(g2 + g3 - 2 + g / a) + 2 * c2 * P(g2 - 2 + g / a) +
                                            2 * c2 * s.d_delta * P(g2 - g5 - 1 + g / a)),
                                  s.c0 * P(g0 - 1 + g / (2 * a)) + 0.5 * P(-1 + g / (2 * a)),
                                  s.d_delta / 2 * P(-g5 + g / (2 * a)) + c3 * P(g3 - 1 + g / (2 * a)) +
                                      0.5 * P(-1 + g / (2 * a))}),
                        2 * a);
  const double C = kCubicConstant * std::cbrt(0.5 + 0.5 / Ns);
  s.planar = std::max(s.G, s.D) + C * std::max(s.T_alpha, s.D_2alpha);
  s.diagonal = s.d_delta;
  s.trivial = 0.5 * std::pow(Ns, 1.0 / 7.0);
  return s;
}

StepCase big_L_step_case(double lambda_top, double N) {
  if (lambda_top < kLowerSpinC2 * std::pow(N, 6.0 / 7.0)) return StepCase::small_top;
  if (N < kThresholdN) return StepCase::below_threshold;
  return StepCase::nontrivial;
}

namespace {

StepResult step_with(const std::vector<HalfInt>& spins, long long N, long long L, double Lambda0) {
  check_spins(spins);
  if (N < 1) throw std::invalid_argument("big_L_step: N must be positive");
  const double Nd = static_cast<double>(N);
  for (std::size_t r = 0; r + 1 < spins.size(); ++r)
    if (spins[r + 1].two_x - spins[r].two_x != 2 * L)
      throw std::invalid_argument("big_L_step: spins must increase by exactly L = " + std::to_string(L));
  if (spins.front().value() > Lambda0 + 2.0 * static_cast<double>(L))
    throw std::invalid_argument("big_L_step: lambda_1 exceeds Lambda0 + 2L");
  if (spins.back().two_x > N) throw std::invalid_argument("big_L_step: lambda_m exceeds N/2");
  StepResult s;
  s.bound12 = planar_bound(Nd);
  s.bound3 = diagonal_bound(Nd);
  s.which = big_L_step_case(spins.back().value(), Nd);
  if (s.which != StepCase::nontrivial) {
    // A_1' = A_2' = 0 and A_3' = S(sigma_3); ||S^lambda(sigma_i)|| = lambda.
    s.distance12 = spins.back().value() / Nd;
    s.distance3 = 0.0;
    return s;
  }
  const StepConstants k = step_constants(Nd);
  if (!k.requirements) throw std::logic_error("big_L_step: constant side conditions fail");
  SnearbyParams p{spins, N, k.delta, k.ell, static_cast<double>(L), 0};
  s.construction = snearby(p);
  s.distance12 = s.construction->distance12;
  s.distance3 = s.construction->distance3;
  return s;
}

}  // namespace

StepResult big_L_step(const std::vector<HalfInt>& spins, long long N) {
  const double Nd = static_cast<double>(N);
  return step_with(spins, N, default_step(Nd), default_lambda0(Nd));
}

PartitionPlan partition_representation(const MultiplicityTable& table, const PartitionOptions& opt) {
  PartitionPlan plan;
  plan.N = table.N;
  const double N = static_cast<double>(std::max(table.N, 1));
  plan.L = opt.L ? *opt.L : default_step(N);
  plan.Lambda0 = opt.Lambda0 ? *opt.Lambda0 : default_lambda0(N);
  if (plan.L < 1) throw std::invalid_argument("partition: L must be at least 1");
  for (const auto& [two, n] : table.entries)
    if (two < 0 || n < 0) throw std::invalid_argument("partition: malformed table entry");

  const double floor_spin = plan.Lambda0 + static_cast<double>(plan.L);  // progressions start above this
  for (int parity = 0; parity < 2; ++parity) {
    long long top = -1;
    for (const auto& [two, n] : table.entries)
      if (two % 2 == parity && n > 0) top = std::max(top, two);
    if (top < 0) continue;
    for (long long j = 0; j < plan.L; ++j) {
      const long long two_K = top - 2 * j;
      if (two_K < 0 || static_cast<double>(two_K) / 2.0 <= floor_spin) continue;
      long long two_1 = two_K;
      while (static_cast<double>(two_1 - 2 * plan.L) / 2.0 > floor_spin) two_1 -= 2 * plan.L;
      std::vector<HalfInt> mu;
      for (long long t = two_1; t <= two_K; t += 2 * plan.L) mu.push_back(HalfInt::from_twice(t));
      std::vector<BigInt> n;
      for (HalfInt s : mu) n.push_back(table.at(s.two_x));
      for (std::size_t r = 1; r < mu.size(); ++r)
        if (n[r - 1] < n[r])
          throw std::invalid_argument("partition: multiplicity of spin " + spin_text(mu[r - 1]) + " (" +
                                      n[r - 1].str() + ") is below that of spin " + spin_text(mu[r]) + " (" +
                                      n[r].str() + ")");
      if (n.back() > 0) plan.patterns.push_back(Pattern{mu, n.back()});
      for (std::size_t r = 1; r < mu.size(); ++r) {
        const BigInt d = n[r - 1] - n[r];
        if (d > 0) plan.patterns.push_back(Pattern{std::vector<HalfInt>(mu.begin(), mu.begin() + static_cast<std::ptrdiff_t>(r)), d});
      }
    }
    for (const auto& [two, n] : table.entries)
      if (two % 2 == parity && n > 0 && static_cast<double>(two) / 2.0 <= floor_spin)
        plan.discarded.emplace_back(HalfInt::from_twice(two), n);
  }
  std::sort(plan.discarded.begin(), plan.discarded.end());
  return plan;
}

MultiplicityTable plan_multiset(const PartitionPlan& plan) {
  MultiplicityTable t;
  t.N = plan.N;
  for (const auto& [s, n] : plan.discarded) t.entries[s.two_x] += n;
  for (const Pattern& p : plan.patterns)
    for (HalfInt s : p.spins) t.entries[s.two_x] += p.multiplicity;
  std::erase_if(t.entries, [](const auto& e) { return e.second == 0; });
  return t;
}

BlockDense block_dense(const BlockResult& block, int N, std::size_t cap) {
  const auto [diag, system] = build_system(specs(block.spins), N);
  BlockDense b;
  for (const Level& L : system.levels)
    for (int c = 0; c < L.size(); ++c) b.layout.emplace_back(L.active[static_cast<std::size_t>(c)], L.two_m);
  const Eigen::MatrixXd S = to_dense(system, cap);
  b.s1 = 0.5 * (S + S.transpose());
  b.is2 = 0.5 * (S - S.transpose());
  b.s3 = to_dense(diag, cap);
  if (!block.construction) {
    b.y1 = Eigen::MatrixXd::Zero(S.rows(), S.cols());
    b.iy2 = Eigen::MatrixXd::Zero(S.rows(), S.cols());
    b.y3 = b.s3;
    return b;
  }
  const SnearbyResult& r = *block.construction;
  const Eigen::MatrixXd Sn = normal_dense(r.gep, r.normal, cap);
  b.y1 = 0.5 * (Sn + Sn.transpose());
  b.iy2 = 0.5 * (Sn - Sn.transpose());
  const Eigen::MatrixXd A = a_prime_dense(r.gep, cap);
  b.y3 = 0.5 * (A + A.transpose());
  return b;
}

OgataResult ogata_construct(int N, const OgataOptions& opt) {
  if (N < 1 || N % 2 == 0) throw std::invalid_argument("ogata_construct: N must be odd and positive (see extend_even)");
  OgataResult res;
  res.N = N;
  const double Nd = N;
  res.bound12 = planar_bound(Nd);
  res.bound3 = diagonal_bound(Nd);
  res.plan = partition_representation(multiplicity_table(N), opt.partition);
  const long long L = res.plan.L;
  const double Lambda0 = res.plan.Lambda0;

  for (const auto& [s, n] : res.plan.discarded) {
    BlockResult b;
    b.spins = {s};
    b.multiplicity = n;
    b.discarded = true;
    b.which = StepCase::small_top;
    b.distance1 = b.distance2 = s.value() / Nd;
    res.blocks.push_back(std::move(b));
  }
  for (const Pattern& p : res.plan.patterns) {
    BlockResult b;
    b.spins = p.spins;
    b.multiplicity = p.multiplicity;
    if (opt.delta && opt.ell) {
      b.which = StepCase::nontrivial;
      try {
        b.construction = snearby(SnearbyParams{p.spins, N, *opt.delta, *opt.ell, static_cast<double>(L), 0});
      } catch (const std::invalid_argument& e) {
        b.which = StepCase::below_threshold;
        b.note = e.what();
      }
    } else {
      StepResult s = step_with(p.spins, N, L, Lambda0);
      b.which = s.which;
      b.construction = std::move(s.construction);
    }
    if (!b.construction) {
      b.distance1 = b.distance2 = p.spins.back().value() / Nd;
      res.blocks.push_back(std::move(b));
      continue;
    }
    const SnearbyResult& c = *b.construction;
    res.real = res.real && c.normal.real;
    std::size_t dim = 0;
    for (HalfInt s : p.spins) dim += static_cast<std::size_t>(s.two_x + 1);
    if (dim <= opt.dense_cap) {
      const BlockDense d = block_dense(b, N, opt.dense_cap);
      b.distance1 = dense_distance(d.y1, d.s1);
      b.distance2 = dense_distance(d.iy2, d.is2);
      b.distance3 = dense_distance(d.y3, d.s3);
      b.commutator = std::max({dense_commutator(d.y1, d.iy2), dense_commutator(d.y1, d.y3),
                               dense_commutator(d.iy2, d.y3)});
    } else {
      b.exact = false;
      b.distance1 = b.distance2 = c.distance12;
      b.distance3 = c.distance3;
      b.commutator = c.normal.commutes && c.gep.commutator == 0.0 ? 0.5 * c.normal.normality_residual
                                                                  : std::numeric_limits<double>::infinity();
    }
    res.blocks.push_back(std::move(b));
  }
  for (const BlockResult& b : res.blocks) {
    res.distance1 = std::max(res.distance1, b.distance1);
    res.distance2 = std::max(res.distance2, b.distance2);
    res.distance3 = std::max(res.distance3, b.distance3);
    res.commutator = std::max(res.commutator, b.commutator);
  }
  return res;
}

OgataBounds ogata_bounds(double N) {
  return OgataBounds{N, planar_bound(N), diagonal_bound(N), kObservableBound * std::pow(N, -1.0 / 7.0)};
}

Eigen::Matrix2cd pauli_matrix(int i) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (i) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 0.5, 0.5, 0; break;
    case 2: m << 0, C(0, 0.5), C(0, -0.5), 0; break;
    case 3: m << -0.5, 0, 0, 0.5; break;
    default: throw std::invalid_argument("pauli_matrix: index must be 0..3");
  }
  return m;
}

PauliCoefficients pauli_coefficients(const Eigen::Matrix2cd& A) {
  // tr(sigma_i sigma_j) = delta_ij / 2 and the sigma_i are traceless.
  PauliCoefficients c;
  for (int i = 1; i <= 3; ++i) c[static_cast<std::size_t>(i - 1)] = 2.0 * (pauli_matrix(i) * A).trace();
  c[3] = A.trace() / 2.0;
  return c;
}

double matrix_norm(const Eigen::Matrix2cd& A) {
  return Eigen::JacobiSVD<Eigen::Matrix2cd>(A).singularValues()(0);
}

Observable assemble_observable(const OgataResult& r, const PauliCoefficients& c) {
  Observable o;
  o.c = c;
  Eigen::Matrix2cd A = c[3] * pauli_matrix(0);
  for (int i = 1; i <= 3; ++i) A += c[static_cast<std::size_t>(i - 1)] * pauli_matrix(i);
  o.norm = matrix_norm(A);
  const double N = r.N;
  o.bound = 2.0 * std::sqrt(2.0 * kPlanarBound * kPlanarBound + kDiagonalBound * kDiagonalBound * std::pow(N, -4.0 / 7.0)) *
            o.norm * std::pow(N, -1.0 / 7.0);
  o.distance_bound = std::abs(c[0]) * r.distance1 + std::abs(c[1]) * r.distance2 + std::abs(c[2]) * r.distance3;
  return o;
}

Eigen::MatrixXcd observable_block(const BlockDense& b, const PauliCoefficients& c) {
  const std::complex<double> minus_i(0, -1);
  Eigen::MatrixXcd Y = c[0] * b.y1.cast<std::complex<double>>() + (c[1] * minus_i) * b.iy2.cast<std::complex<double>>() +
                       c[2] * b.y3.cast<std::complex<double>>();
  Y.diagonal().array() += c[3];
  return Y;
}

EvenExtension extend_even(const OgataResult& r) {
  EvenExtension e;
  e.N = r.N + 1;
  e.scale = static_cast<double>(r.N) / static_cast<double>(r.N + 1);
  const double tail = 0.5 / static_cast<double>(r.N + 1);  // ||sigma_i|| / (N + 1)
  e.bound12 = e.scale * r.bound12 + tail;
  e.bound3 = e.scale * r.bound3 + tail;
  e.distance12 = e.scale * std::max(r.distance1, r.distance2) + tail;
  e.distance3 = e.scale * r.distance3 + tail;
  return e;
}

}  // namespace nearcomm
