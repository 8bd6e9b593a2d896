#include "nearcomm/spin_core.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace nearcomm {

double d_weight(HalfInt lambda, HalfInt m) {
  if (lambda.two_x < 0) throw std::invalid_argument("d_weight: negative spin");
  if (!compatible(lambda, m)) throw std::invalid_argument("d_weight: parity mismatch");
  if (m.two_x < -lambda.two_x || m.two_x > lambda.two_x)
    throw std::invalid_argument("d_weight: m outside [-lambda, lambda]");
  // (2lambda - 2m)(2lambda + 2m + 2) / 4, evaluated exactly in integers.
  const long long p = lambda.two_x - m.two_x;
  const long long q = lambda.two_x + m.two_x + 2;
  const BigInt prod = BigInt(p) * BigInt(q);
  // p and q are both even, so the product is divisible by 4.
  const BigInt quarter = prod / 4;
  return std::sqrt(static_cast<double>(quarter));
}

IrrepGenerators irrep_generators(const IrrepSpec& spec) {
  if (spec.two_lambda.two_x < 0) throw std::invalid_argument("irrep_generators: negative spin");
  IrrepGenerators g;
  const long long tl = spec.two_lambda.two_x;
  g.diagonal.reserve(static_cast<std::size_t>(tl + 1));
  for (long long tm = -tl; tm <= tl; tm += 2) g.diagonal.push_back(HalfInt{tm});
  for (long long tm = -tl; tm < tl; tm += 2) g.weights.push_back(d_weight(spec.two_lambda, HalfInt{tm}));
  return g;
}

namespace {

BigInt binomial(int n, long long k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (long long j = 1; j <= k; ++j) {
    r *= (n - k + j);
    r /= j;
  }
  return r;
}

}  // namespace

BigInt tensor_multiplicity(int N, HalfInt lambda) {
  if (N < 1) throw std::invalid_argument("tensor_multiplicity: N must be positive");
  if (lambda.two_x < 0) return 0;
  if ((lambda.two_x - N) % 2 != 0) return 0;
  // lambda + N/2 = (two_lambda + N)/2
  const long long k = (lambda.two_x + N) / 2;
  return binomial(N, k) - binomial(N, k + 1);
}

BigInt MultiplicityTable::dimension_sum() const {
  BigInt s = 0;
  for (const auto& [tl, n] : entries) s += n * BigInt(tl + 1);
  return s;
}

BigInt MultiplicityTable::at(long long two_lambda) const {
  auto it = entries.find(two_lambda);
  return it == entries.end() ? BigInt(0) : it->second;
}

MultiplicityTable multiplicity_table(int N) {
  MultiplicityTable t;
  t.N = N;
  if (N < 1) throw std::invalid_argument("multiplicity_table: N must be positive");
  // Walk C(N, k) downward from k = N with C(N, k - 1) = C(N, k) k / (N - k + 1); n at 2 lambda = 2k - N
  // is C(N, k) - C(N, k + 1).
  BigInt above = 0, cur = 1;
  for (long long k = N; 2 * k >= N; --k) {
    BigInt n = cur - above;
    if (n != 0) t.entries.emplace(2 * k - N, std::move(n));
    above = cur;
    cur = cur * k / (N - k + 1);
  }
  return t;
}

double multiplicity_turning_point(int N) {
  if (N < 1) throw std::invalid_argument("multiplicity_turning_point: N must be positive");
  return std::sqrt(static_cast<double>(N) + 2.0) / 2.0 - 1.0;
}

long long turning_point_violations(const MultiplicityTable& table) {
  const long long N = table.N;
  long long bad = 0;
  for (long long tl = N % 2; tl + 2 <= N; tl += 2) {
    const BigInt a = table.at(tl), b = table.at(tl + 2);
    // lambda versus sqrt(N + 2)/2 - 1, compared exactly as (2 lambda + 2)^2 versus N + 2.
    const long long lhs = (tl + 2) * (tl + 2), rhs = N + 2;
    if (lhs < rhs ? !(a < b) : lhs > rhs ? !(a > b) : a != b) ++bad;
  }
  return bad;
}

WeightEstimates weight_estimates(HalfInt lambda, HalfInt mu, HalfInt i, double L, double M, double l,
                                 double C) {
  if (!(std::llabs(i.two_x) <= mu.two_x && mu.two_x <= lambda.two_x))
    throw std::invalid_argument("weight_estimates: need |i| <= mu <= lambda");
  if (!compatible(lambda, i) || !compatible(mu, i))
    throw std::invalid_argument("weight_estimates: parity mismatch");
  if (L < 0 || M < 0 || l <= 0 || C < 0) throw std::invalid_argument("weight_estimates: bad parameters");
  WeightEstimates w;
  const double lam = lambda.value();
  w.d_lambda_i = d_weight(lambda, i);
  w.d_mu_i = d_weight(mu, i);
  w.monotone_cap = lam + 0.5;
  w.edge_bound = std::sqrt(2.0 * lam * (M + 1.0));
  w.edge_applies = (lambda.two_x - std::llabs(i.two_x)) <= 2.0 * M;
  w.gap_bound = std::sqrt(2.0 * lam * L);
  w.combined_bound = std::max(std::sqrt(lam) * 2.0 * L / std::sqrt(l) + C * (lam + 0.5),
                              std::sqrt(2.0 * lam * L) + C * std::sqrt(2.0 * lam * (l + 1.0)));
  w.square_gap_bound = 2.0 * lam * L;
  return w;
}

}  // namespace nearcomm
