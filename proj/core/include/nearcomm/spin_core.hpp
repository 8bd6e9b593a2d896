#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <map>
#include <vector>

namespace nearcomm {

using BigInt = boost::multiprecision::cpp_int;

// Half-integer stored as its double: value = two_x / 2.
struct HalfInt {
  long long two_x = 0;

  static constexpr HalfInt from_twice(long long t) { return HalfInt{t}; }
  static constexpr HalfInt from_int(long long v) { return HalfInt{2 * v}; }
  constexpr double value() const { return static_cast<double>(two_x) / 2.0; }
  constexpr bool is_integer() const { return two_x % 2 == 0; }
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;
};

// Two labels are compatible when their difference is an integer.
constexpr bool compatible(HalfInt a, HalfInt b) { return (a.two_x - b.two_x) % 2 == 0; }

struct IrrepSpec {
  HalfInt two_lambda;
  long long dimension() const { return two_lambda.two_x + 1; }
};

// d_{lambda,m} = sqrt((lambda - m)(lambda + m + 1)); m == lambda gives 0.
double d_weight(HalfInt lambda, HalfInt m);

struct IrrepGenerators {
  std::vector<HalfInt> diagonal;  // -lambda .. lambda
  std::vector<double> weights;    // d_{lambda,-lambda} .. d_{lambda,lambda-1}
};

IrrepGenerators irrep_generators(const IrrepSpec& spec);

// Multiplicity of S^lambda inside the N-fold tensor power of S^{1/2}.
BigInt tensor_multiplicity(int N, HalfInt lambda);

struct MultiplicityTable {
  int N = 0;
  std::map<long long, BigInt> entries;  // two_lambda -> multiplicity (nonzero only)

  BigInt dimension_sum() const;
  BigInt at(long long two_lambda) const;
};

MultiplicityTable multiplicity_table(int N);

double multiplicity_turning_point(int N);

// Number of consecutive pairs (lambda, lambda + 1) breaking the exact trichotomy around the turning
// point: n_lambda < n_{lambda+1} below it, equal at it, n_lambda > n_{lambda+1} above it.
long long turning_point_violations(const MultiplicityTable& table);

// Right-hand sides of the weight inequalities for |i| <= mu <= lambda.
struct WeightEstimates {
  double d_lambda_i = 0;        // measured d_{lambda,i}
  double d_mu_i = 0;            // measured d_{mu,i}
  double monotone_cap = 0;      // (i): lambda + 1/2
  double edge_bound = 0;        // (ii): sqrt(2 lambda (M + 1)), valid when lambda - |i| <= M
  double gap_bound = 0;         // (iii): sqrt(2 lambda L)
  double combined_bound = 0;    // (iv): max(sqrt(lambda) 2L/sqrt(l) + C(lambda+1/2), sqrt(2 lambda L) + C sqrt(2 lambda (l+1)))
  double square_gap_bound = 0;  // (v): 2 lambda L
  bool edge_applies = false;    // lambda - |i| <= M
};

WeightEstimates weight_estimates(HalfInt lambda, HalfInt mu, HalfInt i, double L, double M, double l,
                                 double C);

}  // namespace nearcomm
