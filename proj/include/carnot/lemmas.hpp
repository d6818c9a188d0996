#pragma once

// Empirical constants for the distance estimates: product perturbation,
// conjugation, and the norm-equivalence constants C_{1,b} .. C_{4,b} that
// assemble the product-perturbation constant.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carnot/metric.hpp"

namespace carnot {

struct Witness {
  std::vector<std::string> names;
  std::vector<Point> inputs;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ConstantReport {
  std::string lemma;  // product-perturbation | conjugation | norm-equivalence
  std::string name;   // C_b | D | C_{1,b} | C_{2,b} | C_{3,b} | C_{4,b}
  double b = 0.0;
  int N = 0;
  double empirical = 0.0;
  long samples = 0;
  long skipped = 0;           // RHS = 0 with LHS > 0 never occurs; RHS = 0 samples are skipped
  long consistent_zero = 0;   // RHS = 0 and LHS = 0
  long polish_evaluations = 0;
  std::uint64_t seed = 0;
  Witness witness;
};

/// Generic max-ratio search: sharded sampling, then hill-climbing polish of
/// the best candidates. `evaluate` returns (lhs, rhs) on the presented
/// inputs; `project` restores the hypotheses after a perturbation.
struct RatioProblem {
  std::vector<std::string> names;
  std::function<std::vector<Point>(std::mt19937_64&, long index)> sample;
  std::function<void(std::vector<Point>&)> project;
  std::function<std::vector<Point>(const std::vector<Point>&)> present;
  std::function<std::pair<double, double>(const std::vector<Point>&)> evaluate;
};

struct SearchSettings {
  long samples = 10000;
  std::uint64_t seed = 0;
  int polish_candidates = 8;
  int polish_iterations = 400;
  double min_step = 1e-7;
};

ConstantReport maximize_ratio(const HomogeneousNorm& norm, const RatioProblem& problem, const SearchSettings& settings);

/// rho(A_1..A_N, B_1..B_N) / sum_j rho(A_j, B_j)^{1/nu} over tuples with
/// ||B_j..B_N|| <= b and rho(A_j, B_j) <= b.
ConstantReport check_product_perturbation(const HomogeneousNorm& norm, int N, double b, long samples, std::uint64_t seed);

/// d(x^{-1} y x) / (d(y) + d(x)^{1/s} d(y)^{(s-1)/s} + d(x)^{(s-1)/s} d(y)^{1/s}).
ConstantReport check_conjugation_bound(const HomogeneousNorm& norm, long samples, std::uint64_t seed);

/// Empirical C_{1,b}, C_{2,b}, C_{3,b}, C_{4,b} in that order.
std::vector<ConstantReport> norm_equivalence_constants(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed);

/// Individual ratio searches.
ConstantReport empirical_c1(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed);
ConstantReport empirical_c2(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed);
ConstantReport empirical_c3(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed);
ConstantReport empirical_c4(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed);

/// Ratio recomputed from the witness inputs.
double reevaluate_ratio(const HomogeneousNorm& norm, const ConstantReport& report);

/// Closed forms of C_{1,b}, C_{2,b}, C_{3,b} for the max-of-Euclidean ambient norm.
struct AnalyticConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};
AnalyticConstants analytic_constants(const HomogeneousNorm& norm, double b);

/// C_b = max{b^{1-1/nu}, C_{4,B} C_{3,B}^{1/nu}} with B = C_{2,b}.
struct PipelineConstant {
  double b = 0.0;
  double big_b = 0.0;
  double c3 = 0.0;
  double value = 0.0;
  ConstantReport c4;
};
PipelineConstant pipeline_constant(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed);

}  // namespace carnot
