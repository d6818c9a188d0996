#pragma once

// Acceptance suites. Each criterion runs at its stated tolerances and
// reports pass/fail with the measured numbers.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace carnot {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::json data;
};

struct SuiteOptions {
  std::uint64_t seed = 20261015;
};

/// algebra-exact | norm | lemmas | pansu | porosity | domains | all
std::vector<std::string> suite_names();

/// Throws ConfigError for an unknown suite id.
std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& options = {});

/// Individual criteria, numbered 1..10.
CriterionResult criterion_exact_algebra(const SuiteOptions& options);
CriterionResult criterion_norm(const SuiteOptions& options);
CriterionResult criterion_product_perturbation(const SuiteOptions& options);
CriterionResult criterion_conjugation(const SuiteOptions& options);
CriterionResult criterion_pansu(const SuiteOptions& options);
CriterionResult criterion_composition(const SuiteOptions& options);
CriterionResult criterion_dilation(const SuiteOptions& options);
CriterionResult criterion_porosity(const SuiteOptions& options);
CriterionResult criterion_bad_set(const SuiteOptions& options);
CriterionResult criterion_domains(const SuiteOptions& options);

}  // namespace carnot
