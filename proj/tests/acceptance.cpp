// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero when any fails.

#include <chrono>
#include <cstdio>

#include "carnot/suites.hpp"

int main() {
  using namespace carnot;
  using Criterion = CriterionResult (*)(const SuiteOptions&);
  const Criterion criteria[] = {criterion_exact_algebra, criterion_norm,     criterion_product_perturbation,
                                criterion_conjugation,   criterion_pansu,    criterion_composition,
                                criterion_dilation,      criterion_porosity, criterion_bad_set,
                                criterion_domains};
  const SuiteOptions options;
  int failed = 0;
  for (Criterion criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const CriterionResult r = criterion(options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
