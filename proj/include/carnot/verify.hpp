#pragma once

#include <string>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

struct Violation {
  std::string check;  // antisymmetry | jacobi | grading | nilpotency | stratification
  int i = -1;
  int j = -1;
  int k = -1;
  std::string detail;
};

struct VerifyReport {
  bool antisymmetry = true;
  bool jacobi = true;
  bool grading = true;
  bool nilpotent = true;
  /// Rank condition [V_1, V_j] = V_{j+1}, evaluated whether or not the
  /// algebra is flagged as stratified.
  bool rank_condition = true;
  bool stratified_flag = false;
  std::vector<Violation> violations;
  /// Violations beyond the listing limit are counted but not stored.
  long unlisted = 0;

  bool passed() const {
    return antisymmetry && jacobi && grading && nilpotent && (!stratified_flag || rank_condition);
  }
};

inline constexpr std::size_t kMaxListedViolations = 1000;

/// Exact checks; never throws on a bad table.
VerifyReport verify_algebra(const GradedAlgebra& alg);

}  // namespace carnot
