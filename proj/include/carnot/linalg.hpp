#pragma once

// Exact dense linear algebra over the rationals. Sizes here are small (at
// most a few hundred), so plain Gaussian elimination is adequate.

#include <optional>
#include <vector>

#include "carnot/rational.hpp"

namespace carnot {

using RationalMatrix = std::vector<std::vector<Rational>>;

struct Echelon {
  RationalMatrix rows;          // reduced row echelon form, zero rows dropped
  std::vector<int> pivots;      // pivot column of each row
};

Echelon row_reduce(RationalMatrix m);

int rank(const RationalMatrix& m);

/// One solution of A x = b, or nullopt if the system is inconsistent.
/// Free variables are set to zero.
std::optional<std::vector<Rational>> solve(const RationalMatrix& a, const std::vector<Rational>& b);

RationalMatrix transpose(const RationalMatrix& m);

}  // namespace carnot
