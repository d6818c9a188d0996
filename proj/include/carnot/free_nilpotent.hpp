#pragma once

#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

inline constexpr int kDefaultDimensionCap = 200;

/// Witt formula: dimension of the degree-d component of the free Lie algebra
/// on `rank` generators, for d = 1..step.
std::vector<long> witt_dimensions(int rank, int step);

/// Free nilpotent Lie algebra of the given rank and step in a Hall basis.
/// Rank 1 gives the abelian line regardless of the requested step.
AlgebraPtr build_free_nilpotent(int rank, int step, int dimension_cap = kDefaultDimensionCap);

}  // namespace carnot
