#pragma once

// Maps between graded groups: the map-under-test bundle and graded,
// bracket-compatible linear maps (h-homomorphisms).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "carnot/domain.hpp"
#include "carnot/linalg.hpp"

namespace carnot {

struct MapUnderTest {
  std::string id;
  HomogeneousNorm source;
  HomogeneousNorm target;
  DomainSet domain;
  std::function<Point(const Point&)> eval;
  /// Optional exact evaluator on rational coordinates. When present,
  /// difference quotients are formed without rounding.
  std::function<ExactElement(const ExactElement&)> exact_eval;
  double lipschitz = 0.0;
  bool lipschitz_supplied = false;

  const GradedAlgebra& source_alg() const { return *source.algebra; }
  const GradedAlgebra& target_alg() const { return *target.algebra; }
};

/// Max of rho(f(u), f(v)) / d(u, v) over sampled pairs of A inside B(0, radius),
/// inflated by `inflation`.
double estimate_lipschitz(const MapUnderTest& f, long pairs, std::uint64_t seed, double radius = 2.0,
                          double inflation = 1.5);

class HHom {
 public:
  /// `matrix` has target-dim rows and source-dim columns.
  HHom(AlgebraPtr source, AlgebraPtr target, RationalMatrix matrix);

  const GradedAlgebra& source() const { return *source_; }
  const GradedAlgebra& target() const { return *target_; }
  const AlgebraPtr& source_ptr() const { return source_; }
  const AlgebraPtr& target_ptr() const { return target_; }
  const RationalMatrix& matrix() const { return matrix_; }
  double entry(int row, int col) const { return numeric_[static_cast<std::size_t>(row * cols_ + col)]; }

  Point apply(const Point& x) const;
  ExactElement apply(const ExactElement& x) const;

  /// Block of the matrix mapping source layer `layer` to target layer `layer`.
  std::vector<std::vector<double>> layer_block(int layer) const;

 private:
  AlgebraPtr source_;
  AlgebraPtr target_;
  RationalMatrix matrix_;
  std::vector<double> numeric_;
  int cols_ = 0;
};

/// Relation [e_i, e_j] checked by hhom_from_horizontal.
struct BracketRelation {
  int i = 0;
  int j = 0;
  double residual = 0.0;
  std::string detail;
};

/// Extends a first-layer map (rows: target layer 1, cols: source layer 1)
/// to the unique graded bracket-compatible map. Every pair of source basis
/// vectors is checked; a relation residual above `tolerance` (max-abs over
/// coordinates) throws InconsistentExtension naming the relation.
HHom hhom_from_horizontal(AlgebraPtr source, AlgebraPtr target, const RationalMatrix& first_layer,
                          double tolerance = 0.0);

/// Largest residual of L[e_i, e_j] - [L e_i, L e_j] over all basis pairs and
/// of the grading; empty when the map is an exact h-homomorphism.
std::optional<BracketRelation> hhom_violation(const HHom& L, double tolerance = 0.0);

MapUnderTest hhom_map(const std::string& id, const HHom& L, const HomogeneousNorm& source,
                      const HomogeneousNorm& target);

}  // namespace carnot
