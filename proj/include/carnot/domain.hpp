#pragma once

// Measurable domains A in a source group, described by a structured tag that
// enables closed-form nearest points and emptiness certificates.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carnot/metric.hpp"

namespace carnot {

enum class DomainKind { Full, Halfspace, HoleFamily, ProductMask, Custom };

std::string to_string(DomainKind k);

/// {x : <normal, x> <= offset} in coordinates.
struct HalfspaceSpec {
  std::vector<double> normal;
  double offset = 0.0;
  /// True when the normal is supported on layer 1.
  bool horizontal = false;
};

struct Hole {
  Point center;
  double radius;  // open homogeneous ball B(center, radius)
  int level;
  int anchor;
};

/// Complement of a union of open homogeneous balls. `anchors` are the
/// points the holes accumulate at.
struct HoleFamilySpec {
  std::vector<Hole> holes;
  std::vector<Point> anchors;
  double coeff = 0.0;
  double power = 0.0;
  int level_min = 0;
  int level_max = 0;
};

/// Per-coordinate excluded open intervals.
struct ProductMaskSpec {
  std::vector<std::vector<std::pair<double, double>>> excluded;
};

class DomainSet {
 public:
  static DomainSet full(const HomogeneousNorm& norm);
  static DomainSet halfspace(const HomogeneousNorm& norm, std::vector<double> normal, double offset);
  static DomainSet hole_family(const HomogeneousNorm& norm, HoleFamilySpec spec);
  static DomainSet product_mask(const HomogeneousNorm& norm, ProductMaskSpec spec);
  static DomainSet custom(const HomogeneousNorm& norm, std::string label, std::function<bool(const Point&)> predicate);

  DomainKind kind() const { return kind_; }
  const HomogeneousNorm& norm() const { return norm_; }
  const GradedAlgebra& alg() const { return *norm_.algebra; }
  const std::string& label() const { return label_; }

  bool contains(const Point& x) const;

  const HalfspaceSpec& halfspace_spec() const { return halfspace_; }
  const HoleFamilySpec& hole_spec() const { return holes_; }
  const ProductMaskSpec& mask_spec() const { return mask_; }

  /// Index of a hole containing x, if any.
  std::optional<std::size_t> hole_containing(const Point& x) const;

 private:
  explicit DomainSet(const HomogeneousNorm& norm) : norm_(norm) {}
  DomainKind kind_ = DomainKind::Full;
  HomogeneousNorm norm_;
  std::string label_ = "full";
  HalfspaceSpec halfspace_;
  HoleFamilySpec holes_;
  ProductMaskSpec mask_;
  std::function<bool(const Point&)> predicate_;
};

/// Holes B(a * delta_{2^-k} e, coeff * 2^{-k * power}) for every anchor a
/// and level_min <= k <= level_max. Deterministic from the parameters.
HoleFamilySpec dyadic_hole_family(const HomogeneousNorm& norm, const std::vector<Point>& anchors, const Point& direction,
                                  int level_min, int level_max, double coeff, double power);

/// Anchors on the grid {-extent, ..., extent}^dim with the given spacing.
std::vector<Point> grid_anchors(const GradedAlgebra& alg, double spacing, int per_side);

}  // namespace carnot
