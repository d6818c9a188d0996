#include "carnot/domain.hpp"

#include <cmath>

namespace carnot {

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Full: return "full";
    case DomainKind::Halfspace: return "halfspace";
    case DomainKind::HoleFamily: return "ball_complement_family";
    case DomainKind::ProductMask: return "product_mask";
    case DomainKind::Custom: return "custom";
  }
  return "custom";
}

DomainSet DomainSet::full(const HomogeneousNorm& norm) { return DomainSet(norm); }

DomainSet DomainSet::halfspace(const HomogeneousNorm& norm, std::vector<double> normal, double offset) {
  const auto& alg = *norm.algebra;
  if (static_cast<int>(normal.size()) != alg.dim()) {
    throw InvalidArgument("halfspace normal needs " + std::to_string(alg.dim()) + " entries");
  }
  bool nonzero = false;
  bool horizontal = true;
  for (int i = 0; i < alg.dim(); ++i) {
    if (normal[static_cast<std::size_t>(i)] != 0.0) {
      nonzero = true;
      if (alg.layer_of(i) != 1) horizontal = false;
    }
  }
  if (!nonzero) throw InvalidArgument("halfspace normal must be nonzero");
  DomainSet d(norm);
  d.kind_ = DomainKind::Halfspace;
  d.halfspace_ = {std::move(normal), offset, horizontal};
  d.label_ = "halfspace";
  return d;
}

DomainSet DomainSet::hole_family(const HomogeneousNorm& norm, HoleFamilySpec spec) {
  for (const auto& h : spec.holes) {
    if (h.center.algebra_ptr() != norm.algebra.get()) throw AlgebraMismatch("hole center from another algebra");
    if (!(h.radius > 0.0)) throw InvalidArgument("hole radii must be positive");
  }
  DomainSet d(norm);
  d.kind_ = DomainKind::HoleFamily;
  d.holes_ = std::move(spec);
  d.label_ = "ball_complement_family";
  return d;
}

DomainSet DomainSet::product_mask(const HomogeneousNorm& norm, ProductMaskSpec spec) {
  if (static_cast<int>(spec.excluded.size()) > norm.algebra->dim()) throw InvalidArgument("mask has more coordinates than the algebra");
  spec.excluded.resize(static_cast<std::size_t>(norm.algebra->dim()));
  for (const auto& list : spec.excluded) {
    for (const auto& [lo, hi] : list) {
      if (!(lo < hi)) throw InvalidArgument("mask intervals need lo < hi");
    }
  }
  DomainSet d(norm);
  d.kind_ = DomainKind::ProductMask;
  d.mask_ = std::move(spec);
  d.label_ = "product_mask";
  return d;
}

DomainSet DomainSet::custom(const HomogeneousNorm& norm, std::string label, std::function<bool(const Point&)> predicate) {
  if (!predicate) throw InvalidArgument("custom domain needs a predicate");
  DomainSet d(norm);
  d.kind_ = DomainKind::Custom;
  d.label_ = std::move(label);
  d.predicate_ = std::move(predicate);
  return d;
}

std::optional<std::size_t> DomainSet::hole_containing(const Point& x) const {
  const auto& alg = *norm_.algebra;
  const int b = alg.layer_begin(1);
  const int e = alg.layer_end(1);
  for (std::size_t h = 0; h < holes_.holes.size(); ++h) {
    const auto& hole = holes_.holes[h];
    // Layer-1 displacement bounds the distance from below (sigma_1 = 1).
    double horizontal = 0.0;
    for (int i = b; i < e; ++i) {
      const double v = x[static_cast<std::size_t>(i)] - hole.center[static_cast<std::size_t>(i)];
      horizontal += v * v;
    }
    if (norm_.layer_norm == LayerNorm::Euclidean) {
      if (std::sqrt(horizontal) >= hole.radius) continue;
    } else {
      bool far = false;
      for (int i = b; i < e && !far; ++i) far = std::abs(x[static_cast<std::size_t>(i)] - hole.center[static_cast<std::size_t>(i)]) >= hole.radius;
      if (far) continue;
    }
    if (hdist(norm_, hole.center, x) < hole.radius) return h;
  }
  return std::nullopt;
}

bool DomainSet::contains(const Point& x) const {
  if (x.algebra_ptr() != norm_.algebra.get()) throw AlgebraMismatch("point does not belong to the domain's algebra");
  switch (kind_) {
    case DomainKind::Full:
      return true;
    case DomainKind::Halfspace: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += halfspace_.normal[i] * x[i];
      return s <= halfspace_.offset;
    }
    case DomainKind::HoleFamily:
      return !hole_containing(x).has_value();
    case DomainKind::ProductMask:
      for (std::size_t i = 0; i < mask_.excluded.size(); ++i) {
        for (const auto& [lo, hi] : mask_.excluded[i]) {
          if (x[i] > lo && x[i] < hi) return false;
        }
      }
      return true;
    case DomainKind::Custom:
      return predicate_(x);
  }
  return true;
}

HoleFamilySpec dyadic_hole_family(const HomogeneousNorm& norm, const std::vector<Point>& anchors, const Point& direction,
                                  int level_min, int level_max, double coeff, double power) {
  if (level_min < 0 || level_max < level_min) throw InvalidArgument("hole levels need 0 <= level_min <= level_max");
  if (!(coeff > 0.0) || !(power > 0.0)) throw InvalidArgument("hole coefficient and power must be positive");
  const auto& alg = *norm.algebra;
  HoleFamilySpec spec;
  spec.anchors = anchors;
  spec.coeff = coeff;
  spec.power = power;
  spec.level_min = level_min;
  spec.level_max = level_max;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    for (int k = level_min; k <= level_max; ++k) {
      const double scale = std::ldexp(1.0, -k);
      Point c = group_product(alg, anchors[a], dilate(alg, scale, direction));
      spec.holes.push_back({std::move(c), coeff * std::pow(scale, power), k, static_cast<int>(a)});
    }
  }
  return spec;
}

std::vector<Point> grid_anchors(const GradedAlgebra& alg, double spacing, int per_side) {
  std::vector<Point> out;
  const int side = 2 * per_side + 1;
  long total = 1;
  for (int i = 0; i < alg.dim(); ++i) total *= side;
  for (long code = 0; code < total; ++code) {
    Point p(alg);
    long c = code;
    for (int i = 0; i < alg.dim(); ++i) {
      p[static_cast<std::size_t>(i)] = spacing * static_cast<double>(c % side - per_side);
      c /= side;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace carnot
