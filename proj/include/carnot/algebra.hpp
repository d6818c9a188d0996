#pragma once

// Graded nilpotent Lie algebras in exponential coordinates. A single
// coordinate vector is both a Lie algebra element and a group element; the
// group law is the Baker-Campbell-Hausdorff series truncated at the step,
// with the degree-m terms given by Dynkin's formula.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "carnot/errors.hpp"
#include "carnot/rational.hpp"

namespace carnot {

inline constexpr int kMaxStep = 10;

/// One entry of the bracket table: [e_i, e_j] has coefficient `value` on e_k.
/// Only i < j is stored; [e_j, e_i] is the negation.
struct StructureConstant {
  int i = 0;
  int j = 0;
  int k = 0;
  Rational value;
};

class GradedAlgebra {
 public:
  /// `layer_dims[l]` is the dimension of layer l + 1; basis vectors are
  /// ordered layer by layer. Entries with i >= j or out-of-range indices are
  /// rejected; duplicate (i, j, k) entries are summed and zeros dropped.
  /// Grading and Jacobi are not enforced here (see verify_algebra).
  GradedAlgebra(std::string name, std::vector<int> layer_dims,
                std::vector<std::string> labels,
                std::vector<StructureConstant> brackets, bool stratified);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int step() const { return static_cast<int>(layer_dims_.size()); }
  std::span<const int> layer_dims() const { return layer_dims_; }
  /// Layers are numbered from 1.
  int layer_dim(int layer) const;
  int layer_begin(int layer) const;
  int layer_end(int layer) const;
  int layer_of(int basis_index) const { return layer_of_[basis_index]; }
  /// Q = sum_k k * dim V_k.
  int hom_dim() const { return hom_dim_; }
  bool is_stratified() const { return stratified_; }
  bool is_abelian() const { return exact_.empty(); }
  std::span<const std::string> labels() const { return labels_; }

  std::span<const StructureConstant> structure() const { return exact_; }

  struct NumericConstant {
    int i, j, k;
    double value;
  };
  std::span<const NumericConstant> numeric_structure() const { return numeric_; }

  /// Entries of the table belonging to the ordered pair (i, j), i < j.
  std::span<const StructureConstant> pair_terms(int i, int j) const;

  /// Contiguous run of table entries sharing the pair (i, j).
  struct PairBlock {
    int i, j;
    std::size_t begin, end;
  };
  std::span<const PairBlock> pair_blocks() const { return blocks_; }

 private:
  std::string name_;
  int dim_ = 0;
  std::vector<int> layer_dims_;
  std::vector<int> layer_offsets_;
  std::vector<int> layer_of_;
  std::vector<std::string> labels_;
  std::vector<StructureConstant> exact_;
  std::vector<NumericConstant> numeric_;
  std::vector<PairBlock> blocks_;
  std::vector<int> pair_index_;
  int hom_dim_ = 0;
  bool stratified_ = false;
};

using AlgebraPtr = std::shared_ptr<const GradedAlgebra>;

/// Coordinates with respect to the graded basis of an algebra. The element
/// refers to its algebra without owning it; keep the AlgebraPtr alive.
template <class T>
class Element {
 public:
  Element() = default;
  explicit Element(const GradedAlgebra& algebra)
      : algebra_(&algebra), coords_(static_cast<std::size_t>(algebra.dim()), T(0)) {}
  Element(const GradedAlgebra& algebra, std::vector<T> coords)
      : algebra_(&algebra), coords_(std::move(coords)) {
    if (coords_.size() != static_cast<std::size_t>(algebra.dim())) {
      throw InvalidArgument("element of " + algebra.name() + " needs " +
                            std::to_string(algebra.dim()) + " coordinates, got " +
                            std::to_string(coords_.size()));
    }
  }

  const GradedAlgebra& algebra() const { return *algebra_; }
  const GradedAlgebra* algebra_ptr() const { return algebra_; }
  std::size_t size() const { return coords_.size(); }
  std::span<const T> coords() const { return coords_; }
  std::vector<T>& mutable_coords() { return coords_; }
  const T& operator[](std::size_t i) const { return coords_[i]; }
  T& operator[](std::size_t i) { return coords_[i]; }

  bool is_zero() const {
    for (const T& c : coords_) {
      if (!carnot::is_zero(c)) return false;
    }
    return true;
  }

  friend bool operator==(const Element& a, const Element& b) {
    return a.algebra_ == b.algebra_ && a.coords_ == b.coords_;
  }

 private:
  const GradedAlgebra* algebra_ = nullptr;
  std::vector<T> coords_;
};

using Point = Element<double>;
using ExactElement = Element<Rational>;

Point to_double(const ExactElement& x);
ExactElement to_exact(const Point& x);

template <class T>
Element<T> basis_vector(const GradedAlgebra& alg, int index);

template <class T>
Element<T> bracket(const GradedAlgebra& alg, const Element<T>& x, const Element<T>& y);

/// P_m(x, y) from Dynkin's formula, 2 <= m <= step.
template <class T>
Element<T> dynkin_polynomial(const GradedAlgebra& alg, int m, const Element<T>& x,
                             const Element<T>& y);

/// x y = x + y + sum_{m=2}^{step} P_m(x, y).
template <class T>
Element<T> group_product(const GradedAlgebra& alg, const Element<T>& x,
                         const Element<T>& y);

template <class T>
Element<T> group_inverse(const Element<T>& x);

/// delta_r scales layer k by r^k. Requires r > 0.
template <class T>
Element<T> dilate(const GradedAlgebra& alg, const T& r, const Element<T>& x);

/// Keeps layer `layer` (1-based) and zeroes the rest.
template <class T>
Element<T> project(const GradedAlgebra& alg, int layer, const Element<T>& x);

template <class T>
Element<T> add(const Element<T>& x, const Element<T>& y);

template <class T>
Element<T> scale(const T& s, const Element<T>& x);

/// Left-to-right product of a sequence of elements; empty sequence gives 0.
template <class T>
Element<T> product_of(const GradedAlgebra& alg, std::span<const Element<T>> xs);

/// Exact Dynkin coefficient of the left-nested word w in P_m, where bit l of
/// `word` is 1 when letter l is y. Coefficients depend on m only.
const Rational& dynkin_coefficient(int m, unsigned word);

/// Builders.
AlgebraPtr build_heisenberg(int n);
AlgebraPtr build_abelian(int n);
/// Filiform step-3 algebra: [X1,X2]=X3, [X1,X3]=X4.
AlgebraPtr build_engel();

}  // namespace carnot
