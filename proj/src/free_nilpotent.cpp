#include "carnot/free_nilpotent.hpp"

#include <cstdint>
#include <map>
#include <string>

#include "carnot/linalg.hpp"

namespace carnot {

namespace {

int mobius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Homogeneous element of the free associative algebra. Words of degree d are
// encoded as base-`rank` integers with the first letter most significant.
using Poly = std::map<std::uint64_t, Rational>;

struct HallElement {
  int degree;
  int left;   // -1 for generators
  int right;  // generator letter when left == -1
  Poly expansion;
};

Poly multiply(const Poly& a, const Poly& b, std::uint64_t shift) {
  Poly out;
  for (const auto& [wa, ca] : a) {
    for (const auto& [wb, cb] : b) {
      Rational& slot = out[wa * shift + wb];
      slot += ca * cb;
    }
  }
  return out;
}

Poly commutator(const Poly& a, int deg_a, const Poly& b, int deg_b, int rank) {
  Poly ab = multiply(a, b, static_cast<std::uint64_t>(ipow(rank, deg_b)));
  const Poly ba = multiply(b, a, static_cast<std::uint64_t>(ipow(rank, deg_a)));
  for (const auto& [w, c] : ba) ab[w] -= c;
  std::erase_if(ab, [](const auto& kv) { return sgn(kv.second) == 0; });
  return ab;
}

// Coordinates of homogeneous Lie polynomials of a fixed degree in the Hall
// elements of that degree, via an invertible square block on pivot words.
class DegreeSolver {
 public:
  DegreeSolver(const std::vector<const HallElement*>& elements) : elements_(elements) {
    std::map<std::uint64_t, int> column;
    for (const auto* h : elements_) {
      for (const auto& [w, c] : h->expansion) column.emplace(w, 0);
    }
    words_.reserve(column.size());
    for (auto& [w, idx] : column) {
      idx = static_cast<int>(words_.size());
      words_.push_back(w);
    }
    const std::size_t n = elements_.size();
    RationalMatrix m(n, std::vector<Rational>(words_.size()));
    for (std::size_t r = 0; r < n; ++r) {
      for (const auto& [w, c] : elements_[r]->expansion) m[r][static_cast<std::size_t>(column[w])] = c;
    }
    const Echelon e = row_reduce(m);
    if (e.rows.size() != n) throw InvalidAlgebra("Hall elements are linearly dependent");
    for (int p : e.pivots) pivot_words_.push_back(words_[static_cast<std::size_t>(p)]);
    // square block S[r][c] = coefficient of pivot word c in element r; invert it.
    RationalMatrix aug(n, std::vector<Rational>(2 * n));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        auto it = elements_[r]->expansion.find(pivot_words_[c]);
        if (it != elements_[r]->expansion.end()) aug[r][c] = it->second;
      }
      aug[r][n + r] = 1;
    }
    // c^T S = target^T  =>  c^T = target^T S^{-1}.
    const Echelon inv = row_reduce(std::move(aug));
    inverse_.assign(n, std::vector<Rational>(n));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) inverse_[r][c] = inv.rows[r][n + c];
    }
  }

  std::vector<Rational> coordinates(const Poly& target) const {
    const std::size_t n = elements_.size();
    std::vector<Rational> t(n);
    for (std::size_t c = 0; c < n; ++c) {
      auto it = target.find(pivot_words_[c]);
      if (it != target.end()) t[c] = it->second;
    }
    std::vector<Rational> coeffs(n);
    for (std::size_t r = 0; r < n; ++r) {
      if (sgn(t[r]) == 0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (sgn(inverse_[r][c]) != 0) coeffs[c] += t[r] * inverse_[r][c];
      }
    }
    Poly check;
    for (std::size_t k = 0; k < n; ++k) {
      if (sgn(coeffs[k]) == 0) continue;
      for (const auto& [w, c] : elements_[k]->expansion) check[w] += coeffs[k] * c;
    }
    std::erase_if(check, [](const auto& kv) { return sgn(kv.second) == 0; });
    if (check != target) throw InvalidAlgebra("bracket is not in the span of the Hall basis");
    return coeffs;
  }

 private:
  std::vector<const HallElement*> elements_;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> pivot_words_;
  RationalMatrix inverse_;
};

std::string hall_label(const std::vector<HallElement>& hall, int idx, const std::vector<std::string>& gens) {
  const auto& h = hall[static_cast<std::size_t>(idx)];
  if (h.left < 0) return gens[static_cast<std::size_t>(h.right)];
  return "[" + hall_label(hall, h.left, gens) + "," + hall_label(hall, h.right, gens) + "]";
}

}  // namespace

std::vector<long> witt_dimensions(int rank, int step) {
  if (rank < 1 || step < 1) throw InvalidArgument("rank and step must be positive");
  std::vector<long> dims;
  for (int d = 1; d <= step; ++d) {
    long sum = 0;
    for (int e = 1; e <= d; ++e) {
      if (d % e == 0) sum += mobius(e) * ipow(rank, d / e);
    }
    dims.push_back(sum / d);
  }
  return dims;
}

AlgebraPtr build_free_nilpotent(int rank, int step, int dimension_cap) {
  if (rank < 1 || step < 1) throw InvalidArgument("rank and step must be positive");
  if (rank == 1) step = 1;
  if (step > kMaxStep) throw InvalidArgument("step exceeds supported maximum " + std::to_string(kMaxStep));
  // Overflow guard before the Witt formula: the degree-1 layer alone is `rank`.
  if (rank > dimension_cap) {
    throw DimensionCapExceeded("free nilpotent algebra exceeds dimension cap " + std::to_string(dimension_cap));
  }
  const std::vector<long> witt = witt_dimensions(rank, step);
  long total = 0;
  for (long d : witt) total += d;
  if (total > dimension_cap) {
    throw DimensionCapExceeded("free nilpotent algebra of rank " + std::to_string(rank) + " and step " +
                               std::to_string(step) + " has dimension " + std::to_string(total) +
                               ", cap is " + std::to_string(dimension_cap));
  }

  std::vector<HallElement> hall;
  std::vector<std::vector<int>> by_degree(static_cast<std::size_t>(step) + 1);
  for (int g = 0; g < rank; ++g) {
    hall.push_back({1, -1, g, Poly{{static_cast<std::uint64_t>(g), Rational(1)}}});
    by_degree[1].push_back(g);
  }
  for (int d = 2; d <= step; ++d) {
    for (int du = 1; du < d; ++du) {
      const int dv = d - du;
      if (dv < du) continue;  // u < v forces deg u <= deg v
      for (int u : by_degree[static_cast<std::size_t>(du)]) {
        for (int v : by_degree[static_cast<std::size_t>(dv)]) {
          if (!(u < v)) continue;
          const auto& hv = hall[static_cast<std::size_t>(v)];
          if (hv.left >= 0 && hv.left > u) continue;
          Poly expansion = commutator(hall[static_cast<std::size_t>(u)].expansion, du, hv.expansion, dv, rank);
          hall.push_back({d, u, v, std::move(expansion)});
          by_degree[static_cast<std::size_t>(d)].push_back(static_cast<int>(hall.size()) - 1);
        }
      }
    }
    if (static_cast<long>(by_degree[static_cast<std::size_t>(d)].size()) != witt[static_cast<std::size_t>(d) - 1]) {
      throw InvalidAlgebra("Hall basis size disagrees with the Witt formula at degree " + std::to_string(d));
    }
  }

  std::vector<std::string> gens;
  for (int g = 0; g < rank; ++g) gens.push_back("X" + std::to_string(g + 1));
  std::vector<std::string> labels;
  for (int i = 0; i < static_cast<int>(hall.size()); ++i) labels.push_back(hall_label(hall, i, gens));

  std::vector<DegreeSolver> solvers;
  solvers.reserve(static_cast<std::size_t>(step) + 1);
  for (int d = 0; d <= step; ++d) {
    std::vector<const HallElement*> elems;
    if (d >= 1) {
      for (int idx : by_degree[static_cast<std::size_t>(d)]) elems.push_back(&hall[static_cast<std::size_t>(idx)]);
    }
    solvers.emplace_back(elems);
  }

  std::vector<StructureConstant> table;
  const int n = static_cast<int>(hall.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int d = hall[static_cast<std::size_t>(i)].degree + hall[static_cast<std::size_t>(j)].degree;
      if (d > step) continue;
      const Poly target = commutator(hall[static_cast<std::size_t>(i)].expansion, hall[static_cast<std::size_t>(i)].degree,
                                     hall[static_cast<std::size_t>(j)].expansion, hall[static_cast<std::size_t>(j)].degree, rank);
      if (target.empty()) continue;
      const std::vector<Rational> coeffs = solvers[static_cast<std::size_t>(d)].coordinates(target);
      const auto& members = by_degree[static_cast<std::size_t>(d)];
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (sgn(coeffs[k]) != 0) table.push_back({i, j, members[k], coeffs[k]});
      }
    }
  }

  std::vector<int> layer_dims;
  for (int d = 1; d <= step; ++d) layer_dims.push_back(static_cast<int>(by_degree[static_cast<std::size_t>(d)].size()));
  return std::make_shared<GradedAlgebra>("free_" + std::to_string(rank) + "_" + std::to_string(step), std::move(layer_dims),
                                         std::move(labels), std::move(table), true);
}

}  // namespace carnot
