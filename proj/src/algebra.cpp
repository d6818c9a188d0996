#include "carnot/algebra.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <numeric>

namespace carnot {

GradedAlgebra::GradedAlgebra(std::string name, std::vector<int> layer_dims,
                             std::vector<std::string> labels,
                             std::vector<StructureConstant> brackets, bool stratified)
    : name_(std::move(name)), layer_dims_(std::move(layer_dims)), labels_(std::move(labels)),
      stratified_(stratified) {
  if (layer_dims_.empty()) throw InvalidArgument("algebra needs at least one layer");
  if (static_cast<int>(layer_dims_.size()) > kMaxStep) {
    throw InvalidArgument("step " + std::to_string(layer_dims_.size()) + " exceeds supported maximum " +
                          std::to_string(kMaxStep));
  }
  layer_offsets_.push_back(0);
  for (std::size_t l = 0; l < layer_dims_.size(); ++l) {
    if (layer_dims_[l] <= 0) throw InvalidArgument("layer dimensions must be positive");
    dim_ += layer_dims_[l];
    hom_dim_ += static_cast<int>(l + 1) * layer_dims_[l];
    layer_offsets_.push_back(dim_);
    for (int c = 0; c < layer_dims_[l]; ++c) layer_of_.push_back(static_cast<int>(l + 1));
  }
  if (labels_.empty()) {
    for (int i = 0; i < dim_; ++i) labels_.push_back("e" + std::to_string(i + 1));
  }
  if (static_cast<int>(labels_.size()) != dim_) throw InvalidArgument("basis label count differs from dimension");

  std::map<std::array<int, 3>, Rational> merged;
  for (auto& c : brackets) {
    if (c.i < 0 || c.j < 0 || c.k < 0 || c.i >= dim_ || c.j >= dim_ || c.k >= dim_) {
      throw InvalidArgument("structure constant index out of range");
    }
    if (c.i >= c.j) throw InvalidArgument("structure constants must be stored with i < j");
    merged[{c.i, c.j, c.k}] += c.value;
  }
  for (auto& [key, value] : merged) {
    if (sgn(value) == 0) continue;
    Rational v = value;
    v.canonicalize();
    exact_.push_back({key[0], key[1], key[2], v});
    numeric_.push_back({key[0], key[1], key[2], to_double(v)});
  }
  pair_index_.assign(static_cast<std::size_t>(dim_) * dim_, -1);
  for (std::size_t t = 0; t < exact_.size();) {
    std::size_t e = t;
    while (e < exact_.size() && exact_[e].i == exact_[t].i && exact_[e].j == exact_[t].j) ++e;
    pair_index_[static_cast<std::size_t>(exact_[t].i) * dim_ + exact_[t].j] = static_cast<int>(blocks_.size());
    blocks_.push_back({exact_[t].i, exact_[t].j, t, e});
    t = e;
  }
}

int GradedAlgebra::layer_dim(int layer) const {
  if (layer < 1 || layer > step()) throw InvalidArgument("layer index out of range");
  return layer_dims_[layer - 1];
}

int GradedAlgebra::layer_begin(int layer) const {
  if (layer < 1 || layer > step()) throw InvalidArgument("layer index out of range");
  return layer_offsets_[layer - 1];
}

int GradedAlgebra::layer_end(int layer) const {
  if (layer < 1 || layer > step()) throw InvalidArgument("layer index out of range");
  return layer_offsets_[layer];
}

std::span<const StructureConstant> GradedAlgebra::pair_terms(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_ || i >= j) return {};
  const int b = pair_index_[static_cast<std::size_t>(i) * dim_ + j];
  if (b < 0) return {};
  return std::span<const StructureConstant>(exact_).subspan(blocks_[b].begin, blocks_[b].end - blocks_[b].begin);
}

Point to_double(const ExactElement& x) {
  std::vector<double> c;
  c.reserve(x.size());
  for (const auto& q : x.coords()) c.push_back(to_double(q));
  return Point(x.algebra(), std::move(c));
}

ExactElement to_exact(const Point& x) {
  std::vector<Rational> c;
  c.reserve(x.size());
  for (double v : x.coords()) c.push_back(exact_from_double(v));
  return ExactElement(x.algebra(), std::move(c));
}

namespace {

template <class T>
void require_member(const GradedAlgebra& alg, const Element<T>& x) {
  if (x.algebra_ptr() != &alg) {
    throw AlgebraMismatch("element does not belong to algebra " + alg.name());
  }
}

// out += [x, y] over raw coordinate arrays.
template <class T>
void accumulate_bracket(const GradedAlgebra& alg, const T* x, const T* y, T* out) {
  const auto numeric = alg.numeric_structure();
  const auto exact = alg.structure();
  for (const auto& block : alg.pair_blocks()) {
    const T& xi = x[block.i];
    const T& xj = x[block.j];
    const T& yi = y[block.i];
    const T& yj = y[block.j];
    if ((is_zero(xi) || is_zero(yj)) && (is_zero(xj) || is_zero(yi))) continue;
    T w = xi * yj - xj * yi;
    if (is_zero(w)) continue;
    for (std::size_t t = block.begin; t < block.end; ++t) {
      if constexpr (std::is_same_v<T, double>) {
        out[numeric[t].k] += numeric[t].value * w;
      } else {
        out[exact[t].k] += exact[t].value * w;
      }
    }
  }
}

template <class T>
bool all_zero(const T* v, std::size_t n) {
  return std::all_of(v, v + n, [](const T& c) { return is_zero(c); });
}

struct DynkinTable {
  // coefficients[word] for words of length m; bit l set means letter l is y.
  std::vector<Rational> exact;
  std::vector<double> numeric;
};

Rational factorial(int n) {
  Rational f(1);
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Enumerates the 2k-tuples (p_1, q_1, ..., p_k, q_k) with p_i + q_i >= 1 and
// total m, adding (-1)^{k-1}/k * 1/m * 1/prod(p_i! q_i!) to the word
// x^{p_1} y^{q_1} ... x^{p_k} y^{q_k}.
void enumerate_dynkin(int m, int remaining, int length, unsigned word, int k, const Rational& inv_fact,
                      std::vector<Rational>& table) {
  if (remaining == 0) {
    Rational c = inv_fact / (Rational(k) * Rational(m));
    if (k % 2 == 0) c = -c;
    table[word] += c;
    return;
  }
  for (int p = 0; p <= remaining; ++p) {
    for (int q = 0; p + q <= remaining; ++q) {
      if (p + q == 0) continue;
      unsigned w = word;
      for (int l = 0; l < q; ++l) w |= 1u << (length + p + l);
      enumerate_dynkin(m, remaining - p - q, length + p + q, w, k + 1,
                       inv_fact / (factorial(p) * factorial(q)), table);
    }
  }
}

const DynkinTable& dynkin_table(int m) {
  static std::array<DynkinTable, kMaxStep + 1> tables;
  static std::array<std::once_flag, kMaxStep + 1> flags;
  if (m < 2 || m > kMaxStep) throw InvalidArgument("Dynkin degree out of range");
  std::call_once(flags[m], [m] {
    DynkinTable t;
    t.exact.assign(std::size_t{1} << m, Rational(0));
    enumerate_dynkin(m, m, 0, 0u, 0, Rational(1), t.exact);
    for (auto& q : t.exact) {
      q.canonicalize();
      t.numeric.push_back(to_double(q));
    }
    tables[m] = std::move(t);
  });
  return tables[m];
}

template <class T>
const T& table_coefficient(const DynkinTable& table, unsigned word) {
  if constexpr (std::is_same_v<T, double>) {
    return table.numeric[word];
  } else {
    return table.exact[word];
  }
}

// Walks the trie of left-nested words in x, y. Level l of `scratch` holds
// the nested bracket of the current word of length l + 1; every word of
// length m in [m_lo, m_hi] contributes its Dynkin coefficient times that
// bracket. Words whose nested bracket vanishes are pruned together with all
// their extensions.
template <class T>
struct DynkinWalk {
  const GradedAlgebra& alg;
  const T* x;
  const T* y;
  std::size_t n;
  int m_lo;
  int m_hi;
  std::vector<T> scratch;
  std::vector<const DynkinTable*> tables;
  T* acc;

  void walk(int length, unsigned word) {
    const T* prefix = scratch.data() + static_cast<std::size_t>(length - 1) * n;
    if (length >= 2 && length >= m_lo) {
      const T& c = table_coefficient<T>(*tables[static_cast<std::size_t>(length)], word);
      if (!is_zero(c)) {
        for (std::size_t i = 0; i < n; ++i) {
          if (!is_zero(prefix[i])) acc[i] += c * prefix[i];
        }
      }
    }
    if (length == m_hi) return;
    T* next = scratch.data() + static_cast<std::size_t>(length) * n;
    for (unsigned letter = 0; letter < 2; ++letter) {
      std::fill(next, next + n, T(0));
      accumulate_bracket<T>(alg, prefix, letter ? y : x, next);
      if (all_zero(next, n)) continue;
      walk(length + 1, word | (letter << length));
    }
  }
};

template <class T>
std::vector<T> dynkin_sum(const GradedAlgebra& alg, const Element<T>& x, const Element<T>& y, int m_lo,
                          int m_hi) {
  const std::size_t n = x.size();
  std::vector<T> acc(n, T(0));
  if (m_hi < 2 || alg.is_abelian()) return acc;
  DynkinWalk<T> w{alg, x.coords().data(), y.coords().data(), n, m_lo, m_hi,
                  std::vector<T>(n * static_cast<std::size_t>(m_hi), T(0)), {}, acc.data()};
  w.tables.assign(static_cast<std::size_t>(m_hi) + 1, nullptr);
  for (int m = std::max(2, m_lo); m <= m_hi; ++m) w.tables[static_cast<std::size_t>(m)] = &dynkin_table(m);
  for (unsigned start = 0; start < 2; ++start) {
    const T* src = start ? w.y : w.x;
    if (all_zero(src, n)) continue;
    std::copy(src, src + n, w.scratch.begin());
    w.walk(1, start);
  }
  return acc;
}

}  // namespace

const Rational& dynkin_coefficient(int m, unsigned word) {
  const auto& table = dynkin_table(m);
  if (word >= table.exact.size()) throw InvalidArgument("Dynkin word out of range");
  return table.exact[word];
}

template <class T>
Element<T> basis_vector(const GradedAlgebra& alg, int index) {
  if (index < 0 || index >= alg.dim()) throw InvalidArgument("basis index out of range");
  Element<T> e(alg);
  e[static_cast<std::size_t>(index)] = T(1);
  return e;
}

template <class T>
Element<T> bracket(const GradedAlgebra& alg, const Element<T>& x, const Element<T>& y) {
  require_member(alg, x);
  require_member(alg, y);
  std::vector<T> out(x.size(), T(0));
  accumulate_bracket<T>(alg, x.coords().data(), y.coords().data(), out.data());
  return Element<T>(alg, std::move(out));
}

template <class T>
Element<T> dynkin_polynomial(const GradedAlgebra& alg, int m, const Element<T>& x, const Element<T>& y) {
  require_member(alg, x);
  require_member(alg, y);
  if (m < 2 || m > alg.step()) {
    throw InvalidArgument("Dynkin degree " + std::to_string(m) + " outside [2, " + std::to_string(alg.step()) + "]");
  }
  return Element<T>(alg, dynkin_sum(alg, x, y, m, m));
}

template <class T>
Element<T> group_product(const GradedAlgebra& alg, const Element<T>& x, const Element<T>& y) {
  require_member(alg, x);
  require_member(alg, y);
  std::vector<T> out = dynkin_sum(alg, x, y, 2, alg.step());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += x[i] + y[i];
  return Element<T>(alg, std::move(out));
}

template <class T>
Element<T> group_inverse(const Element<T>& x) {
  Element<T> out = x;
  for (auto& c : out.mutable_coords()) c = -c;
  return out;
}

template <class T>
Element<T> dilate(const GradedAlgebra& alg, const T& r, const Element<T>& x) {
  require_member(alg, x);
  if (!(r > 0)) throw InvalidArgument("dilation factor must be positive");
  Element<T> out = x;
  T power = r;
  for (int layer = 1; layer <= alg.step(); ++layer) {
    for (int i = alg.layer_begin(layer); i < alg.layer_end(layer); ++i) out[i] *= power;
    power *= r;
  }
  return out;
}

template <class T>
Element<T> project(const GradedAlgebra& alg, int layer, const Element<T>& x) {
  require_member(alg, x);
  if (layer < 1 || layer > alg.step()) throw InvalidArgument("layer index out of range");
  Element<T> out(alg);
  for (int i = alg.layer_begin(layer); i < alg.layer_end(layer); ++i) out[i] = x[i];
  return out;
}

template <class T>
Element<T> add(const Element<T>& x, const Element<T>& y) {
  if (x.algebra_ptr() != y.algebra_ptr()) throw AlgebraMismatch("adding elements of different algebras");
  Element<T> out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  return out;
}

template <class T>
Element<T> scale(const T& s, const Element<T>& x) {
  Element<T> out = x;
  for (auto& c : out.mutable_coords()) c *= s;
  return out;
}

template <class T>
Element<T> product_of(const GradedAlgebra& alg, std::span<const Element<T>> xs) {
  Element<T> acc(alg);
  for (const auto& x : xs) acc = group_product(alg, acc, x);
  return acc;
}

#define CARNOT_INSTANTIATE(T)                                                                       \
  template Element<T> basis_vector<T>(const GradedAlgebra&, int);                                  \
  template Element<T> bracket<T>(const GradedAlgebra&, const Element<T>&, const Element<T>&);      \
  template Element<T> dynkin_polynomial<T>(const GradedAlgebra&, int, const Element<T>&,           \
                                           const Element<T>&);                                      \
  template Element<T> group_product<T>(const GradedAlgebra&, const Element<T>&, const Element<T>&); \
  template Element<T> group_inverse<T>(const Element<T>&);                                         \
  template Element<T> dilate<T>(const GradedAlgebra&, const T&, const Element<T>&);                \
  template Element<T> project<T>(const GradedAlgebra&, int, const Element<T>&);                    \
  template Element<T> add<T>(const Element<T>&, const Element<T>&);                                \
  template Element<T> scale<T>(const T&, const Element<T>&);                                       \
  template Element<T> product_of<T>(const GradedAlgebra&, std::span<const Element<T>>);

CARNOT_INSTANTIATE(double)
CARNOT_INSTANTIATE(Rational)

#undef CARNOT_INSTANTIATE

AlgebraPtr build_heisenberg(int n) {
  if (n < 1) throw InvalidArgument("Heisenberg rank must be positive");
  std::vector<std::string> labels;
  for (int i = 1; i <= n; ++i) labels.push_back(n == 1 ? "X" : "X" + std::to_string(i));
  for (int i = 1; i <= n; ++i) labels.push_back(n == 1 ? "Y" : "Y" + std::to_string(i));
  labels.push_back("T");
  std::vector<StructureConstant> table;
  for (int i = 0; i < n; ++i) table.push_back({i, n + i, 2 * n, Rational(1)});
  const std::string name = n == 1 ? "h1" : "h" + std::to_string(n);
  return std::make_shared<GradedAlgebra>(name, std::vector<int>{2 * n, 1}, std::move(labels), std::move(table),
                                         true);
}

AlgebraPtr build_abelian(int n) {
  if (n < 1) throw InvalidArgument("abelian dimension must be positive");
  std::vector<std::string> labels;
  for (int i = 1; i <= n; ++i) labels.push_back("e" + std::to_string(i));
  return std::make_shared<GradedAlgebra>("r" + std::to_string(n), std::vector<int>{n}, std::move(labels),
                                         std::vector<StructureConstant>{}, true);
}

AlgebraPtr build_engel() {
  std::vector<StructureConstant> table{{0, 1, 2, Rational(1)}, {0, 2, 3, Rational(1)}};
  return std::make_shared<GradedAlgebra>("engel", std::vector<int>{2, 1, 1},
                                         std::vector<std::string>{"X1", "X2", "X3", "X4"}, std::move(table), true);
}

}  // namespace carnot
