#include "carnot/maps.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "carnot/sampling.hpp"

namespace carnot {

double estimate_lipschitz(const MapUnderTest& f, long pairs, std::uint64_t seed, double radius, double inflation) {
  if (pairs <= 0) throw InvalidArgument("Lipschitz estimation needs a positive pair count");
  std::vector<double> best(kShards, 0.0);
  run_shards(kShards, [&](int shard) {
    auto rng = shard_rng(seed, static_cast<std::uint64_t>(shard));
    const long count = shard_count(pairs, shard);
    for (long n = 0; n < count; ++n) {
      const Point u = sample_hball(f.source, radius, rng);
      if (!f.domain.contains(u)) continue;
      const double scale = radius * std::pow(10.0, -6.0 * uniform01(rng));
      const Point v = group_product(f.source_alg(), u, sample_hsphere(f.source, scale, rng));
      if (!f.domain.contains(v)) continue;
      const double d = hdist(f.source, u, v);
      if (!(d > 0.0)) continue;
      best[static_cast<std::size_t>(shard)] =
          std::max(best[static_cast<std::size_t>(shard)], hdist(f.target, f.eval(u), f.eval(v)) / d);
    }
  });
  return inflation * *std::max_element(best.begin(), best.end());
}

HHom::HHom(AlgebraPtr source, AlgebraPtr target, RationalMatrix matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  const int rows = target_->dim();
  cols_ = source_->dim();
  if (static_cast<int>(matrix_.size()) != rows) throw InvalidArgument("h-homomorphism matrix needs one row per target coordinate");
  for (const auto& row : matrix_) {
    if (static_cast<int>(row.size()) != cols_) throw InvalidArgument("h-homomorphism matrix needs one column per source coordinate");
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const auto& v = matrix_[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      if (sgn(v) != 0 && target_->layer_of(r) != source_->layer_of(c)) {
        throw InvalidArgument("h-homomorphism matrix must preserve layers (entry " + std::to_string(r) + "," +
                              std::to_string(c) + ")");
      }
      numeric_.push_back(carnot::to_double(v));
    }
  }
}

Point HHom::apply(const Point& x) const {
  if (x.algebra_ptr() != source_.get()) throw AlgebraMismatch("h-homomorphism applied to a point of another algebra");
  Point out(*target_);
  for (int r = 0; r < target_->dim(); ++r) {
    double s = 0.0;
    const double* row = numeric_.data() + static_cast<std::size_t>(r * cols_);
    for (int c = 0; c < cols_; ++c) s += row[c] * x[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

ExactElement HHom::apply(const ExactElement& x) const {
  if (x.algebra_ptr() != source_.get()) throw AlgebraMismatch("h-homomorphism applied to a point of another algebra");
  ExactElement out(*target_);
  for (int r = 0; r < target_->dim(); ++r) {
    Rational s = 0;
    const auto& row = matrix_[static_cast<std::size_t>(r)];
    for (int c = 0; c < cols_; ++c) {
      if (sgn(row[static_cast<std::size_t>(c)]) != 0) s += row[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    }
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

std::vector<std::vector<double>> HHom::layer_block(int layer) const {
  std::vector<std::vector<double>> block;
  if (layer > target_->step() || layer > source_->step()) return block;
  for (int r = target_->layer_begin(layer); r < target_->layer_end(layer); ++r) {
    std::vector<double> row;
    for (int c = source_->layer_begin(layer); c < source_->layer_end(layer); ++c) row.push_back(entry(r, c));
    block.push_back(std::move(row));
  }
  return block;
}

namespace {

ExactElement column(const RationalMatrix& m, const GradedAlgebra& target, int c) {
  ExactElement e(target);
  for (int r = 0; r < target.dim(); ++r) e[static_cast<std::size_t>(r)] = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return e;
}

// Coefficient of e_k in [e_a, e_b] for any order of a and b.
std::vector<Rational> bracket_coefficients(const GradedAlgebra& alg, int a, int b, int begin, int end) {
  std::vector<Rational> out(static_cast<std::size_t>(end - begin), Rational(0));
  if (a == b) return out;
  const bool flip = a > b;
  for (const auto& t : alg.pair_terms(std::min(a, b), std::max(a, b))) {
    if (t.k < begin || t.k >= end) continue;
    if (flip) {
      out[static_cast<std::size_t>(t.k - begin)] -= t.value;
    } else {
      out[static_cast<std::size_t>(t.k - begin)] += t.value;
    }
  }
  return out;
}

double max_abs_difference(const ExactElement& a, const ExactElement& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Rational d = a[i] - b[i];
    if (sgn(d) != 0) worst = std::max(worst, std::abs(carnot::to_double(d)));
  }
  return worst;
}

}  // namespace

std::optional<BracketRelation> hhom_violation(const HHom& L, double tolerance) {
  const auto& g = L.source();
  const auto& m = L.target();
  std::vector<ExactElement> images;
  for (int c = 0; c < g.dim(); ++c) images.push_back(column(L.matrix(), m, c));
  std::optional<BracketRelation> worst;
  for (int i = 0; i < g.dim(); ++i) {
    for (int j = i + 1; j < g.dim(); ++j) {
      ExactElement lhs(m);
      for (const auto& t : g.pair_terms(i, j)) {
        for (int r = 0; r < m.dim(); ++r) lhs[static_cast<std::size_t>(r)] += t.value * images[static_cast<std::size_t>(t.k)][static_cast<std::size_t>(r)];
      }
      const ExactElement rhs = bracket(m, images[static_cast<std::size_t>(i)], images[static_cast<std::size_t>(j)]);
      if (lhs == rhs) continue;
      const double residual = max_abs_difference(lhs, rhs);
      if (residual <= tolerance) continue;
      if (!worst || residual > worst->residual) {
        std::ostringstream os;
        os << "L[" << g.labels()[static_cast<std::size_t>(i)] << "," << g.labels()[static_cast<std::size_t>(j)] << "] != [L "
           << g.labels()[static_cast<std::size_t>(i)] << ", L " << g.labels()[static_cast<std::size_t>(j)]
           << "] (max coordinate residual " << residual << ")";
        worst = BracketRelation{i, j, residual, os.str()};
      }
    }
  }
  return worst;
}

HHom hhom_from_horizontal(AlgebraPtr source, AlgebraPtr target, const RationalMatrix& first_layer, double tolerance) {
  const auto& g = *source;
  const auto& m = *target;
  if (!g.is_stratified()) throw InvalidArgument("source algebra " + g.name() + " is not stratified");
  const int n1 = g.layer_dim(1);
  const int m1 = m.layer_dim(1);
  if (static_cast<int>(first_layer.size()) != m1) {
    throw InvalidArgument("first-layer matrix needs " + std::to_string(m1) + " rows");
  }
  for (const auto& row : first_layer) {
    if (static_cast<int>(row.size()) != n1) throw InvalidArgument("first-layer matrix needs " + std::to_string(n1) + " columns");
  }

  std::vector<ExactElement> images(static_cast<std::size_t>(g.dim()), ExactElement(m));
  for (int c = 0; c < n1; ++c) {
    for (int r = 0; r < m1; ++r) images[static_cast<std::size_t>(c)][static_cast<std::size_t>(m.layer_begin(1) + r)] = first_layer[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }

  for (int j = 1; j < g.step(); ++j) {
    const int begin = g.layer_begin(j + 1);
    const int end = g.layer_end(j + 1);
    const int width = end - begin;
    // Pick pairs (a in V_1, b in V_j) whose brackets form a basis of V_{j+1}.
    RationalMatrix chosen;
    std::vector<ExactElement> rhs;
    int current_rank = 0;
    for (int a = g.layer_begin(1); a < g.layer_end(1) && current_rank < width; ++a) {
      for (int b = g.layer_begin(j); b < g.layer_end(j) && current_rank < width; ++b) {
        auto coeffs = bracket_coefficients(g, a, b, begin, end);
        chosen.push_back(coeffs);
        const int r = rank(chosen);
        if (r == current_rank) {
          chosen.pop_back();
          continue;
        }
        current_rank = r;
        rhs.push_back(bracket(m, images[static_cast<std::size_t>(a)], images[static_cast<std::size_t>(b)]));
      }
    }
    if (current_rank < width) {
      throw InvalidArgument("layer " + std::to_string(j + 1) + " of " + g.name() + " is not generated by brackets with layer 1");
    }
    for (int r = 0; r < m.dim(); ++r) {
      std::vector<Rational> b;
      for (const auto& e : rhs) b.push_back(e[static_cast<std::size_t>(r)]);
      auto x = solve(chosen, b);
      if (!x) throw InconsistentExtension("square bracket system is singular");
      for (int k = 0; k < width; ++k) images[static_cast<std::size_t>(begin + k)][static_cast<std::size_t>(r)] = (*x)[static_cast<std::size_t>(k)];
    }
  }

  RationalMatrix matrix(static_cast<std::size_t>(m.dim()), std::vector<Rational>(static_cast<std::size_t>(g.dim()), Rational(0)));
  for (int c = 0; c < g.dim(); ++c) {
    for (int r = 0; r < m.dim(); ++r) {
      auto v = images[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
      if (sgn(v) != 0 && m.layer_of(r) != g.layer_of(c)) {
        if (std::abs(carnot::to_double(v)) > tolerance) {
          throw InconsistentExtension("image of " + g.labels()[static_cast<std::size_t>(c)] + " leaves layer " +
                                      std::to_string(g.layer_of(c)));
        }
        v = 0;
      }
      matrix[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = v;
    }
  }
  HHom L(std::move(source), std::move(target), std::move(matrix));
  if (auto v = hhom_violation(L, tolerance)) throw InconsistentExtension(v->detail);
  return L;
}

MapUnderTest hhom_map(const std::string& id, const HHom& L, const HomogeneousNorm& source,
                      const HomogeneousNorm& target) {
  if (source.algebra.get() != L.source_ptr().get() || target.algebra.get() != L.target_ptr().get()) {
    throw AlgebraMismatch("norms do not match the h-homomorphism's algebras");
  }
  MapUnderTest f{id, source, target, DomainSet::full(source), nullptr, nullptr, 0.0, false};
  f.eval = [L](const Point& x) { return L.apply(x); };
  f.exact_eval = [L](const ExactElement& x) { return L.apply(x); };
  // rho(Lu, Lv) = ||L(u^{-1}v)||, so the constant is the sup of ||Lz|| on the unit sphere.
  double best = 0.0;
  auto rng = shard_rng(0x4c495053ULL, 0);
  for (int n = 0; n < 4096; ++n) best = std::max(best, hnorm(target, L.apply(sample_hsphere(source, 1.0, rng))));
  f.lipschitz = best;
  return f;
}

}  // namespace carnot
