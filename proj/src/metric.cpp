#include "carnot/metric.hpp"

#include <algorithm>
#include <cmath>

#include "carnot/sampling.hpp"

namespace carnot {

std::string to_string(LayerNorm n) { return n == LayerNorm::Euclidean ? "euclidean" : "max"; }

LayerNorm parse_layer_norm(const std::string& s) {
  if (s == "euclidean") return LayerNorm::Euclidean;
  if (s == "max") return LayerNorm::Max;
  throw InvalidArgument("unknown layer norm '" + s + "' (expected euclidean or max)");
}

HomogeneousNorm::HomogeneousNorm(AlgebraPtr alg, std::vector<double> s, LayerNorm ln)
    : algebra(std::move(alg)), sigmas(std::move(s)), layer_norm(ln) {
  if (!algebra) throw InvalidArgument("norm needs an algebra");
  if (static_cast<int>(sigmas.size()) != algebra->step()) {
    throw InvalidArgument("norm needs " + std::to_string(algebra->step()) + " sigmas, got " + std::to_string(sigmas.size()));
  }
  for (double v : sigmas) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("sigmas must be positive and finite");
  }
  if (sigmas[0] != 1.0) throw InvalidArgument("sigma_1 must equal 1");
}

HomogeneousNorm HomogeneousNorm::unit(AlgebraPtr alg, LayerNorm ln) {
  std::vector<double> s(static_cast<std::size_t>(alg->step()), 1.0);
  return HomogeneousNorm(std::move(alg), std::move(s), ln);
}

namespace {

double root(double m, int i) {
  if (i == 1) return m;
  if (i == 2) return std::sqrt(m);
  return std::pow(m, 1.0 / i);
}

void require_norm_member(const HomogeneousNorm& norm, const GradedAlgebra* alg) {
  if (alg != norm.algebra.get()) throw AlgebraMismatch("element does not belong to the norm's algebra " + norm.algebra->name());
}

}  // namespace

double layer_magnitude(const HomogeneousNorm& norm, int layer, std::span<const double> c) {
  const auto& alg = *norm.algebra;
  double m = 0.0;
  if (norm.layer_norm == LayerNorm::Max) {
    for (int i = alg.layer_begin(layer); i < alg.layer_end(layer); ++i) m = std::max(m, std::abs(c[i]));
    return m;
  }
  return ambient_layer_norm(alg, layer, c);
}

double ambient_layer_norm(const GradedAlgebra& alg, int layer, std::span<const double> c) {
  const int b = alg.layer_begin(layer);
  const int e = alg.layer_end(layer);
  if (e - b == 1) return std::abs(c[b]);
  double scale = 0.0;
  for (int i = b; i < e; ++i) scale = std::max(scale, std::abs(c[i]));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (int i = b; i < e; ++i) {
    const double v = c[i] / scale;
    sum += v * v;
  }
  return scale * std::sqrt(sum);
}

double hnorm(const HomogeneousNorm& norm, const Point& x) {
  require_norm_member(norm, x.algebra_ptr());
  double out = 0.0;
  for (int layer = 1; layer <= norm.algebra->step(); ++layer) {
    const double m = layer_magnitude(norm, layer, x.coords());
    if (m > 0.0) out = std::max(out, norm.sigmas[static_cast<std::size_t>(layer) - 1] * root(m, layer));
  }
  return out;
}

double hdist(const HomogeneousNorm& norm, const Point& x, const Point& y) {
  return hnorm(norm, group_product(*norm.algebra, group_inverse(x), y));
}

double hnorm(const HomogeneousNorm& norm, const ExactElement& x) {
  require_norm_member(norm, x.algebra_ptr());
  const auto& alg = *norm.algebra;
  double out = 0.0;
  for (int layer = 1; layer <= alg.step(); ++layer) {
    double m = 0.0;
    if (norm.layer_norm == LayerNorm::Max || alg.layer_dim(layer) == 1) {
      Rational best = 0;
      for (int i = alg.layer_begin(layer); i < alg.layer_end(layer); ++i) best = std::max(best, Rational(abs(x[i])));
      m = to_double(best);
    } else {
      Rational sum = 0;
      for (int i = alg.layer_begin(layer); i < alg.layer_end(layer); ++i) sum += x[i] * x[i];
      m = std::sqrt(to_double(sum));
    }
    if (m > 0.0) out = std::max(out, norm.sigmas[static_cast<std::size_t>(layer) - 1] * root(m, layer));
  }
  return out;
}

double hdist(const HomogeneousNorm& norm, const ExactElement& x, const ExactElement& y) {
  return hnorm(norm, group_product(*norm.algebra, group_inverse(x), y));
}

double ambient_norm(const GradedAlgebra& alg, const Point& x) {
  double out = 0.0;
  for (int layer = 1; layer <= alg.step(); ++layer) out = std::max(out, ambient_layer_norm(alg, layer, x.coords()));
  return out;
}

Point sample_hball(const HomogeneousNorm& norm, double r, std::mt19937_64& rng) {
  const auto& alg = *norm.algebra;
  Point z(alg);
  auto& c = z.mutable_coords();
  for (int layer = 1; layer <= alg.step(); ++layer) {
    const double radius = std::pow(r / norm.sigmas[static_cast<std::size_t>(layer) - 1], layer);
    uniform_in_ball(rng, alg.layer_dim(layer), radius, norm.layer_norm == LayerNorm::Max, c.data() + alg.layer_begin(layer));
  }
  return z;
}

Point sample_hball_about(const HomogeneousNorm& norm, const Point& center, double r, std::mt19937_64& rng) {
  return group_product(*norm.algebra, center, sample_hball(norm, r, rng));
}

Point rescale_to(const HomogeneousNorm& norm, const Point& z, double r) {
  const double n = hnorm(norm, z);
  if (n == 0.0) throw InvalidArgument("cannot rescale the identity to a positive norm");
  Point out = dilate(*norm.algebra, r / n, z);
  return out;
}

Point sample_hsphere(const HomogeneousNorm& norm, double r, std::mt19937_64& rng) {
  Point z = sample_hball(norm, 1.0, rng);
  while (hnorm(norm, z) == 0.0) z = sample_hball(norm, 1.0, rng);
  return rescale_to(norm, z, r);
}

double unit_ball_volume(const HomogeneousNorm& norm) {
  const auto& alg = *norm.algebra;
  double vol = 1.0;
  for (int layer = 1; layer <= alg.step(); ++layer) {
    const int n = alg.layer_dim(layer);
    const double radius = std::pow(1.0 / norm.sigmas[static_cast<std::size_t>(layer) - 1], layer);
    if (norm.layer_norm == LayerNorm::Max) {
      vol *= std::pow(2.0 * radius, n);
    } else {
      const double omega = std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
      vol *= omega * std::pow(radius, n);
    }
  }
  return vol;
}

std::vector<TrianglePair> triangle_sample(const GradedAlgebra& alg, long pairs, std::uint64_t seed) {
  auto shared = std::shared_ptr<const GradedAlgebra>(&alg, [](const GradedAlgebra*) {});
  const HomogeneousNorm unit = HomogeneousNorm::unit(shared);
  std::vector<std::vector<TrianglePair>> parts(kShards);
  run_shards(kShards, [&](int shard) {
    auto rng = shard_rng(seed, static_cast<std::uint64_t>(shard));
    const long count = shard_count(pairs, shard);
    auto& out = parts[static_cast<std::size_t>(shard)];
    out.reserve(static_cast<std::size_t>(count));
    for (long n = 0; n < count; ++n) {
      Point x = sample_hball(unit, 2.0, rng);
      Point y = sample_hball(unit, 2.0, rng);
      const double kind = uniform01(rng);
      if (kind < 0.25 && alg.step() > 1) {
        for (Point* p : {&x, &y}) {
          for (int layer = 1; layer <= alg.step(); ++layer) {
            if (uniform01(rng) < 0.5) {
              for (int i = alg.layer_begin(layer); i < alg.layer_end(layer); ++i) (*p)[i] = 0.0;
            }
          }
        }
      } else if (kind < 0.5) {
        y = dilate(alg, std::pow(10.0, -3.0 * uniform01(rng)), y);
        if (uniform01(rng) < 0.5) std::swap(x, y);
      }
      Point xy = group_product(alg, x, y);
      out.push_back({std::move(x), std::move(y), std::move(xy)});
    }
  });
  std::vector<TrianglePair> all;
  all.reserve(static_cast<std::size_t>(pairs));
  for (auto& p : parts) {
    for (auto& t : p) all.push_back(std::move(t));
  }
  return all;
}

TriangleCheck check_triangle(const HomogeneousNorm& norm, const std::vector<TrianglePair>& pairs) {
  TriangleCheck out;
  for (const auto& p : pairs) {
    const double nx = hnorm(norm, p.x);
    const double ny = hnorm(norm, p.y);
    const double nxy = hnorm(norm, p.xy);
    const double gap = nxy - nx - ny;
    out.residual = std::max(out.residual, gap);
    if (nx + ny == 0.0) continue;
    const double rel = gap / (nx + ny);
    out.worst_relative = std::max(out.worst_relative, rel);
    if (rel > kTriangleSlack) ++out.violations;
  }
  return out;
}

namespace {

bool better(const TriangleCheck& a, const TriangleCheck& b) {
  if (a.violations != b.violations) return a.violations < b.violations;
  return a.worst_relative < b.worst_relative;
}

}  // namespace

CalibrationResult calibrate_sigmas(AlgebraPtr alg, LayerNorm layer_norm, long sample_budget, std::uint64_t seed) {
  if (sample_budget < 1) throw InvalidArgument("calibration needs a positive sample budget");
  CalibrationResult result;
  const int step = alg->step();
  const auto pairs = triangle_sample(*alg, sample_budget, seed);
  result.pairs = sample_budget;

  auto evaluate = [&](const std::vector<double>& s) {
    ++result.candidates_tried;
    return check_triangle(HomogeneousNorm(alg, s, layer_norm), pairs);
  };

  std::vector<double> best_sigmas(static_cast<std::size_t>(step), 1.0);
  TriangleCheck best = evaluate(best_sigmas);
  auto finish = [&](const std::vector<double>& s, const TriangleCheck& check) {
    result.norm = HomogeneousNorm(alg, s, layer_norm);
    result.residual = check.residual;
    result.violation_free = check.violations == 0;
    if (result.violation_free) {
      result.norm.certified_pairs = sample_budget;
    } else {
      result.warnings.push_back("no violation-free sigma found; returning best candidate with " +
                                std::to_string(check.violations) + " violations");
    }
    return result;
  };
  if (best.violations == 0 || step == 1) return finish(best_sigmas, best);

  constexpr int kGridPoints = 40;
  constexpr int kDescentRounds = 12;
  double c = 1.0;
  for (int g = 0; g < kGridPoints; ++g, c *= 0.8) {
    std::vector<double> s(static_cast<std::size_t>(step), c);
    s[0] = 1.0;
    TriangleCheck check = g == 0 ? best : evaluate(s);
    if (check.violations == 0) return finish(s, check);
    if (better(check, best)) {
      best = check;
      best_sigmas = s;
    }
    // Coordinate-wise multiplicative descent from this grid point.
    double factor = 0.9;
    for (int round = 0; round < kDescentRounds; ++round) {
      bool improved = false;
      for (int i = 1; i < step; ++i) {
        for (double f : {factor, 1.0 / factor}) {
          std::vector<double> trial = s;
          trial[static_cast<std::size_t>(i)] *= f;
          const TriangleCheck t = evaluate(trial);
          if (t.violations == 0) return finish(trial, t);
          if (better(t, check)) {
            check = t;
            s = trial;
            improved = true;
          }
        }
      }
      if (better(check, best)) {
        best = check;
        best_sigmas = s;
      }
      if (!improved) factor = std::sqrt(factor);
    }
  }
  return finish(best_sigmas, best);
}

}  // namespace carnot
