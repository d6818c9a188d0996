#include "carnot/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "carnot/sampling.hpp"

namespace carnot {

namespace {

struct Candidate {
  double ratio = -1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<Point> free;
  int shard = 0;
  long index = 0;
};

bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.ratio != b.ratio) return a.ratio > b.ratio;
  if (a.shard != b.shard) return a.shard < b.shard;
  return a.index < b.index;
}

// Layer-direction flavours for boundary samples.
enum class Direction { Random, Axis, Diagonal };

void fill_layer(const GradedAlgebra& alg, int layer, double euclidean_radius, Direction kind, std::mt19937_64& rng,
                Point& x) {
  const int n = alg.layer_dim(layer);
  std::vector<double> dir;
  if (kind == Direction::Random) {
    dir = unit_direction(rng, n);
  } else if (kind == Direction::Axis) {
    dir.assign(static_cast<std::size_t>(n), 0.0);
    dir[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, n - 1)(rng))] = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  } else {
    for (int i = 0; i < n; ++i) dir.push_back((uniform01(rng) < 0.5 ? -1.0 : 1.0) / std::sqrt(static_cast<double>(n)));
  }
  for (int i = 0; i < n; ++i) x[alg.layer_begin(layer) + i] = euclidean_radius * dir[static_cast<std::size_t>(i)];
}

// Uniform in the ambient ball {|x| <= r}: a product of Euclidean layer balls.
Point sample_ambient_ball(const GradedAlgebra& alg, double r, std::mt19937_64& rng) {
  Point x(alg);
  for (int layer = 1; layer <= alg.step(); ++layer) {
    uniform_in_ball(rng, alg.layer_dim(layer), r, false, x.mutable_coords().data() + alg.layer_begin(layer));
  }
  return x;
}

double log_uniform(std::mt19937_64& rng, double lo_exp10, double hi_exp10) {
  return std::pow(10.0, lo_exp10 + (hi_exp10 - lo_exp10) * uniform01(rng));
}

void clip_hball(const HomogeneousNorm& norm, Point& z, double b) {
  const double n = hnorm(norm, z);
  if (n > b) z = dilate(*norm.algebra, b / n, z);
}

void clip_ambient(const GradedAlgebra& alg, Point& z, double b) {
  for (int layer = 1; layer <= alg.step(); ++layer) {
    const double m = ambient_layer_norm(alg, layer, z.coords());
    if (m > b) {
      for (int i = alg.layer_begin(layer); i < alg.layer_end(layer); ++i) z[i] *= b / m;
    }
  }
}

Point perturb(const HomogeneousNorm& norm, const Point& z, double step, std::mt19937_64& rng) {
  const double scale = std::max(hnorm(norm, z), 1e-12) * step;
  const Point g = sample_hball(norm, scale, rng);
  return add(z, g);
}

double nu_root(double v, int nu) { return nu == 1 ? v : std::pow(v, 1.0 / nu); }

std::pair<double, double> eval_product(const HomogeneousNorm& norm, int N, const std::vector<Point>& in) {
  const auto& alg = *norm.algebra;
  const std::span<const Point> all(in);
  const Point pa = product_of<double>(alg, all.subspan(0, static_cast<std::size_t>(N)));
  const Point pb = product_of<double>(alg, all.subspan(static_cast<std::size_t>(N), static_cast<std::size_t>(N)));
  const double lhs = hdist(norm, pa, pb);
  double rhs = 0.0;
  for (int j = 0; j < N; ++j) rhs += nu_root(hdist(norm, in[static_cast<std::size_t>(j)], in[static_cast<std::size_t>(N + j)]), alg.step());
  return {lhs, rhs};
}

std::pair<double, double> eval_conjugation(const HomogeneousNorm& norm, const std::vector<Point>& in) {
  const auto& alg = *norm.algebra;
  const Point& x = in[0];
  const Point& y = in[1];
  const double lhs = hnorm(norm, group_product(alg, group_product(alg, group_inverse(x), y), x));
  const double dx = hnorm(norm, x);
  const double dy = hnorm(norm, y);
  const double s = alg.step();
  const double rhs = dy + std::pow(dx, 1.0 / s) * std::pow(dy, (s - 1.0) / s) + std::pow(dx, (s - 1.0) / s) * std::pow(dy, 1.0 / s);
  return {lhs, rhs};
}

std::pair<double, double> eval_c1(const HomogeneousNorm& norm, const std::vector<Point>& in) {
  return {hnorm(norm, in[0]), nu_root(ambient_norm(*norm.algebra, in[0]), norm.algebra->step())};
}

std::pair<double, double> eval_c2(const HomogeneousNorm& norm, const std::vector<Point>& in) {
  return {ambient_norm(*norm.algebra, in[0]), 1.0};
}

std::pair<double, double> eval_c3(const HomogeneousNorm& norm, const std::vector<Point>& in) {
  return {ambient_norm(*norm.algebra, in[0]), hnorm(norm, in[0])};
}

std::pair<double, double> eval_c4(const HomogeneousNorm& norm, const std::vector<Point>& in) {
  const auto& alg = *norm.algebra;
  const Point& x = in[0];
  const Point& y = in[1];
  const double lhs = hnorm(norm, group_product(alg, group_product(alg, group_inverse(y), x), y));
  return {lhs, nu_root(ambient_norm(alg, x), alg.step())};
}

std::vector<Point> identity_present(const std::vector<Point>& v) { return v; }

}  // namespace

ConstantReport maximize_ratio(const HomogeneousNorm& norm, const RatioProblem& problem, const SearchSettings& settings) {
  if (settings.samples < 1) throw InvalidArgument("sample count must be positive");
  const int keep = std::max(settings.polish_candidates, 1);
  struct ShardResult {
    std::vector<Candidate> top;
    long skipped = 0;
    long zero = 0;
  };
  std::vector<ShardResult> shards(kShards);
  run_shards(kShards, [&](int shard) {
    auto rng = shard_rng(settings.seed, static_cast<std::uint64_t>(shard));
    auto& out = shards[static_cast<std::size_t>(shard)];
    const long count = shard_count(settings.samples, shard);
    long index = 0;
    for (int s = 0; s < shard; ++s) index += shard_count(settings.samples, s);
    for (long n = 0; n < count; ++n, ++index) {
      Candidate c;
      c.free = problem.sample(rng, index);
      c.shard = shard;
      c.index = index;
      std::tie(c.lhs, c.rhs) = problem.evaluate(problem.present(c.free));
      if (c.rhs == 0.0) {
        if (c.lhs == 0.0) ++out.zero; else ++out.skipped;
        continue;
      }
      c.ratio = c.lhs / c.rhs;
      if (static_cast<int>(out.top.size()) < keep || ranks_before(c, out.top.back())) {
        out.top.push_back(std::move(c));
        std::sort(out.top.begin(), out.top.end(), ranks_before);
        if (static_cast<int>(out.top.size()) > keep) out.top.pop_back();
      }
    }
  });

  ConstantReport report;
  report.samples = settings.samples;
  report.seed = settings.seed;
  std::vector<Candidate> merged;
  for (auto& s : shards) {
    report.skipped += s.skipped;
    report.consistent_zero += s.zero;
    for (auto& c : s.top) merged.push_back(std::move(c));
  }
  std::sort(merged.begin(), merged.end(), ranks_before);
  if (static_cast<int>(merged.size()) > keep) merged.resize(static_cast<std::size_t>(keep));

  const int polish = settings.polish_iterations > 0 ? static_cast<int>(merged.size()) : 0;
  std::vector<long> evaluations(merged.size(), 0);
  run_shards(polish, [&](int k) {
    auto rng = shard_rng(settings.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(1000 + k));
    Candidate& c = merged[static_cast<std::size_t>(k)];
    double step = 0.3;
    int failures = 0;
    for (int it = 0; it < settings.polish_iterations && step > settings.min_step; ++it) {
      std::vector<Point> trial = c.free;
      const auto which = std::uniform_int_distribution<std::size_t>(0, trial.size() - 1)(rng);
      trial[which] = perturb(norm, trial[which], step, rng);
      problem.project(trial);
      const auto [lhs, rhs] = problem.evaluate(problem.present(trial));
      ++evaluations[static_cast<std::size_t>(k)];
      if (rhs > 0.0 && lhs / rhs > c.ratio) {
        c.free = std::move(trial);
        c.lhs = lhs;
        c.rhs = rhs;
        c.ratio = lhs / rhs;
        failures = 0;
      } else if (++failures >= 20) {
        step *= 0.5;
        failures = 0;
      }
    }
  });
  for (long e : evaluations) report.polish_evaluations += e;
  std::sort(merged.begin(), merged.end(), ranks_before);

  report.witness.names = problem.names;
  if (!merged.empty()) {
    const Candidate& best = merged.front();
    report.empirical = best.ratio;
    report.witness.inputs = problem.present(best.free);
    report.witness.lhs = best.lhs;
    report.witness.rhs = best.rhs;
  }
  return report;
}

ConstantReport check_product_perturbation(const HomogeneousNorm& norm, int N, double b, long samples, std::uint64_t seed) {
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (!(b > 0.0)) throw InvalidArgument("b must be positive");
  const auto& alg = *norm.algebra;
  RatioProblem p;
  for (int j = 1; j <= N; ++j) p.names.push_back("A_" + std::to_string(j));
  for (int j = 1; j <= N; ++j) p.names.push_back("B_" + std::to_string(j));
  // Free variables: suffix products S_1..S_N and increments h_1..h_N, so that
  // B_j = S_j S_{j+1}^{-1} and A_j = B_j h_j meet the hypotheses by construction.
  p.sample = [&, N, b](std::mt19937_64& rng, long index) {
    std::vector<Point> v;
    for (int j = 0; j < N; ++j) {
      if (index == 0) {
        v.emplace_back(alg);
        continue;
      }
      Point s = sample_hball(norm, b, rng);
      if (uniform01(rng) < 0.25 && hnorm(norm, s) > 0.0) s = rescale_to(norm, s, b);
      v.push_back(std::move(s));
    }
    for (int j = 0; j < N; ++j) {
      if (index == 0) {
        v.emplace_back(alg);
        continue;
      }
      Point h = sample_hball(norm, b, rng);
      if (uniform01(rng) < 0.5 && hnorm(norm, h) > 0.0) h = rescale_to(norm, h, b * log_uniform(rng, -6.0, 0.0));
      v.push_back(std::move(h));
    }
    return v;
  };
  p.project = [&, b](std::vector<Point>& v) {
    for (auto& z : v) clip_hball(norm, z, b);
  };
  p.present = [&, N](const std::vector<Point>& v) {
    std::vector<Point> a, bs;
    for (int j = 0; j < N; ++j) {
      const Point next = j + 1 < N ? v[static_cast<std::size_t>(j + 1)] : Point(alg);
      bs.push_back(group_product(alg, v[static_cast<std::size_t>(j)], group_inverse(next)));
    }
    for (int j = 0; j < N; ++j) a.push_back(group_product(alg, bs[static_cast<std::size_t>(j)], v[static_cast<std::size_t>(N + j)]));
    for (auto& x : bs) a.push_back(std::move(x));
    return a;
  };
  p.evaluate = [&, N](const std::vector<Point>& in) { return eval_product(norm, N, in); };
  ConstantReport r = maximize_ratio(norm, p, {samples, seed, 8, 400});
  r.lemma = "product-perturbation";
  r.name = "C_b";
  r.b = b;
  r.N = N;
  return r;
}

ConstantReport check_conjugation_bound(const HomogeneousNorm& norm, long samples, std::uint64_t seed) {
  const auto& alg = *norm.algebra;
  RatioProblem p;
  p.names = {"x", "y"};
  p.sample = [&](std::mt19937_64& rng, long index) {
    Point y = sample_hball(norm, 1.0, rng);
    while (hnorm(norm, y) == 0.0) y = sample_hball(norm, 1.0, rng);
    y = rescale_to(norm, y, log_uniform(rng, -4.0, 4.0));
    Point x = index == 0 ? Point(alg) : sample_hball(norm, 1.0, rng);
    if (index != 0 && uniform01(rng) < 0.5 && hnorm(norm, x) > 0.0) x = rescale_to(norm, x, 1.0);
    return std::vector<Point>{std::move(x), std::move(y)};
  };
  p.project = [](std::vector<Point>&) {};
  p.present = identity_present;
  p.evaluate = [&](const std::vector<Point>& in) { return eval_conjugation(norm, in); };
  ConstantReport r = maximize_ratio(norm, p, {samples, seed, 8, 400});
  r.lemma = "conjugation";
  r.name = "D";
  r.b = 0.0;
  return r;
}

ConstantReport empirical_c1(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed) {
  const auto& alg = *norm.algebra;
  RatioProblem p;
  p.names = {"x"};
  p.sample = [&, b](std::mt19937_64& rng, long) {
    const double kind = uniform01(rng);
    if (kind < 0.25) {
      Point x(alg);
      fill_layer(alg, std::uniform_int_distribution<int>(1, alg.step())(rng), b, Direction::Axis, rng, x);
      return std::vector<Point>{x};
    }
    Point x = sample_ambient_ball(alg, b, rng);
    if (kind < 0.5) {
      const double s = log_uniform(rng, -6.0, 0.0);
      for (auto& c : x.mutable_coords()) c *= s;
    }
    return std::vector<Point>{x};
  };
  p.project = [&, b](std::vector<Point>& v) { clip_ambient(alg, v[0], b); };
  p.present = identity_present;
  p.evaluate = [&](const std::vector<Point>& in) { return eval_c1(norm, in); };
  ConstantReport r = maximize_ratio(norm, p, {samples, seed, 4, 200});
  r.lemma = "norm-equivalence";
  r.name = "C_{1,b}";
  r.b = b;
  return r;
}

ConstantReport empirical_c2(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed) {
  const auto& alg = *norm.algebra;
  const Direction boundary = norm.layer_norm == LayerNorm::Max ? Direction::Diagonal : Direction::Random;
  RatioProblem p;
  p.names = {"x"};
  p.sample = [&, b](std::mt19937_64& rng, long) {
    if (uniform01(rng) < 0.25) {
      Point x(alg);
      const int layer = std::uniform_int_distribution<int>(1, alg.step())(rng);
      const double m = std::pow(b / norm.sigmas[static_cast<std::size_t>(layer) - 1], layer);
      const double kappa = boundary == Direction::Diagonal ? std::sqrt(static_cast<double>(alg.layer_dim(layer))) : 1.0;
      fill_layer(alg, layer, kappa * m, boundary, rng, x);
      return std::vector<Point>{x};
    }
    return std::vector<Point>{sample_hball(norm, b, rng)};
  };
  p.project = [&, b](std::vector<Point>& v) { clip_hball(norm, v[0], b); };
  p.present = identity_present;
  p.evaluate = [&](const std::vector<Point>& in) { return eval_c2(norm, in); };
  ConstantReport r = maximize_ratio(norm, p, {samples, seed, 4, 200});
  r.lemma = "norm-equivalence";
  r.name = "C_{2,b}";
  r.b = b;
  return r;
}

ConstantReport empirical_c3(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed) {
  const auto& alg = *norm.algebra;
  const Direction boundary = norm.layer_norm == LayerNorm::Max ? Direction::Diagonal : Direction::Random;
  RatioProblem p;
  p.names = {"x"};
  p.sample = [&, b](std::mt19937_64& rng, long) {
    if (uniform01(rng) < 0.25) {
      Point x(alg);
      fill_layer(alg, std::uniform_int_distribution<int>(1, alg.step())(rng), b, boundary, rng, x);
      return std::vector<Point>{x};
    }
    return std::vector<Point>{sample_ambient_ball(alg, b, rng)};
  };
  p.project = [&, b](std::vector<Point>& v) { clip_ambient(alg, v[0], b); };
  p.present = identity_present;
  p.evaluate = [&](const std::vector<Point>& in) { return eval_c3(norm, in); };
  ConstantReport r = maximize_ratio(norm, p, {samples, seed, 4, 200});
  r.lemma = "norm-equivalence";
  r.name = "C_{3,b}";
  r.b = b;
  return r;
}

ConstantReport empirical_c4(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed) {
  const auto& alg = *norm.algebra;
  RatioProblem p;
  p.names = {"x", "y"};
  p.sample = [&, b](std::mt19937_64& rng, long) {
    Point x = sample_ambient_ball(alg, b, rng);
    if (uniform01(rng) < 0.5) {
      const double s = log_uniform(rng, -8.0, 0.0);
      for (auto& c : x.mutable_coords()) c *= s;
    }
    Point y = sample_ambient_ball(alg, b, rng);
    // Boundary layers: the supremum sits where several layers are saturated.
    for (Point* p : {&x, &y}) {
      if (uniform01(rng) < 0.5) {
        for (int layer = 1; layer <= alg.step(); ++layer) {
          if (uniform01(rng) < 0.5) fill_layer(alg, layer, b, Direction::Random, rng, *p);
        }
      }
    }
    return std::vector<Point>{std::move(x), std::move(y)};
  };
  p.project = [&, b](std::vector<Point>& v) {
    clip_ambient(alg, v[0], b);
    clip_ambient(alg, v[1], b);
  };
  p.present = identity_present;
  p.evaluate = [&](const std::vector<Point>& in) { return eval_c4(norm, in); };
  ConstantReport r = maximize_ratio(norm, p, {samples, seed, 16, 2000, 1e-10});
  r.lemma = "norm-equivalence";
  r.name = "C_{4,b}";
  r.b = b;
  return r;
}

std::vector<ConstantReport> norm_equivalence_constants(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed) {
  if (!(b > 0.0)) throw InvalidArgument("b must be positive");
  return {empirical_c1(norm, b, samples, seed), empirical_c2(norm, b, samples, seed + 1),
          empirical_c3(norm, b, samples, seed + 2), empirical_c4(norm, b, samples, seed + 3)};
}

double reevaluate_ratio(const HomogeneousNorm& norm, const ConstantReport& report) {
  const auto& in = report.witness.inputs;
  std::pair<double, double> v;
  if (report.name == "C_b") v = eval_product(norm, report.N, in);
  else if (report.name == "D") v = eval_conjugation(norm, in);
  else if (report.name == "C_{1,b}") v = eval_c1(norm, in);
  else if (report.name == "C_{2,b}") v = eval_c2(norm, in);
  else if (report.name == "C_{3,b}") v = eval_c3(norm, in);
  else if (report.name == "C_{4,b}") v = eval_c4(norm, in);
  else throw InvalidArgument("unknown constant '" + report.name + "'");
  return v.first / v.second;
}

AnalyticConstants analytic_constants(const HomogeneousNorm& norm, double b) {
  if (!(b > 0.0)) throw InvalidArgument("b must be positive");
  const auto& alg = *norm.algebra;
  const int nu = alg.step();
  AnalyticConstants c;
  for (int k = 1; k <= nu; ++k) {
    const double sigma = norm.sigmas[static_cast<std::size_t>(k) - 1];
    const double kappa = norm.layer_norm == LayerNorm::Max ? std::sqrt(static_cast<double>(alg.layer_dim(k))) : 1.0;
    c.c1 = std::max(c.c1, sigma * std::pow(b, 1.0 / k - 1.0 / nu));
    c.c2 = std::max(c.c2, kappa * std::pow(b / sigma, k));
    c.c3 = std::max(c.c3, kappa * std::pow(b, 1.0 - 1.0 / k) / sigma);
  }
  return c;
}

PipelineConstant pipeline_constant(const HomogeneousNorm& norm, double b, long samples, std::uint64_t seed) {
  const int nu = norm.algebra->step();
  PipelineConstant p;
  p.b = b;
  p.big_b = analytic_constants(norm, b).c2;
  p.c3 = analytic_constants(norm, p.big_b).c3;
  p.c4 = empirical_c4(norm, p.big_b, samples, seed);
  p.value = std::max(std::pow(b, 1.0 - 1.0 / nu), p.c4.empirical * nu_root(p.c3, nu));
  return p;
}

}  // namespace carnot
