#include "carnot/derivative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carnot/sampling.hpp"

namespace carnot {

std::vector<double> Schedule::scales() const {
  if (!(t0 > 0.0) || !(q > 0.0 && q < 1.0) || steps < 1) {
    throw InvalidArgument("schedule needs t0 > 0, 0 < q < 1 and at least one step");
  }
  std::vector<double> out;
  double t = t0;
  for (int k = 0; k < steps; ++k) {
    out.push_back(t);
    t *= q;
  }
  return out;
}

Schedule parse_schedule(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw InvalidArgument("schedule '" + text + "' must be t0:q:steps");
  Schedule s;
  try {
    std::size_t used = 0;
    s.t0 = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("t0");
    s.q = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("q");
    s.steps = std::stoi(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("steps");
  } catch (const std::logic_error&) {
    throw InvalidArgument("schedule '" + text + "' must be t0:q:steps");
  }
  s.scales();
  return s;
}

namespace {

Point horizontal_unit(const GradedAlgebra& alg, const std::vector<double>& normal, double scale) {
  double len = 0.0;
  for (int i = alg.layer_begin(1); i < alg.layer_end(1); ++i) len += normal[static_cast<std::size_t>(i)] * normal[static_cast<std::size_t>(i)];
  len = std::sqrt(len);
  Point w(alg);
  for (int i = alg.layer_begin(1); i < alg.layer_end(1); ++i) w[static_cast<std::size_t>(i)] = scale * normal[static_cast<std::size_t>(i)] / len;
  return w;
}

double dot(const std::vector<double>& n, const Point& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += n[i] * p[i];
  return s;
}

std::optional<Point> halfspace_correction(const DomainSet& A, const Point& q) {
  const auto& hs = A.halfspace_spec();
  if (!hs.horizontal) return std::nullopt;
  const auto& alg = A.alg();
  double len = 0.0;
  for (double v : hs.normal) len += v * v;
  len = std::sqrt(len);
  double lambda = (dot(hs.normal, q) - hs.offset) / len;
  for (int attempt = 0; attempt < 60; ++attempt) {
    lambda = lambda * (1.0 + 1e-12) + std::numeric_limits<double>::min();
    Point w = horizontal_unit(alg, hs.normal, -lambda);
    if (A.contains(group_product(alg, q, w))) return w;
    lambda += std::abs(lambda) * std::ldexp(1.0, -40 + attempt) + std::ldexp(1.0, -1000 + 16 * attempt);
  }
  return std::nullopt;
}

std::optional<Point> hole_correction(const DomainSet& A, const Point& q) {
  const auto idx = A.hole_containing(q);
  if (!idx) return std::nullopt;
  const auto& alg = A.alg();
  const auto& hole = A.hole_spec().holes[*idx];
  Point u = group_product(alg, group_inverse(hole.center), q);
  double nu = hnorm(A.norm(), u);
  if (!(nu > 0.0)) {
    u = basis_vector<double>(alg, 0);
    nu = hnorm(A.norm(), u);
  }
  const double s = hole.radius / nu * (1.0 + 1e-12);
  const Point y = group_product(alg, hole.center, dilate(alg, s, u));
  if (!A.contains(y)) return std::nullopt;
  return group_product(alg, group_inverse(q), y);
}

std::optional<Point> mask_correction(const DomainSet& A, const Point& q) {
  const auto& alg = A.alg();
  Point y = q;
  const auto& excluded = A.mask_spec().excluded;
  for (std::size_t i = 0; i < excluded.size(); ++i) {
    for (const auto& [lo, hi] : excluded[i]) {
      if (y[i] > lo && y[i] < hi) y[i] = (y[i] - lo <= hi - y[i]) ? lo : hi;
    }
  }
  if (!A.contains(y)) return std::nullopt;
  return group_product(alg, group_inverse(q), y);
}

Point shell_correction(const DomainSet& A, const Point& q, double start_radius, std::uint64_t seed) {
  const auto& alg = A.alg();
  auto rng = shard_rng(seed, 0x5348454c4cULL);
  double radius = start_radius;
  std::optional<Point> best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 20; ++step) {
    bool found = false;
    for (int n = 0; n < 1000; ++n) {
      Point w = sample_hball(A.norm(), radius, rng);
      const double nw = hnorm(A.norm(), w);
      if (nw >= best_norm) continue;
      if (!A.contains(group_product(alg, q, w))) continue;
      best = std::move(w);
      best_norm = nw;
      found = true;
    }
    if (found) {
      radius = best_norm;
    } else if (!best) {
      radius *= 2.0;
    }
  }
  if (!best) throw SparseDomainError("no point of the domain found near the target point", best_norm);
  return *best;
}

}  // namespace

ApproxDirection approximate_direction(const DomainSet& A, const Point& x, const Point& zeta, double t,
                                      std::uint64_t seed) {
  if (!(t > 0.0)) throw InvalidArgument("approximate_direction needs t > 0");
  const auto& alg = A.alg();
  if (zeta.algebra_ptr() != &alg || x.algebra_ptr() != &alg) throw AlgebraMismatch("direction and base point must lie in the domain's algebra");
  ApproxDirection out;
  const Point dz = dilate(alg, t, zeta);
  const Point q = group_product(alg, x, dz);
  if (A.contains(q)) {
    out.zeta_t = dz;
    out.correction = Point(alg);
    out.gap = 0.0;
    out.method = "inside";
    return out;
  }
  std::optional<Point> w;
  switch (A.kind()) {
    case DomainKind::Halfspace:
      w = halfspace_correction(A, q);
      out.method = "halfspace";
      break;
    case DomainKind::HoleFamily:
      w = hole_correction(A, q);
      out.method = "hole";
      break;
    case DomainKind::ProductMask:
      w = mask_correction(A, q);
      out.method = "mask";
      break;
    default:
      break;
  }
  if (!w) {
    const double dzn = hnorm(A.norm(), zeta);
    w = shell_correction(A, q, 2.0 * t * std::max(dzn, 1e-12), seed);
    out.method = "shell";
  }
  out.correction = *w;
  out.zeta_t = group_product(alg, dz, *w);
  out.gap = hnorm(A.norm(), *w) / t;
  return out;
}

std::vector<DensitySample> density_index(const DomainSet& A, const Point& x, const std::vector<double>& radii,
                                         long samples, std::uint64_t seed) {
  if (samples <= 0) throw InvalidArgument("density_index needs a positive sample count");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) throw InvalidArgument("radii must be positive and decreasing");
  }
  const auto& alg = A.alg();
  std::vector<DensitySample> out;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    std::vector<long> hits(kShards, 0);
    const std::uint64_t radius_seed = splitmix64(seed + ri);
    run_shards(kShards, [&](int shard) {
      auto rng = shard_rng(radius_seed, static_cast<std::uint64_t>(shard));
      const long count = shard_count(samples, shard);
      long h = 0;
      for (long n = 0; n < count; ++n) {
        if (A.contains(group_product(alg, x, sample_hball(A.norm(), radii[ri], rng)))) ++h;
      }
      hits[static_cast<std::size_t>(shard)] = h;
    });
    long total = 0;
    for (long h : hits) total += h;
    const double p = static_cast<double>(total) / static_cast<double>(samples);
    out.push_back({radii[ri], p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples});
  }
  return out;
}

std::vector<DirectionalDensity> directional_density_index(const DomainSet& A, const Point& x, const Point& zeta,
                                                          const std::vector<double>& t_list, long resolution) {
  if (resolution <= 0) throw InvalidArgument("resolution must be positive");
  const auto& alg = A.alg();
  std::vector<DirectionalDensity> out;
  for (double t : t_list) {
    if (!(t > 0.0)) throw InvalidArgument("directional density scales must be positive");
    long bad = 0;
    for (long i = 0; i < resolution; ++i) {
      const double theta = (static_cast<double>(i) + 0.5) * t / static_cast<double>(resolution);
      if (!A.contains(group_product(alg, x, dilate(alg, theta, zeta)))) ++bad;
    }
    out.push_back({t, static_cast<double>(bad) / static_cast<double>(resolution)});
  }
  return out;
}

namespace {

DerivativeEstimate derivative_impl(const MapUnderTest& f, const Point& x, const Point& zeta,
                                   const ExactElement* exact_zeta, const DerivativeOptions& options) {
  const auto& g = f.source_alg();
  const auto& m = f.target_alg();
  if (x.algebra_ptr() != &g || zeta.algebra_ptr() != &g) throw AlgebraMismatch("base point and direction must lie in the source algebra");
  if (!f.domain.contains(x)) throw InvalidArgument("base point is not in the map's domain");

  DerivativeEstimate est;
  est.direction = zeta;
  est.exact = static_cast<bool>(f.exact_eval);
  est.tolerance = options.relative_tolerance * f.lipschitz * hnorm(f.source, zeta);

  const Point fx = f.eval(x);
  const Point fx_inv = group_inverse(fx);
  double floor = kScaleFloor;
  if (!est.exact) {
    const double kappa = std::max(1.0, ambient_norm(m, fx));
    floor = std::max(floor, std::pow(1e3 * std::numeric_limits<double>::epsilon() * kappa, 1.0 / m.step()));
  }
  ExactElement X, FXinv, Z;
  if (est.exact) {
    X = to_exact(x);
    FXinv = group_inverse(f.exact_eval(X));
    Z = exact_zeta ? *exact_zeta : to_exact(zeta);
  }

  const auto scales = options.schedule.scales();
  for (std::size_t k = 0; k < scales.size(); ++k) {
    const double t = scales[k];
    if (!est.exact && t < floor) {
      ++est.floored;
      continue;
    }
    const auto ad = approximate_direction(f.domain, x, zeta, t, splitmix64(options.seed + k));
    if (est.exact) {
      const Rational T = exact_from_double(t);
      ExactElement zt = dilate(g, T, Z);
      if (!ad.correction.is_zero()) zt = group_product(g, zt, to_exact(ad.correction));
      ExactElement q = group_product(m, FXinv, f.exact_eval(group_product(g, X, zt)));
      q = dilate(m, Rational(1 / T), q);
      est.quotients.push_back(to_double(q));
      if (!est.exact_quotients.empty()) est.increments.push_back(hdist(f.target, est.exact_quotients.back(), q));
      else est.increments.push_back(0.0);
      est.exact_quotients.push_back(std::move(q));
    } else {
      Point q = group_product(m, fx_inv, f.eval(group_product(g, x, ad.zeta_t)));
      q = dilate(m, 1.0 / t, q);
      est.increments.push_back(est.quotients.empty() ? 0.0 : hdist(f.target, est.quotients.back(), q));
      est.quotients.push_back(std::move(q));
    }
    est.scales.push_back(t);
    est.gaps.push_back(ad.gap);
  }
  if (est.quotients.empty()) throw InvalidArgument("every schedule scale lies below the floating-point floor");
  est.limit = est.quotients.back();
  const std::size_t n = est.quotients.size();
  if (n >= 3) {
    double r = 0.0;
    for (std::size_t i = n - 3; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        r = std::max(r, est.exact ? hdist(f.target, est.exact_quotients[i], est.exact_quotients[j])
                                  : hdist(f.target, est.quotients[i], est.quotients[j]));
      }
    }
    est.residual = r;
    est.converged = r <= est.tolerance;
  } else {
    est.residual = std::numeric_limits<double>::infinity();
    est.converged = false;
  }
  return est;
}

}  // namespace

DerivativeEstimate directional_derivative(const MapUnderTest& f, const Point& x, const Point& zeta,
                                          const DerivativeOptions& options) {
  return derivative_impl(f, x, zeta, nullptr, options);
}

DerivativeEstimate directional_derivative(const MapUnderTest& f, const Point& x, const ExactElement& zeta,
                                          const DerivativeOptions& options) {
  if (zeta.algebra_ptr() != &f.source_alg()) throw AlgebraMismatch("direction must lie in the source algebra");
  return derivative_impl(f, x, to_double(zeta), &zeta, options);
}

namespace {

ExactElement exact_limit(const DerivativeEstimate& e) {
  return e.exact_quotients.empty() ? to_exact(e.limit) : e.exact_quotients.back();
}

double limit_distance(const HomogeneousNorm& norm, const DerivativeEstimate& e, const ExactElement& predicted) {
  if (e.exact) return hdist(norm, exact_limit(e), predicted);
  return hdist(norm, e.limit, to_double(predicted));
}

}  // namespace

PansuFit fit_pansu_differential(const MapUnderTest& f, const Point& x, const DerivativeOptions& options) {
  const auto& g = f.source_alg();
  const auto& m = f.target_alg();
  if (!g.is_stratified()) throw InvalidArgument("source algebra " + g.name() + " is not stratified");
  if (!f.domain.contains(x)) throw InvalidArgument("base point is not in the map's domain");
  PansuFit fit;
  fit.base = x;
  fit.all_converged = true;

  const int n1 = g.layer_dim(1);
  const int m1 = m.layer_dim(1);
  RationalMatrix first(static_cast<std::size_t>(m1), std::vector<Rational>(static_cast<std::size_t>(n1), Rational(0)));
  fit.first_layer.assign(static_cast<std::size_t>(m1), std::vector<double>(static_cast<std::size_t>(n1), 0.0));
  for (int k = 0; k < n1; ++k) {
    const ExactElement e = basis_vector<Rational>(g, g.layer_begin(1) + k);
    auto est = directional_derivative(f, x, e, options);
    if (!est.converged) {
      fit.all_converged = false;
      if (fit.failure.empty()) fit.failure = "derivative along " + g.labels()[static_cast<std::size_t>(k)] + " did not converge";
    }
    const ExactElement lim = exact_limit(est);
    for (int r = 0; r < m1; ++r) {
      first[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = lim[static_cast<std::size_t>(m.layer_begin(1) + r)];
      fit.first_layer[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = carnot::to_double(lim[static_cast<std::size_t>(m.layer_begin(1) + r)]);
    }
    fit.horizontal.push_back(std::move(est));
  }

  const bool exact = static_cast<bool>(f.exact_eval);
  const double ext_tol = exact ? 0.0 : options.relative_tolerance * std::pow(std::max(1.0, f.lipschitz), m.step());
  try {
    fit.differential = hhom_from_horizontal(f.source.algebra, f.target.algebra, first, ext_tol);
    fit.consistent = true;
  } catch (const InconsistentExtension& e) {
    fit.consistent = false;
    if (fit.failure.empty()) fit.failure = std::string("inconsistent extension: ") + e.what();
  }

  if (fit.differential) {
    const HHom& L = *fit.differential;
    for (int layer = 2; layer <= g.step(); ++layer) {
      const ExactElement e = basis_vector<Rational>(g, g.layer_begin(layer));
      auto est = directional_derivative(f, x, e, options);
      CrossCheck c;
      c.kind = "layer";
      c.direction = to_double(e);
      c.measured = est.limit;
      const ExactElement predicted = L.apply(e);
      c.predicted = to_double(predicted);
      c.converged = est.converged;
      c.discrepancy = limit_distance(f.target, est, predicted);
      c.tolerance = 2.0 * std::max(est.tolerance, est.residual);
      c.passed = est.converged && c.discrepancy <= c.tolerance;
      fit.checks.push_back(std::move(c));
    }
    const ExactElement zeta = basis_vector<Rational>(g, g.layer_begin(1));
    const DerivativeEstimate& base = fit.horizontal.front();
    for (const char* a_text : {"1/2", "2"}) {
      const Rational a = parse_rational(a_text);
      auto est = directional_derivative(f, x, dilate(g, a, zeta), options);
      CrossCheck c;
      c.kind = "dilation";
      c.direction = to_double(zeta);
      c.a = carnot::to_double(a);
      c.measured = est.limit;
      const ExactElement predicted = dilate(m, a, exact_limit(base));
      c.predicted = to_double(predicted);
      c.converged = est.converged;
      c.discrepancy = limit_distance(f.target, est, predicted);
      c.tolerance = 2.0 * std::max(est.tolerance, base.tolerance * c.a);
      c.passed = est.converged && c.discrepancy <= c.tolerance;
      fit.checks.push_back(std::move(c));
    }
  }
  bool checks_ok = true;
  for (const auto& c : fit.checks) {
    if (!c.passed) {
      checks_ok = false;
      if (fit.failure.empty()) fit.failure = c.kind + " cross-check failed (discrepancy " + std::to_string(c.discrepancy) + ")";
    }
  }
  fit.passed = fit.all_converged && fit.consistent && checks_ok;
  return fit;
}

std::vector<ResidualSample> differentiability_residual(const MapUnderTest& f, const Point& x, const HHom& L,
                                                       const std::vector<double>& radii, long samples,
                                                       std::uint64_t seed) {
  const auto& g = f.source_alg();
  const auto& m = f.target_alg();
  if (L.source_ptr().get() != &g || L.target_ptr().get() != &m) throw AlgebraMismatch("differential does not match the map's algebras");
  if (!f.domain.contains(x)) throw InvalidArgument("base point is not in the map's domain");
  if (samples <= 0) throw InvalidArgument("differentiability_residual needs a positive sample count");
  const bool exact = static_cast<bool>(f.exact_eval);
  const Point fx_inv = group_inverse(f.eval(x));
  ExactElement X, FXinv;
  if (exact) {
    X = to_exact(x);
    FXinv = group_inverse(f.exact_eval(X));
  }
  std::vector<ResidualSample> out;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    if (!(r > 0.0)) throw InvalidArgument("radii must be positive");
    std::vector<double> worst(kShards, 0.0);
    std::vector<long> admissible(kShards, 0);
    const std::uint64_t radius_seed = splitmix64(seed + ri);
    run_shards(kShards, [&](int shard) {
      auto rng = shard_rng(radius_seed, static_cast<std::uint64_t>(shard));
      const long count = shard_count(samples, shard);
      for (long n = 0; n < count; ++n) {
        const Point z = sample_hball(f.source, r, rng);
        const double dz = hnorm(f.source, z);
        if (!(dz > 0.0)) continue;
        const Point xz = group_product(g, x, z);
        if (!f.domain.contains(xz)) continue;
        double rho;
        if (exact) {
          const ExactElement Zx = to_exact(z);
          rho = hdist(f.target, group_product(m, FXinv, f.exact_eval(group_product(g, X, Zx))), L.apply(Zx));
        } else {
          rho = hdist(f.target, group_product(m, fx_inv, f.eval(xz)), L.apply(z));
        }
        auto& w = worst[static_cast<std::size_t>(shard)];
        w = std::max(w, rho / dz);
        ++admissible[static_cast<std::size_t>(shard)];
      }
    });
    ResidualSample s;
    s.radius = r;
    for (int sh = 0; sh < kShards; ++sh) {
      s.residual = std::max(s.residual, worst[static_cast<std::size_t>(sh)]);
      s.admissible += admissible[static_cast<std::size_t>(sh)];
    }
    s.inconclusive = s.admissible == 0;
    out.push_back(s);
  }
  return out;
}

CompositionReport composition_check(const MapUnderTest& f, const Point& x, const Point& zeta, const Point& eta,
                                    double a, double b, const DerivativeOptions& options) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("composition_check needs a > 0 and b > 0");
  const auto& g = f.source_alg();
  const auto& m = f.target_alg();
  CompositionReport rep;
  const bool exact = static_cast<bool>(f.exact_eval);
  if (exact) {
    const Rational A = exact_from_double(a);
    const Rational B = exact_from_double(b);
    const ExactElement Z = to_exact(zeta);
    const ExactElement E = to_exact(eta);
    rep.zeta = directional_derivative(f, x, Z, options);
    rep.eta = directional_derivative(f, x, E, options);
    rep.product = directional_derivative(f, x, group_product(g, dilate(g, A, Z), dilate(g, B, E)), options);
  } else {
    rep.zeta = directional_derivative(f, x, zeta, options);
    rep.eta = directional_derivative(f, x, eta, options);
    rep.product = directional_derivative(f, x, group_product(g, dilate(g, a, zeta), dilate(g, b, eta)), options);
  }
  for (const auto* e : {&rep.zeta, &rep.eta, &rep.product}) {
    if (!e->converged) {
      std::ostringstream os;
      os << "directional derivative did not converge (residual " << e->residual << ", tolerance " << e->tolerance << ")";
      throw NonConvergence(os.str());
    }
  }
  const Rational A = exact_from_double(a);
  const Rational B = exact_from_double(b);
  const std::size_t n = std::min({rep.zeta.quotients.size(), rep.eta.quotients.size(), rep.product.quotients.size()});
  for (std::size_t k = 0; k < n; ++k) {
    if (rep.zeta.scales[k] != rep.product.scales[k] || rep.eta.scales[k] != rep.product.scales[k]) {
      throw InvalidArgument("composition estimates use different scales");
    }
    double d;
    if (exact) {
      const ExactElement predicted = group_product(m, dilate(m, A, rep.zeta.exact_quotients[k]), dilate(m, B, rep.eta.exact_quotients[k]));
      d = hdist(f.target, rep.product.exact_quotients[k], predicted);
    } else {
      const Point predicted = group_product(m, dilate(m, a, rep.zeta.quotients[k]), dilate(m, b, rep.eta.quotients[k]));
      d = hdist(f.target, rep.product.quotients[k], predicted);
    }
    rep.scales.push_back(rep.zeta.scales[k]);
    rep.per_scale.push_back(d);
  }
  rep.discrepancy = rep.per_scale.back();
  return rep;
}

}  // namespace carnot
