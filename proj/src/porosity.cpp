#include "carnot/porosity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carnot/lemmas.hpp"
#include "carnot/sampling.hpp"

namespace carnot {

Certificate certify_ball(const DomainSet& E, const Point& center, double radius, long budget, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidArgument("certified balls need a positive radius");
  if (budget <= 0) throw InvalidArgument("certificate budget must be positive");
  const auto& alg = E.alg();
  std::vector<long> hits(kShards, 0);
  run_shards(kShards, [&](int shard) {
    auto rng = shard_rng(seed, static_cast<std::uint64_t>(shard));
    const long count = shard_count(budget, shard);
    long h = 0;
    for (long n = 0; n < count; ++n) {
      if (E.contains(group_product(alg, center, sample_hball(E.norm(), radius, rng)))) ++h;
    }
    hits[static_cast<std::size_t>(shard)] = h;
  });
  Certificate c;
  c.samples = budget;
  c.seed = seed;
  for (long h : hits) c.hits += h;
  return c;
}

std::vector<HoleWitness> ProbeReport::witnesses() const {
  std::vector<HoleWitness> out;
  for (const auto& s : scales) {
    if (s.witness) out.push_back(*s.witness);
  }
  return out;
}

namespace {

struct CandidateCenter {
  Point x;
  bool closed_form = false;
  double margin = 0.0;
};

double dual_layer1_norm(const HomogeneousNorm& norm, const std::vector<double>& n) {
  const auto& alg = *norm.algebra;
  double s = 0.0;
  for (int i = alg.layer_begin(1); i < alg.layer_end(1); ++i) {
    const double v = n[static_cast<std::size_t>(i)];
    s += norm.layer_norm == LayerNorm::Max ? std::abs(v) : v * v;
  }
  return norm.layer_norm == LayerNorm::Max ? s : std::sqrt(s);
}

std::vector<CandidateCenter> descriptor_candidates(const DomainSet& E, const Point& a, double lambda, double r) {
  const auto& alg = E.alg();
  const auto& norm = E.norm();
  std::vector<CandidateCenter> out;
  if (E.kind() == DomainKind::Halfspace && E.halfspace_spec().horizontal) {
    const auto& hs = E.halfspace_spec();
    Point w(alg);
    for (int i = alg.layer_begin(1); i < alg.layer_end(1); ++i) w[static_cast<std::size_t>(i)] = hs.normal[static_cast<std::size_t>(i)];
    w = rescale_to(norm, w, r);
    CandidateCenter c;
    c.x = group_product(alg, a, w);
    double s = 0.0;
    for (std::size_t i = 0; i < c.x.size(); ++i) s += hs.normal[i] * c.x[i];
    c.margin = s - lambda * r * dual_layer1_norm(norm, hs.normal) - hs.offset;
    c.closed_form = c.margin >= 0.0;
    out.push_back(std::move(c));
  } else if (E.kind() == DomainKind::HoleFamily) {
    for (const auto& hole : E.hole_spec().holes) {
      const Point u = group_product(alg, group_inverse(a), hole.center);
      const double du = hnorm(norm, u);
      if (!(du > 0.0)) continue;
      CandidateCenter c;
      c.x = group_product(alg, a, dilate(alg, r / du, u));
      c.margin = hole.radius - hdist(norm, hole.center, c.x) - lambda * r;
      if (c.margin < -hole.radius) continue;
      c.closed_form = c.margin >= 0.0;
      out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const CandidateCenter& l, const CandidateCenter& rr) { return l.margin > rr.margin; });
    if (out.size() > 8) out.resize(8);
  }
  return out;
}

}  // namespace

ProbeReport porosity_probe(const DomainSet& E, const Point& a, double lambda, const std::vector<double>& radii,
                           long sampler_budget, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw InvalidArgument("porosity constant must be positive");
  if (sampler_budget <= 0) throw InvalidArgument("sampler budget must be positive");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] < radii[i - 1]))) throw InvalidArgument("radii must be positive and decreasing");
  }
  const auto& alg = E.alg();
  if (a.algebra_ptr() != &alg) throw AlgebraMismatch("probe point must lie in the set's algebra");
  ProbeReport rep;
  rep.anchor = a;
  rep.lambda = lambda;
  rep.budget = sampler_budget;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    const std::uint64_t scale_seed = splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (ri + 1)));
    ProbeScale ps;
    ps.radius = r;
    auto candidates = descriptor_candidates(E, a, lambda, r);
    auto rng = shard_rng(scale_seed, 0xCA4D);
    for (int n = 0; n < 32; ++n) candidates.push_back({group_product(alg, a, sample_hsphere(E.norm(), r, rng)), false, 0.0});
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
      const auto& cand = candidates[ci];
      ++ps.candidates;
      const double d = hdist(E.norm(), a, cand.x);
      const double ball = lambda * d;
      if (!(ball > 0.0)) continue;
      if (!cand.closed_form) {
        // Cheap screen before the full certificate.
        if (!certify_ball(E, cand.x, ball, 64, splitmix64(scale_seed + 2 * ci + 1)).empty()) continue;
      }
      Certificate cert = certify_ball(E, cand.x, ball, sampler_budget, splitmix64(scale_seed + 2 * ci));
      cert.closed_form = cand.closed_form;
      if (!cert.empty()) continue;
      ps.witness = HoleWitness{r, cand.x, ball, d, cert};
      break;
    }
    rep.scales.push_back(std::move(ps));
  }
  return rep;
}

double badset_threshold(double c1, double c2, double lipschitz, double eps, int nu, int s) {
  const double term1 = 3.0 * c1 * std::pow(eps, 1.0 / nu);
  const double term2 = lipschitz * eps;
  const double term3 = lipschitz * c2 * (2.0 + std::pow(lipschitz, -1.0 / s)) * std::pow(eps, 1.0 / s);
  return term1 + term2 + term3;
}

namespace {

void check_params(const MapUnderTest& f, const BadSetParams& params) {
  const auto* g = &f.source_alg();
  const auto* m = &f.target_alg();
  if (params.zeta.algebra_ptr() != g || params.eta.algebra_ptr() != g) throw AlgebraMismatch("zeta and eta must lie in the source algebra");
  if (params.y.algebra_ptr() != m || params.z.algebra_ptr() != m) throw AlgebraMismatch("y and z must lie in the target algebra");
  if (!(params.eps > 0.0) || !(params.delta > 0.0)) throw InvalidArgument("eps and delta must be positive");
  if (!(f.lipschitz > 0.0)) throw InvalidArgument("bad-set thresholds need a positive Lipschitz constant");
  for (double t : params.t_grid) {
    if (!(t > 0.0 && t < params.delta)) throw InvalidArgument("t grid must lie in (0, delta)");
  }
}

}  // namespace

BadSetConstants badset_constants(const MapUnderTest& f, const BadSetParams& params) {
  check_params(f, params);
  BadSetConstants c;
  c.lipschitz = f.lipschitz;
  c.nu = f.target_alg().step();
  c.s = f.source_alg().step();
  const double L = f.lipschitz;
  c.b1 = std::max(params.eps, hnorm(f.target, params.y) + hnorm(f.target, params.z));
  c.b2 = std::max({params.eps, params.eps / L, hnorm(f.source, params.zeta) + hnorm(f.source, params.eta)});
  c.c1 = pipeline_constant(f.target, c.b1, params.constant_samples, splitmix64(params.seed + 1)).value;
  c.c2 = pipeline_constant(f.source, c.b2, params.constant_samples, splitmix64(params.seed + 2)).value;
  c.threshold = badset_threshold(c.c1, c.c2, c.lipschitz, params.eps, c.nu, c.s);
  return c;
}

namespace {

struct DirectionPick {
  Point zeta_t;
  double gap = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  bool ok = false;
};

// Best zeta_p^t for the pair of conditions (gap < eps t, residual <= eps t).
DirectionPick pick_direction(const MapUnderTest& f, const Point& p, const Point& fp_inv, const Point& zeta,
                             const Point& y, double t, double eps, int extra, std::mt19937_64& rng,
                             std::uint64_t seed) {
  const auto& g = f.source_alg();
  const auto& m = f.target_alg();
  const Point dz = dilate(g, t, zeta);
  const Point dy = dilate(m, t, y);
  std::vector<Point> candidates;
  try {
    candidates.push_back(approximate_direction(f.domain, p, zeta, t, seed).zeta_t);
  } catch (const SparseDomainError&) {
  }
  for (int n = 0; n < extra; ++n) candidates.push_back(group_product(g, dz, sample_hball(f.source, eps * t, rng)));
  DirectionPick best;
  for (auto& c : candidates) {
    const Point pc = group_product(g, p, c);
    if (!f.domain.contains(pc)) continue;
    const double gap = hdist(f.source, c, dz);
    const double res = hdist(f.target, group_product(m, fp_inv, f.eval(pc)), dy);
    const bool ok = gap < eps * t && res <= eps * t;
    if ((ok && !best.ok) || (ok == best.ok && res < best.residual)) {
      best = {c, gap, res, ok};
    }
  }
  return best;
}

}  // namespace

BadSetDiagnostic bad_set_membership(const MapUnderTest& f, const Point& p, const BadSetParams& params,
                                    const BadSetConstants* constants) {
  check_params(f, params);
  if (p.algebra_ptr() != &f.source_alg()) throw AlgebraMismatch("p must lie in the source algebra");
  if (!f.domain.contains(p)) throw InvalidArgument("p is not in the map's domain");
  const auto& g = f.source_alg();
  const auto& m = f.target_alg();
  BadSetDiagnostic diag;
  diag.p = p;
  diag.params = params;
  if (constants) {
    diag.constants = *constants;
  } else {
    try {
      diag.constants = badset_constants(f, params);
    } catch (const Error& e) {
      diag.verdict = "inconclusive";
      diag.reason = std::string("constant pipeline unavailable: ") + e.what();
      return diag;
    }
  }
  const double threshold = diag.constants.threshold;
  const double eps = params.eps;
  const Point fp_inv = group_inverse(f.eval(p));
  const Point zeta_eta = group_product(g, params.zeta, params.eta);
  const Point yz = group_product(m, params.y, params.z);

  bool all_conditions = true;
  bool any_witness = false;
  for (std::size_t ti = 0; ti < params.t_grid.size(); ++ti) {
    const double t = params.t_grid[ti];
    const std::uint64_t tseed = splitmix64(params.seed ^ (0x51ED270B27ULL * (ti + 1)));
    auto rng = shard_rng(tseed, 0);
    BadSetScale rec;
    rec.t = t;
    const auto za = pick_direction(f, p, fp_inv, params.zeta, params.y, t, eps, params.direction_samples, rng, tseed + 1);
    const auto eb = pick_direction(f, p, fp_inv, params.eta, params.z, t, eps, params.direction_samples, rng, tseed + 2);
    rec.zeta_t = za.zeta_t.size() ? za.zeta_t : dilate(g, t, params.zeta);
    rec.eta_t = eb.zeta_t.size() ? eb.zeta_t : dilate(g, t, params.eta);
    rec.a1 = za.gap;
    rec.a3 = za.residual;
    rec.a2 = eb.gap;
    rec.a4 = eb.residual;
    rec.conditions = za.ok && eb.ok;
    if (!rec.conditions) {
      all_conditions = false;
      rec.note = "conditions on the approximating directions fail";
    }

    // omega search: maximize the quotient mismatch inside the eps t ball.
    const Point center = dilate(g, t, zeta_eta);
    const Point target = dilate(m, t, yz);
    const double radius = eps * t;
    auto objective = [&](const Point& w, double& gap) -> double {
      gap = hdist(f.source, w, center);
      if (!(gap < radius)) return -1.0;
      const Point pw = group_product(g, p, w);
      if (!f.domain.contains(pw)) return -1.0;
      return hdist(f.target, group_product(m, fp_inv, f.eval(pw)), target);
    };
    double best = -1.0;
    double best_gap = 0.0;
    Point best_w = center;
    for (int restart = 0; restart < params.omega_restarts; ++restart) {
      Point w = restart == 0 ? center : group_product(g, center, sample_hball(f.source, radius, rng));
      double gap = 0.0;
      double value = objective(w, gap);
      if (value < 0.0) continue;
      double step = radius / 4.0;
      for (int it = 0; it < params.omega_steps; ++it) {
        const Point trial = group_product(g, w, sample_hball(f.source, step, rng));
        double tg = 0.0;
        const double tv = objective(trial, tg);
        if (tv > value) {
          w = trial;
          value = tv;
          gap = tg;
        } else {
          step *= 0.7;
        }
      }
      if (value > best) {
        best = value;
        best_gap = gap;
        best_w = w;
      }
    }
    rec.rhs = threshold * t;
    if (best >= 0.0) {
      rec.omega_found = true;
      rec.omega = best_w;
      rec.omega_gap = best_gap;
      rec.lhs = best;
      rec.badt = true;
      rec.badt2 = best > rec.rhs;
    } else {
      rec.omega = center;
      rec.note += rec.note.empty() ? "no admissible omega" : "; no admissible omega";
    }
    if (rec.badt && rec.badt2) any_witness = true;
    diag.scales.push_back(std::move(rec));
  }

  if (all_conditions && any_witness) {
    diag.verdict = "in";
    diag.reason = "conditions hold on the whole grid and an omega witness exceeds the threshold";
  } else {
    diag.verdict = "out";
    diag.reason = !all_conditions ? "approximating-direction conditions fail on the tested grid"
                                  : "no omega exceeds the threshold on the tested grid";
  }
  return diag;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

std::vector<MeasureRow> porous_measure_scan(const DomainSet& E, const Box& box, const std::vector<int>& resolutions,
                                            long samples, std::uint64_t seed) {
  const auto& alg = E.alg();
  if (static_cast<int>(box.lo.size()) != alg.dim() || box.hi.size() != box.lo.size()) {
    throw InvalidArgument("box needs one interval per coordinate");
  }
  for (std::size_t i = 0; i < box.lo.size(); ++i) {
    if (!(box.lo[i] < box.hi[i])) throw InvalidArgument("box intervals need lo < hi");
  }
  if (samples <= 0) throw InvalidArgument("measure scan needs a positive sample count");
  for (std::size_t i = 1; i < resolutions.size(); ++i) {
    if (resolutions[i] <= resolutions[i - 1]) throw InvalidArgument("resolutions must increase");
  }
  const bool holes = E.kind() == DomainKind::HoleFamily && !E.hole_spec().anchors.empty();
  const double mu1 = holes ? unit_ball_volume(E.norm()) : 0.0;
  const int Q = alg.hom_dim();
  std::vector<MeasureRow> out;
  for (std::size_t ri = 0; ri < resolutions.size(); ++ri) {
    const int K = resolutions[ri];
    const std::uint64_t rseed = splitmix64(seed + static_cast<std::uint64_t>(K) * 0x1000193ULL);
    MeasureRow row;
    row.resolution = K;
    row.samples = samples;
    std::vector<long> hits(kShards, 0);
    run_shards(kShards, [&](int shard) {
      auto rng = shard_rng(rseed, static_cast<std::uint64_t>(shard));
      const long count = shard_count(samples, shard);
      Point x(alg);
      long h = 0;
      for (long n = 0; n < count; ++n) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * uniform01(rng);
        if (E.contains(x)) ++h;
      }
      hits[static_cast<std::size_t>(shard)] = h;
    });
    long total = 0;
    for (long h : hits) total += h;
    row.fraction = static_cast<double>(total) / static_cast<double>(samples);
    row.fraction_stderr = std::sqrt(row.fraction * (1.0 - row.fraction) / static_cast<double>(samples));

    if (holes) {
      const auto& spec = E.hole_spec();
      const double scale = std::ldexp(1.0, -K);
      const double rho = scale - spec.coeff * std::pow(scale, spec.power);
      if (rho > 0.0) {
        row.porous_component = true;
        row.neighborhood_radius = rho;
        const double ball = mu1 * std::pow(rho, Q);
        const long anchors = static_cast<long>(spec.anchors.size());
        const long per_anchor = std::max(1L, samples / anchors);
        std::vector<long> anchor_hits(static_cast<std::size_t>(anchors), 0);
        run_shards(kShards, [&](int shard) {
          for (long ai = shard; ai < anchors; ai += kShards) {
            auto rng = shard_rng(splitmix64(rseed + 0xA5A5), static_cast<std::uint64_t>(ai));
            long h = 0;
            for (long n = 0; n < per_anchor; ++n) {
              if (E.contains(group_product(alg, spec.anchors[static_cast<std::size_t>(ai)], sample_hball(E.norm(), rho, rng)))) ++h;
            }
            anchor_hits[static_cast<std::size_t>(ai)] = h;
          }
        });
        double var = 0.0;
        for (long h : anchor_hits) {
          const double p = static_cast<double>(h) / static_cast<double>(per_anchor);
          row.porous_estimate += ball * p;
          var += ball * ball * p * (1.0 - p) / static_cast<double>(per_anchor);
        }
        row.porous_stderr = std::sqrt(var);
      }
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace carnot
