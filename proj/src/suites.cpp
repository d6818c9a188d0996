#include "carnot/suites.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "carnot/algebra_io.hpp"
#include "carnot/free_nilpotent.hpp"
#include "carnot/lemmas.hpp"
#include "carnot/porosity.hpp"
#include "carnot/registry.hpp"
#include "carnot/sampling.hpp"
#include "carnot/verify.hpp"

namespace carnot {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Rational random_rational(std::mt19937_64& rng) {
  const long num = std::uniform_int_distribution<long>(-9, 9)(rng);
  const long den = std::uniform_int_distribution<long>(1, 6)(rng);
  return make_rational(num, den);
}

ExactElement random_exact(const GradedAlgebra& alg, std::mt19937_64& rng) {
  ExactElement x(alg);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = random_rational(rng);
  return x;
}

HomogeneousNorm calibrated(AlgebraPtr alg, std::uint64_t seed) {
  return calibrate_sigmas(std::move(alg), LayerNorm::Euclidean, 20000, seed).norm;
}

NormFactory calibrating_factory(std::uint64_t seed) {
  return [seed](AlgebraPtr a) { return calibrated(std::move(a), seed); };
}

std::vector<double> dyadic_radii(int lo, int hi) {
  std::vector<double> out;
  for (int k = lo; k <= hi; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

}  // namespace

CriterionResult criterion_exact_algebra(const SuiteOptions& options) {
  CriterionResult res{1, "exact algebra identities", true, "", json::object()};
  const std::vector<AlgebraPtr> algebras = {build_heisenberg(1),        build_heisenberg(2),        build_heisenberg(3),
                                            build_engel(),              build_free_nilpotent(2, 2), build_free_nilpotent(2, 3),
                                            build_free_nilpotent(2, 4)};
  constexpr int kTriples = 1000;
  long total_failures = 0;
  for (std::size_t ai = 0; ai < algebras.size(); ++ai) {
    const auto& alg = *algebras[ai];
    const VerifyReport vr = verify_algebra(alg);
    long failures = vr.passed() ? 0 : 1;
    json counts = {{"associativity", 0}, {"identity", 0}, {"inverse", 0}, {"jacobi", 0}, {"grading", 0}, {"dilation", 0}};
    auto rng = shard_rng(options.seed, 100 + ai);
    const ExactElement zero(alg);
    for (int n = 0; n < kTriples; ++n) {
      const ExactElement x = random_exact(alg, rng);
      const ExactElement y = random_exact(alg, rng);
      const ExactElement z = random_exact(alg, rng);
      auto fail = [&](const char* what) {
        counts[what] = counts[what].get<long>() + 1;
        ++failures;
      };
      if (group_product(alg, group_product(alg, x, y), z) != group_product(alg, x, group_product(alg, y, z))) fail("associativity");
      if (group_product(alg, x, zero) != x || group_product(alg, zero, x) != x) fail("identity");
      const ExactElement xi = group_inverse(x);
      if (!group_product(alg, x, xi).is_zero() || !group_product(alg, xi, x).is_zero()) fail("inverse");
      const ExactElement jac = add(add(bracket(alg, x, bracket(alg, y, z)), bracket(alg, y, bracket(alg, z, x))),
                                   bracket(alg, z, bracket(alg, x, y)));
      if (!jac.is_zero()) fail("jacobi");
      const int li = 1 + static_cast<int>(rng() % static_cast<unsigned>(alg.step()));
      const int lj = 1 + static_cast<int>(rng() % static_cast<unsigned>(alg.step()));
      const ExactElement br = bracket(alg, project(alg, li, x), project(alg, lj, y));
      const ExactElement expected = li + lj <= alg.step() ? project(alg, li + lj, br) : zero;
      if (br != expected) fail("grading");
      Rational r = random_rational(rng);
      if (sgn(r) == 0) r = 1;
      r = abs(r);
      if (dilate(alg, r, group_product(alg, x, y)) != group_product(alg, dilate(alg, r, x), dilate(alg, r, y))) fail("dilation");
    }
    res.data[alg.name()] = {{"verify_passed", vr.passed()}, {"triples", kTriples}, {"failures", counts}};
    total_failures += failures;
  }
  res.passed = total_failures == 0;
  res.detail = std::to_string(algebras.size()) + " algebras x " + std::to_string(kTriples) +
               " rational triples, nonzero residuals: " + std::to_string(total_failures);
  return res;
}

CriterionResult criterion_norm(const SuiteOptions& options) {
  CriterionResult res{2, "homogeneous norm", true, "", json::object()};
  const auto h1 = build_heisenberg(1);
  const auto cal = calibrate_sigmas(h1, LayerNorm::Euclidean, 20000, options.seed);
  const auto& norm = cal.norm;
  const auto pairs = triangle_sample(*h1, 100000, splitmix64(options.seed ^ 0xF2E5));
  const TriangleCheck tc = check_triangle(norm, pairs);

  auto rng = shard_rng(options.seed, 2);
  double dil = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const Point x = sample_hball(norm, 2.0, rng);
    const double r = std::pow(10.0, -3.0 + 6.0 * uniform01(rng));
    const double nx = hnorm(norm, x);
    if (nx > 0.0) dil = std::max(dil, std::abs(hnorm(norm, dilate(*h1, r, x)) - r * nx) / (r * nx));
  }
  double inv = 0.0;
  for (int n = 0; n < 100000; ++n) {
    const Point g = sample_hball(norm, 2.0, rng);
    const Point x = sample_hball(norm, 2.0, rng);
    const Point y = sample_hball(norm, 2.0, rng);
    inv = std::max(inv, std::abs(hdist(norm, group_product(*h1, g, x), group_product(*h1, g, y)) - hdist(norm, x, y)));
  }
  res.passed = cal.violation_free && tc.violations == 0 && dil <= 1e-12 && inv <= 1e-9;
  res.data = {{"sigmas", norm.sigmas}, {"triangle_violations", tc.violations}, {"resample_pairs", pairs.size()},
              {"dilation_relative_error", dil}, {"left_invariance_error", inv}};
  res.detail = "sigma=(" + fmt(norm.sigmas[0]) + "," + fmt(norm.sigmas[1]) + "), violations " + std::to_string(tc.violations) +
               " / 1e5, dilation err " + fmt(dil) + ", invariance err " + fmt(inv);
  return res;
}

CriterionResult criterion_product_perturbation(const SuiteOptions& options) {
  CriterionResult res{3, "product perturbation bound", true, "", json::array()};
  double worst_ratio = 0.0;
  double worst_spread = 0.0;
  for (const auto& alg : {build_heisenberg(1), build_free_nilpotent(2, 3)}) {
    const auto norm = calibrated(alg, options.seed);
    for (double b : {0.5, 1.0}) {
      const double C = pipeline_constant(norm, b, 20000, splitmix64(options.seed + 3)).value;
      for (int N : {2, 3, 5}) {
        const auto r1 = check_product_perturbation(norm, N, b, 100000, splitmix64(options.seed + 31));
        const auto r2 = check_product_perturbation(norm, N, b, 100000, splitmix64(options.seed + 32));
        const double hi = std::max(r1.empirical, r2.empirical);
        const double spread = std::abs(r1.empirical - r2.empirical) / hi;
        const bool ok = r1.empirical <= C && r2.empirical <= C && spread <= 0.1;
        res.passed = res.passed && ok;
        worst_ratio = std::max(worst_ratio, hi / C);
        worst_spread = std::max(worst_spread, spread);
        res.data.push_back({{"algebra", alg->name()}, {"N", N}, {"b", b}, {"C", C}, {"seed_a", r1.empirical},
                            {"seed_b", r2.empirical}, {"passed", ok}});
      }
    }
  }
  res.detail = "max empirical/C " + fmt(worst_ratio) + ", max seed spread " + fmt(worst_spread);
  return res;
}

CriterionResult criterion_conjugation(const SuiteOptions& options) {
  CriterionResult res{4, "conjugation bound", true, "", json::object()};
  const auto norm = calibrated(build_heisenberg(1), options.seed);
  const auto d1 = check_conjugation_bound(norm, 100000, splitmix64(options.seed + 41));
  const auto d2 = check_conjugation_bound(norm, 100000, splitmix64(options.seed + 42));
  const auto abelian = check_conjugation_bound(HomogeneousNorm::unit(build_abelian(2)), 100000, splitmix64(options.seed + 43));
  const double hi = std::max(d1.empirical, d2.empirical);
  const double spread = std::abs(d1.empirical - d2.empirical) / hi;
  res.passed = std::isfinite(hi) && d1.empirical >= 1.0 && d2.empirical >= 1.0 && spread <= 0.1 &&
               abelian.empirical <= 1.0 + 1e-12;
  res.data = {{"D_seed_a", d1.empirical}, {"D_seed_b", d2.empirical}, {"abelian", abelian.empirical}};
  res.detail = "D=" + fmt(d1.empirical) + "/" + fmt(d2.empirical) + ", abelian max " + fmt(abelian.empirical);
  return res;
}

CriterionResult criterion_pansu(const SuiteOptions& options) {
  CriterionResult res{5, "Pansu differential fitting", true, "", json::object()};
  const auto h1 = build_heisenberg(1);
  const auto norm = calibrated(h1, options.seed);
  const auto factory = calibrating_factory(options.seed);
  const auto swap = make_map("swap-h1", norm, factory);
  auto rng = shard_rng(options.seed, 5);
  double swap_err = 0.0, left_err = 0.0, residual = 0.0;
  bool all_passed = true;
  const auto radii = dyadic_radii(1, 10);
  for (int n = 0; n < 10; ++n) {
    const Point x = sample_hball(norm, 3.0, rng);
    const auto fit = fit_pansu_differential(swap, x);
    all_passed = all_passed && fit.passed && fit.differential.has_value();
    if (!fit.differential) continue;
    const auto& L = *fit.differential;
    swap_err = std::max({swap_err, std::abs(L.entry(0, 0)), std::abs(L.entry(0, 1) - 1.0), std::abs(L.entry(1, 0) - 1.0),
                         std::abs(L.entry(1, 1)), std::abs(L.entry(2, 2) + 1.0)});
    for (const auto& r : differentiability_residual(swap, x, L, radii, 500, splitmix64(options.seed + n))) {
      all_passed = all_passed && !r.inconclusive;
      residual = std::max(residual, r.residual);
    }
    const Point g = sample_hball(norm, 3.0, rng);
    std::ostringstream id;
    id.precision(17);
    id << "left-translate:" << g[0] << "," << g[1] << "," << g[2];
    const auto lt = make_map(id.str(), norm, factory);
    const auto lfit = fit_pansu_differential(lt, x);
    all_passed = all_passed && lfit.passed && lfit.differential.has_value();
    if (!lfit.differential) continue;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) left_err = std::max(left_err, std::abs(lfit.differential->entry(r, c) - (r == c ? 1.0 : 0.0)));
    }
  }
  res.passed = all_passed && swap_err <= 1e-6 && left_err <= 1e-6 && residual < 1e-4;
  res.data = {{"swap_error", swap_err}, {"left_translation_error", left_err}, {"max_residual", residual}};
  res.detail = "swap err " + fmt(swap_err) + ", left-translation err " + fmt(left_err) + ", residual " + fmt(residual);
  return res;
}

namespace {

struct CompositionRun {
  std::string map;
  bool hhom = false;
  CompositionReport report;
  const MapUnderTest* f = nullptr;
  Point x;
};

struct CompositionBatch {
  std::vector<MapUnderTest> maps;
  std::vector<CompositionRun> runs;
  std::vector<std::string> failures;
};

CompositionBatch composition_batch(const SuiteOptions& options) {
  const auto h1 = build_heisenberg(1);
  const auto norm = calibrated(h1, options.seed);
  const auto factory = calibrating_factory(options.seed);
  CompositionBatch batch;
  batch.maps = {make_map("proj-x", norm, factory), make_map("swap-h1", norm, factory), make_map("dilation:2", norm, factory),
                make_map("left-translate:0.5,-1.25,2", norm, factory), make_map("smooth-h1r", norm, factory)};
  const std::vector<bool> hhom = {true, true, true, false, false};
  auto rng = shard_rng(options.seed, 6);
  for (std::size_t mi = 0; mi < batch.maps.size(); ++mi) {
    for (int n = 0; n < 10; ++n) {
      const Point x = sample_hball(norm, 2.0, rng);
      const Point zeta = sample_hsphere(norm, 1.0, rng);
      const Point eta = sample_hsphere(norm, 1.0, rng);
      for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
        try {
          batch.runs.push_back({batch.maps[mi].id, hhom[mi], composition_check(batch.maps[mi], x, zeta, eta, a, b), &batch.maps[mi], x});
        } catch (const NonConvergence& e) {
          batch.failures.push_back(batch.maps[mi].id + ": " + e.what());
        }
      }
    }
  }
  return batch;
}

}  // namespace

CriterionResult criterion_composition(const SuiteOptions& options) {
  CriterionResult res{6, "composition of directional derivatives", true, "", json::object()};
  const auto batch = composition_batch(options);
  double finest = 0.0, hhom_worst = 0.0;
  for (const auto& run : batch.runs) {
    finest = std::max(finest, run.report.discrepancy);
    if (run.hhom) {
      for (double d : run.report.per_scale) hhom_worst = std::max(hhom_worst, d);
    }
  }
  res.passed = batch.failures.empty() && batch.runs.size() == 100 && finest < 1e-4 && hhom_worst < 1e-9;
  res.data = {{"runs", batch.runs.size()}, {"nonconvergent", batch.failures}, {"finest_discrepancy", finest},
              {"hhom_max_discrepancy", hhom_worst}};
  res.detail = std::to_string(batch.runs.size()) + " checks, finest-scale max " + fmt(finest) + ", h-hom all-scale max " + fmt(hhom_worst);
  return res;
}

CriterionResult criterion_dilation(const SuiteOptions& options) {
  CriterionResult res{7, "dilation of directional derivatives", true, "", json::object()};
  const auto batch = composition_batch(options);
  long checked = 0, failed = 0;
  double worst = 0.0;
  for (const auto& run : batch.runs) {
    const auto& f = *run.f;
    const auto& g = f.source_alg();
    const auto& m = f.target_alg();
    for (const auto* est : {&run.report.zeta, &run.report.eta}) {
      if (!est->converged) continue;
      for (const char* a_text : {"1/2", "2"}) {
        const Rational a = parse_rational(a_text);
        const double ad = to_double(a);
        DerivativeEstimate scaled = f.exact_eval ? directional_derivative(f, run.x, dilate(g, a, to_exact(est->direction)))
                                                 : directional_derivative(f, run.x, dilate(g, ad, est->direction));
        double d;
        if (f.exact_eval) {
          d = hdist(f.target, scaled.exact_quotients.back(), dilate(m, a, est->exact_quotients.back()));
        } else {
          d = hdist(f.target, scaled.limit, dilate(m, ad, est->limit));
        }
        const double tol = 2.0 * std::max(scaled.tolerance, ad * est->tolerance);
        ++checked;
        if (!scaled.converged || d > tol) ++failed;
        worst = std::max(worst, tol > 0.0 ? d / tol : (d > 0.0 ? INFINITY : 0.0));
      }
    }
  }
  res.passed = failed == 0 && checked > 0 && batch.failures.empty();
  res.data = {{"checked", checked}, {"failed", failed}, {"worst_fraction_of_tolerance", worst}};
  res.detail = std::to_string(checked) + " dilation checks, failures " + std::to_string(failed) + ", worst " + fmt(worst) + " of 2x tol";
  return res;
}

CriterionResult criterion_porosity(const SuiteOptions& options) {
  CriterionResult res{8, "porosity probe and measure scan", true, "", json::object()};
  const auto h1 = build_heisenberg(1);
  const auto norm = calibrated(h1, options.seed);
  const auto radii = dyadic_radii(0, 10);
  const auto holes = DomainSet::hole_family(norm, probe_hole_family(norm));
  const auto probe = porosity_probe(holes, Point(*h1), 1.0 / 16.0, radii, 10000, splitmix64(options.seed + 8));
  const auto control = porosity_probe(DomainSet::full(norm), Point(*h1), 1.0 / 16.0, radii, 10000, splitmix64(options.seed + 9));

  // Exact series for mu(E cap union_a B(a, (7/8) 2^-K)) with Haar = Lebesgue.
  const int levels = 12;
  const int K = 8;
  const auto spec = porous_grid_family(norm, levels);
  const auto grid = DomainSet::hole_family(norm, spec);
  const double Q = h1->hom_dim();
  const double mu1 = unit_ball_volume(norm);
  double removed = 0.0;
  for (int k = K + 1; k <= levels; ++k) removed += std::pow(std::ldexp(0.125, -k), Q);
  const double ball = mu1 * std::pow(std::ldexp(0.875, -K), Q);
  const double per_anchor_oracle = ball - mu1 * removed;
  const double anchors = static_cast<double>(spec.anchors.size());
  const double oracle = anchors * per_anchor_oracle;
  const long samples = 20000;
  const auto rows = porous_measure_scan(grid, Box{std::vector<double>(3, -4.5), std::vector<double>(3, 4.5)}, {2, 4, 6, 8}, samples,
                                        splitmix64(options.seed + 10));
  const auto& finest = rows.back();
  const long per_anchor = samples / static_cast<long>(spec.anchors.size());
  const double p = per_anchor_oracle / ball;
  const double sigma = std::sqrt(anchors) * ball * std::sqrt(p * (1.0 - p) / static_cast<double>(per_anchor));
  const bool scan_ok = finest.porous_component && finest.resolution == K && finest.porous_estimate < oracle + 3.0 * sigma;

  const auto found = probe.witnesses().size();
  const auto control_found = control.witnesses().size();
  res.passed = found == radii.size() && control_found == 0 && scan_ok;
  res.data = {{"witnesses", found}, {"scales", radii.size()}, {"control_witnesses", control_found},
              {"porous_estimate", finest.porous_estimate}, {"oracle", oracle}, {"sigma", sigma}};
  res.detail = "witnesses " + std::to_string(found) + "/" + std::to_string(radii.size()) + ", control " +
               std::to_string(control_found) + ", porous estimate " + fmt(finest.porous_estimate) + " vs oracle " + fmt(oracle) +
               " + 3 sigma " + fmt(3.0 * sigma);
  return res;
}

CriterionResult criterion_bad_set(const SuiteOptions& options) {
  CriterionResult res{9, "bad-set membership", true, "", json::object()};
  const auto h1 = build_heisenberg(1);
  const auto norm = calibrated(h1, options.seed);
  const auto factory = calibrating_factory(options.seed);
  const auto swap = make_map("swap-h1", norm, factory);
  auto rng = shard_rng(options.seed, 9);
  const std::vector<std::vector<double>> grids = {dyadic_radii(1, 8), {0.3, 0.07, 0.011, 0.0009}};
  long out_count = 0, cases = 0;
  for (int n = 0; n < 5; ++n) {
    const Point p = sample_hball(norm, 2.0, rng);
    BadSetParams bp;
    bp.zeta = sample_hsphere(norm, 1.0, rng);
    bp.eta = sample_hsphere(norm, 1.0, rng);
    bp.y = swap.eval(bp.zeta);
    bp.z = swap.eval(bp.eta);
    bp.seed = splitmix64(options.seed + 90 + n);
    const BadSetConstants constants = badset_constants(swap, bp);
    for (const auto& grid : grids) {
      bp.t_grid = grid;
      ++cases;
      if (bad_set_membership(swap, p, bp, &constants).verdict == "out") ++out_count;
    }
  }

  const auto corner = make_map("corner-max", norm, factory);
  BadSetParams cp;
  cp.zeta = basis_vector<double>(*h1, 0);
  cp.eta = basis_vector<double>(*h1, 1);
  cp.y = Point(corner.target_alg(), {1.0});
  cp.z = Point(corner.target_alg(), {1.0});
  cp.eps = 1e-3;
  cp.delta = 1.0;
  cp.t_grid = dyadic_radii(1, 8);
  cp.seed = splitmix64(options.seed + 99);
  const auto diag = bad_set_membership(corner, Point(*h1), cp);
  const auto& c = diag.constants;
  const double recomputed = 3.0 * c.c1 * std::pow(cp.eps, 1.0 / c.nu) + c.lipschitz * cp.eps +
                            c.lipschitz * c.c2 * (2.0 + std::pow(c.lipschitz, -1.0 / c.s)) * std::pow(cp.eps, 1.0 / c.s);
  const bool bit_exact = recomputed == c.threshold;
  res.passed = out_count == cases && diag.verdict == "in" && bit_exact;
  res.data = {{"hhom_out", out_count}, {"hhom_cases", cases}, {"corner_verdict", diag.verdict}, {"C1", c.c1}, {"C2", c.c2},
              {"threshold", c.threshold}, {"recomputed", recomputed}};
  res.detail = "h-hom out " + std::to_string(out_count) + "/" + std::to_string(cases) + ", corner " + diag.verdict +
               ", threshold " + fmt(c.threshold) + (bit_exact ? " (bit-exact)" : " (MISMATCH)");
  return res;
}

CriterionResult criterion_domains(const SuiteOptions& options) {
  CriterionResult res{10, "derivatives on measurable domains", true, "", json::array()};
  const auto h1 = build_heisenberg(1);
  const auto norm = calibrated(h1, options.seed);
  const auto factory = calibrating_factory(options.seed);
  const std::vector<MapUnderTest> maps = {make_map("swap-h1", norm, factory), make_map("smooth-h1r", norm, factory),
                                          make_map("proj-x", norm, factory)};
  struct Case {
    DomainSet domain;
    Point x;
    Point zeta;
  };
  const std::vector<Case> cases = {
      {DomainSet::halfspace(norm, {1.0, 0.0, 0.0}, 0.0), Point(*h1, {-0.01, 0.2, 0.1}), Point(*h1, {1.0, 0.3, 0.2})},
      {DomainSet::hole_family(norm, density_hole_family(norm)), Point(*h1), basis_vector<double>(*h1, 0)},
  };
  const auto radii = dyadic_radii(1, 10);
  double worst = 0.0;
  double min_density = 1.0;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& cs = cases[ci];
    const auto density = density_index(cs.domain, cs.x, radii, 10000, splitmix64(options.seed + 100 + ci));
    min_density = std::min(min_density, density.back().ratio);
    bool approximated = false;
    for (const auto& base : maps) {
      MapUnderTest f = base;
      f.domain = cs.domain;
      const auto full = directional_derivative(base, cs.x, cs.zeta);
      const auto restricted = directional_derivative(f, cs.x, cs.zeta, {Schedule{}, 1e-6, splitmix64(options.seed + ci)});
      for (double gap : restricted.gaps) approximated = approximated || gap > 0.0;
      const double d = hdist(base.target, full.limit, restricted.limit);
      const double tol = 2.0 * full.tolerance;
      const bool ok = full.converged && restricted.converged && d <= tol;
      res.passed = res.passed && ok;
      worst = std::max(worst, tol > 0.0 ? d / tol : 0.0);
      res.data.push_back({{"domain", cs.domain.label()}, {"map", base.id}, {"distance", d}, {"tolerance", tol},
                          {"density", density.back().ratio}, {"passed", ok}});
    }
    res.passed = res.passed && density.back().ratio >= 0.99 && approximated;
  }
  res.detail = "worst " + fmt(worst) + " of 2x tol, min density at finest radius " + fmt(min_density);
  return res;
}

std::vector<std::string> suite_names() { return {"algebra-exact", "norm", "lemmas", "pansu", "porosity", "domains", "all"}; }

std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& options) {
  using Fn = CriterionResult (*)(const SuiteOptions&);
  std::vector<Fn> fns;
  if (name == "algebra-exact" || name == "all") fns.push_back(criterion_exact_algebra);
  if (name == "norm" || name == "all") fns.push_back(criterion_norm);
  if (name == "lemmas" || name == "all") {
    fns.push_back(criterion_product_perturbation);
    fns.push_back(criterion_conjugation);
  }
  if (name == "pansu" || name == "all") {
    fns.push_back(criterion_pansu);
    fns.push_back(criterion_composition);
    fns.push_back(criterion_dilation);
  }
  if (name == "porosity" || name == "all") {
    fns.push_back(criterion_porosity);
    fns.push_back(criterion_bad_set);
  }
  if (name == "domains" || name == "all") fns.push_back(criterion_domains);
  if (fns.empty()) throw ConfigError("unknown suite id '" + name + "'");
  std::vector<CriterionResult> out;
  for (Fn fn : fns) out.push_back(fn(options));
  return out;
}

}  // namespace carnot
