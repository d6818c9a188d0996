#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "carnot/algebra_io.hpp"
#include "carnot/lemmas.hpp"
#include "carnot/metric.hpp"

using namespace carnot;
using carnot::test::make_point;

namespace {

HomogeneousNorm unit_h1() { return HomogeneousNorm::unit(build_heisenberg(1)); }

}  // namespace

TEST_CASE("heisenberg norm of a central element") {
  const auto n = unit_h1();
  CHECK(hnorm(n, make_point(n.alg(), {0, 0, 4})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hnorm(n, make_point(n.alg(), {3, 4, 0})) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(hnorm(n, ExactElement(n.alg(), {make_rational(0), make_rational(0), make_rational(9)})) == 3.0);
}

TEST_CASE("norm is homogeneous under dilations") {
  auto alg = builtin_algebra("free:2:3");
  const auto n = HomogeneousNorm(alg, {1.0, 0.8, 0.6});
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Point x = carnot::test::random_point(*alg, rng, 2.0);
    for (double r : {0.125, 0.5, 3.0, 7.5}) {
      const double lhs = hnorm(n, dilate(*alg, r, x));
      CHECK(std::abs(lhs - r * hnorm(n, x)) <= 1e-12 * std::max(1.0, lhs));
    }
  }
}

TEST_CASE("layer-two dilations are exact for r = 1 and r = 4") {
  const auto n = unit_h1();
  for (long r : {1L, 4L}) {
    const ExactElement x(n.alg(), {make_rational(0), make_rational(0), make_rational(5, 3)});
    const ExactElement dx = dilate(n.alg(), make_rational(r), x);
    CHECK(hnorm(n, dx) == static_cast<double>(r) * hnorm(n, x));
  }
}

TEST_CASE("left invariance and separation of the distance") {
  const auto n = HomogeneousNorm(builtin_algebra("engel"), {1.0, 0.7, 0.5});
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5000; ++i) {
    const Point x = sample_hball(n, 2.0, rng), y = sample_hball(n, 2.0, rng), z = sample_hball(n, 2.0, rng);
    const double d = hdist(n, x, y);
    CHECK(std::abs(hdist(n, group_product(n.alg(), z, x), group_product(n.alg(), z, y)) - d) <= 1e-9 * std::max(1.0, d));
    CHECK(d > 0.0);
    CHECK(hdist(n, x, x) == 0.0);
  }
}

TEST_CASE("ball samplers respect their radius") {
  const auto n = unit_h1();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(hnorm(n, sample_hball(n, 0.5, rng)) <= 0.5 + 1e-12);
    CHECK(hnorm(n, sample_hsphere(n, 0.5, rng)) == doctest::Approx(0.5).epsilon(1e-12));
  }
  const Point z = make_point(n.alg(), {1, 2, 3});
  CHECK(hnorm(n, rescale_to(n, z, 0.25)) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("calibration of abelian and heisenberg norms") {
  const auto abelian = calibrate_sigmas(build_abelian(3), LayerNorm::Euclidean, 2000, 1);
  CHECK(abelian.violation_free);
  CHECK(abelian.norm.sigmas == std::vector<double>{1.0});

  const auto h = calibrate_sigmas(build_heisenberg(1), LayerNorm::Euclidean, 20000, 2);
  REQUIRE(h.violation_free);
  CHECK(h.norm.sigmas[1] > 0.0);
  CHECK(h.norm.sigmas[1] <= 1.0);
  // Independent resample with a seed the calibration never saw.
  const auto fresh = triangle_sample(h.norm.alg(), 100000, 987654321);
  CHECK(check_triangle(h.norm, fresh).violations == 0);
}

TEST_CASE("triangle check is scale free") {
  const auto n = unit_h1();
  const auto pairs = triangle_sample(n.alg(), 2000, 17);
  std::vector<TrianglePair> scaled;
  for (const auto& p : pairs) {
    const Point x = dilate(n.alg(), 8.0, p.x), y = dilate(n.alg(), 8.0, p.y);
    scaled.push_back({x, y, group_product(n.alg(), x, y)});
  }
  CHECK(check_triangle(n, pairs).violations == check_triangle(n, scaled).violations);
}

TEST_CASE("conjugation in the heisenberg group") {
  const auto n = unit_h1();
  const auto& g = n.alg();
  const ExactElement x = carnot::test::make_exact(g, {make_rational(1), make_rational(0), make_rational(0)});
  const ExactElement y = carnot::test::make_exact(g, {make_rational(0), make_rational(1), make_rational(0)});
  const ExactElement c = group_product(g, group_product(g, group_inverse(x), y), x);
  CHECK(c == carnot::test::make_exact(g, {make_rational(0), make_rational(1), make_rational(-1)}));
}

TEST_CASE("abelian lemma ratios never exceed one") {
  const auto n = HomogeneousNorm::unit(build_abelian(3));
  CHECK(check_product_perturbation(n, 3, 1.0, 3000, 1).empirical <= 1.0 + 1e-12);
  CHECK(check_conjugation_bound(n, 3000, 1).empirical <= 1.0 + 1e-12);
}

TEST_CASE("product perturbation on heisenberg is stable and below the pipeline bound") {
  const auto n = unit_h1();
  const auto a = check_product_perturbation(n, 3, 1.0, 20000, 101);
  const auto b = check_product_perturbation(n, 3, 1.0, 40000, 202);
  CHECK(std::isfinite(a.empirical));
  CHECK(std::abs(a.empirical - b.empirical) <= 0.1 * std::max(a.empirical, b.empirical));
  const auto bound = pipeline_constant(n, 1.0, 10000, 7);
  CHECK(a.empirical <= bound.value);
  CHECK(b.empirical <= bound.value);
}

TEST_CASE("conjugation constant on heisenberg is at least one and stable") {
  const auto n = unit_h1();
  const auto a = check_conjugation_bound(n, 20000, 5);
  const auto b = check_conjugation_bound(n, 20000, 6);
  CHECK(a.empirical >= 1.0 - 1e-12);
  CHECK(std::abs(a.empirical - b.empirical) <= 0.1 * std::max(a.empirical, b.empirical));
}

TEST_CASE("norm equivalence constants reproduce across seeds") {
  const auto n = unit_h1();
  const auto a = norm_equivalence_constants(n, 1.0, 10000, 1);
  const auto b = norm_equivalence_constants(n, 1.0, 10000, 2);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CAPTURE(a[i].name);
    CHECK(std::isfinite(a[i].empirical));
    CHECK(std::abs(a[i].empirical - b[i].empirical) <= 0.1 * std::max(a[i].empirical, b[i].empirical));
  }
  const auto closed = analytic_constants(n, 1.0);
  CHECK(a[0].empirical <= closed.c1 * (1 + 1e-9));
  CHECK(a[1].empirical <= closed.c2 * (1 + 1e-9));
  CHECK(a[2].empirical <= closed.c3 * (1 + 1e-9));
}

TEST_CASE("witnesses re-evaluate to their reported ratio") {
  const auto n = HomogeneousNorm(builtin_algebra("free:2:3"), {1.0, 0.8, 0.6});
  std::vector<ConstantReport> reports = {check_product_perturbation(n, 2, 0.5, 5000, 9), check_conjugation_bound(n, 5000, 9)};
  for (const auto& r : norm_equivalence_constants(n, 0.5, 3000, 9)) reports.push_back(r);
  for (const auto& r : reports) {
    CAPTURE(r.name);
    CHECK(std::abs(reevaluate_ratio(n, r) - r.empirical) <= 1e-12 * std::max(1.0, r.empirical));
  }
}

TEST_CASE("identical tuples give a consistent zero") {
  const auto n = unit_h1();
  RatioProblem p;
  p.names = {"x"};
  p.sample = [&](std::mt19937_64&, long) { return std::vector<Point>{Point(n.alg())}; };
  p.project = [](std::vector<Point>&) {};
  p.present = [](const std::vector<Point>& v) { return v; };
  p.evaluate = [](const std::vector<Point>&) { return std::pair<double, double>{0.0, 0.0}; };
  SearchSettings s;
  s.samples = 100;
  const auto r = maximize_ratio(n, p, s);
  CHECK(r.consistent_zero == 100);
  CHECK(r.empirical == 0.0);
}
