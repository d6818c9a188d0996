#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "carnot/algebra_io.hpp"
#include "carnot/derivative.hpp"
#include "carnot/registry.hpp"

using namespace carnot;
using carnot::test::make_point;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

HomogeneousNorm unit_norm(AlgebraPtr a) { return HomogeneousNorm::unit(std::move(a)); }

const AlgebraPtr& h1() {
  static const AlgebraPtr h = build_heisenberg(1);
  return h;
}

MapUnderTest registry_map(const std::string& id, AlgebraPtr source = h1()) {
  return make_map(id, unit_norm(std::move(source)), [](AlgebraPtr a) { return unit_norm(std::move(a)); });
}

double max_abs_diff(const Point& a, const Point& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("schedule parsing") {
  const auto s = parse_schedule("1:0.5:30");
  CHECK(s.scales().size() == 30);
  CHECK(s.scales()[3] == 0.125);
  CHECK_THROWS_AS(parse_schedule("1:2:3"), InvalidArgument);
  CHECK_THROWS_AS(parse_schedule("1:0.5"), InvalidArgument);
}

TEST_CASE("identity first layer extends to the identity") {
  auto h = build_heisenberg(1);
  const HHom L = hhom_from_horizontal(h, h, {{q(1), q(0)}, {q(0), q(1)}});
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(L.entry(r, c) == (r == c ? 1.0 : 0.0));
}

TEST_CASE("swapping X and Y negates the center") {
  auto h = build_heisenberg(1);
  const HHom L = hhom_from_horizontal(h, h, {{q(0), q(1)}, {q(1), q(0)}});
  CHECK(L.entry(2, 2) == -1.0);
  CHECK(!hhom_violation(L));
}

TEST_CASE("abelian plane into heisenberg has no extension") {
  CHECK_THROWS_AS(hhom_from_horizontal(build_abelian(2), build_heisenberg(1), {{q(1), q(0)}, {q(0), q(1)}}),
                  InconsistentExtension);
  // A rank-one image has vanishing brackets, so it does extend.
  CHECK_NOTHROW(hhom_from_horizontal(build_abelian(2), build_heisenberg(1), {{q(1), q(2)}, {q(0), q(0)}}));
}

TEST_CASE("ungraded matrices are rejected") {
  auto h = build_heisenberg(1);
  RationalMatrix m(3, std::vector<Rational>(3, q(0)));
  m[0][0] = q(1);
  m[1][1] = q(1);
  m[2][2] = q(1);
  m[2][0] = q(1);
  CHECK_THROWS_AS(HHom(h, h, m), InvalidArgument);
}

TEST_CASE("random h-homomorphisms respect products and dilations") {
  std::mt19937_64 rng(42);
  for (const char* name : {"h1", "engel", "free:2:3"}) {
    auto g = builtin_algebra(name);
    const int n1 = g->layer_dim(1);
    for (int trial = 0; trial < 3; ++trial) {
      RationalMatrix first(static_cast<std::size_t>(n1), std::vector<Rational>(static_cast<std::size_t>(n1)));
      for (auto& row : first)
        for (auto& v : row) v = carnot::test::random_rational(rng, 4, 3);
      std::optional<HHom> L;
      try {
        L = hhom_from_horizontal(g, g, first);
      } catch (const InconsistentExtension&) {
        continue;  // Engel is not free; some first-layer maps have no extension.
      }
      for (int i = 0; i < 10000; ++i) {
        const Point x = carnot::test::random_point(*g, rng), y = carnot::test::random_point(*g, rng);
        const Point lhs = L->apply(group_product(*g, x, y));
        const Point rhs = group_product(*g, L->apply(x), L->apply(y));
        CHECK(max_abs_diff(lhs, rhs) <= 1e-9);
        if (i % 10 == 0) {
          const double r = 0.1 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
          const Point a = L->apply(dilate(*g, r, x)), b = dilate(*g, r, L->apply(x));
          for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12 * std::max(1.0, std::abs(b[k])));
        }
      }
    }
  }
}

TEST_CASE("approximate direction in the full space and a containing halfspace") {
  const auto n = unit_norm(build_heisenberg(1));
  const Point x = make_point(n.alg(), {0.1, 0.2, 0.3});
  const Point zeta = make_point(n.alg(), {1, -1, 0.5});
  for (const auto& A : {DomainSet::full(n), DomainSet::halfspace(n, {1, 0, 0}, 10.0)}) {
    const auto ad = approximate_direction(A, x, zeta, 0.25);
    CHECK(ad.gap == 0.0);
    CHECK(ad.zeta_t == dilate(n.alg(), 0.25, zeta));
  }
}

TEST_CASE("small ball removed around the target gives gap radius over t") {
  const auto n = unit_norm(build_heisenberg(1));
  const auto& g = n.alg();
  const Point x(g), zeta = make_point(g, {1, 0, 0});
  for (double t : {0.5, 0.125}) {
    const double rho = 0.01 * t;
    HoleFamilySpec spec;
    spec.holes.push_back({dilate(g, t, zeta), rho, 0, 0});
    spec.anchors.push_back(Point(g));
    const auto A = DomainSet::hole_family(n, spec);
    const auto ad = approximate_direction(A, x, zeta, t);
    CHECK(A.contains(group_product(g, x, ad.zeta_t)));
    CHECK(ad.gap >= rho / t * (1 - 1e-9));
    CHECK(ad.gap <= rho / t * 1.01);
  }
}

TEST_CASE("ball densities of simple domains") {
  const auto n = unit_norm(build_heisenberg(1));
  const Point x(n.alg());
  for (const auto& s : density_index(DomainSet::full(n), x, {1.0, 0.1}, 2000, 1)) CHECK(s.ratio == 1.0);
  for (const auto& s : density_index(DomainSet::halfspace(n, {1, 0, 0}, 0.0), x, {1.0, 0.5, 0.01}, 20000, 2)) {
    CHECK(std::abs(s.ratio - 0.5) <= 4 * s.stderr_ + 1e-12);
  }
}

TEST_CASE("density of a dyadic hole family matches the hole volumes") {
  // Holes B(delta_{2^-j} X, 2^-j / 4) are disjoint. The ball B(0, 1.25 * 2^-k) contains
  // every hole with j >= k and misses the rest, so the density is
  // 1 - sum_{j >= k} (2^-j / 4 / (1.25 * 2^-k))^Q = 1 - (1/5)^4 * 16/15 for Q = 4.
  const auto n = unit_norm(h1());
  const auto& g = n.alg();
  const auto A = DomainSet::hole_family(n, dyadic_hole_family(n, {Point(g)}, basis_vector<double>(g, 0), 0, 40, 0.25, 1.0));
  const double oracle = 1.0 - std::pow(0.2, 4) * 16.0 / 15.0;
  for (const auto& s : density_index(A, Point(g), {1.25 * 0.5, 1.25 * 0.0625}, 400000, 3)) {
    CAPTURE(s.radius);
    CHECK(std::abs(s.ratio - oracle) <= 4 * s.stderr_);
    CHECK(s.ratio < 1.0 - 8 * s.stderr_);
  }
}

TEST_CASE("directional density series") {
  const auto n = unit_norm(build_heisenberg(1));
  const Point x(n.alg()), zeta = make_point(n.alg(), {1, 0, 0});
  for (const auto& d : directional_density_index(DomainSet::full(n), x, zeta, {1.0, 0.5}, 1000)) CHECK(d.bad_fraction == 0.0);

  ProductMaskSpec half;
  half.excluded = {{{0.5, 1.0}}, {}, {}};
  CHECK(directional_density_index(DomainSet::product_mask(n, half), x, zeta, {1.0}, 100000)[0].bad_fraction ==
        doctest::Approx(0.5).epsilon(1e-4));

  // Holes (2^-k, 2^-k + 4^-k): at t = 2^-m the bad fraction is sum_{k>m} 4^-k / t.
  const auto A = parse_domain("dyadic-mask:0:30", n);
  const auto rows = directional_density_index(A, x, zeta, {0.5, 0.25, 0.125, 0.0625}, 200000);
  const double frozen[] = {0.16666666666666666, 0.083333333333333329, 0.041666666666666664, 0.020833333333333332};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(rows[i].t);
    CHECK(std::abs(rows[i].bad_fraction - frozen[i]) <= 2e-4);
    if (i) CHECK(rows[i].bad_fraction < rows[i - 1].bad_fraction);
  }
}

TEST_CASE("projection to the first coordinate has derivative one") {
  const auto f = registry_map("proj-x");
  const auto est = directional_derivative(f, make_point(f.source_alg(), {0.3, -0.2, 1.0}), make_point(f.source_alg(), {1, 0, 0}));
  REQUIRE(est.converged);
  for (const auto& qk : est.quotients) CHECK(qk[0] == 1.0);
}

TEST_CASE("h-homomorphism quotients equal L zeta at every scale") {
  const auto f = registry_map("swap-h1");
  const auto& g = f.source_alg();
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    const Point x = carnot::test::random_point(g, rng), zeta = carnot::test::random_point(g, rng);
    const Point expected = make_point(g, {zeta[1], zeta[0], -zeta[2]});
    const auto est = directional_derivative(f, x, zeta);
    CHECK(est.converged);
    for (const auto& qk : est.quotients) CHECK(max_abs_diff(qk, expected) < 1e-9);
  }
}

TEST_CASE("right translation quotients follow the conjugation formula") {
  // c^{-1} u c = u + [u, c] in step two, so the quotient is zeta + [zeta, c] / t.
  const auto f = registry_map("right-translate:0.5,-1.25,2");
  const auto& g = f.source_alg();
  const Point zeta = make_point(g, {1, 0, 0});
  DerivativeOptions opt;
  opt.schedule = parse_schedule("1:0.5:12");
  const auto est = directional_derivative(f, Point(g), zeta, opt);
  for (std::size_t k = 0; k < est.scales.size(); ++k) {
    const double t = est.scales[k];
    CHECK(est.quotients[k][0] == 1.0);
    CHECK(est.quotients[k][1] == 0.0);
    CHECK(est.quotients[k][2] == doctest::Approx(-1.25 / t).epsilon(1e-12));
  }
  CHECK(!est.converged);

  const auto along = directional_derivative(f, Point(g), make_point(g, {1, -2.5, 0}), opt);
  CHECK(along.converged);
  CHECK(max_abs_diff(along.limit, make_point(g, {1, -2.5, 0})) == 0.0);
}

TEST_CASE("fitted differentials of analytic maps") {
  std::mt19937_64 rng(4);
  const auto swap = registry_map("swap-h1");
  const auto& g = swap.source_alg();
  for (int i = 0; i < 5; ++i) {
    const Point x = carnot::test::random_point(g, rng, 2.0);
    const auto fit = fit_pansu_differential(swap, x);
    REQUIRE(fit.passed);
    CHECK(std::abs(fit.first_layer[0][0]) < 1e-6);
    CHECK(std::abs(fit.first_layer[0][1] - 1) < 1e-6);
    CHECK(std::abs(fit.first_layer[1][0] - 1) < 1e-6);
    CHECK(std::abs(fit.first_layer[1][1]) < 1e-6);
    CHECK(fit.differential->entry(2, 2) == -1.0);

    const auto lt = fit_pansu_differential(registry_map("left-translate:0.5,-1.25,2"), x);
    REQUIRE(lt.passed);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) CHECK(lt.differential->entry(r, c) == (r == c ? 1.0 : 0.0));
  }

  MapUnderTest constant = swap;
  const Point c = make_point(g, {1, 2, 3});
  constant.eval = [c](const Point&) { return c; };
  constant.exact_eval = [c](const ExactElement&) { return to_exact(c); };
  const auto fit = fit_pansu_differential(constant, make_point(g, {0.1, 0.1, 0.1}));
  REQUIRE(fit.passed);
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col) CHECK(fit.differential->entry(r, col) == 0.0);
}

TEST_CASE("differentiability residuals") {
  const auto& h = h1();
  auto r1 = build_abelian(1);
  const auto source = unit_norm(h);
  const HHom px = hhom_from_horizontal(h, r1, {{q(1), q(0)}});
  const std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625, 0.03125};

  const auto exact = hhom_map("px", px, source, unit_norm(r1));
  for (const auto& s : differentiability_residual(exact, Point(*h), px, radii, 500, 1)) CHECK(s.residual == 0.0);

  // Order-two perturbation: |z1|^2 / d(z) <= d(z), so the curve scales like r.
  MapUnderTest bumped = exact;
  bumped.exact_eval = nullptr;
  bumped.eval = [r1](const Point& p) { return Point(*r1, {p[0] + p[0] * p[0]}); };
  const auto curve = differentiability_residual(bumped, Point(*h), px, radii, 2000, 2);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].residual / radii[i] > 0.5);
    CHECK(curve[i].residual / radii[i] <= 1.0 + 1e-9);
    if (i) CHECK(curve[i].residual < curve[i - 1].residual);
  }

  // max(x, y) has a corner at the origin; no linear map fits it.
  const auto corner = registry_map("corner-max");
  const HHom cx = hhom_from_horizontal(h, corner.target.algebra, {{q(1), q(0)}});
  for (const auto& s : differentiability_residual(corner, Point(*h), cx, radii, 2000, 3)) CHECK(s.residual >= 0.5);
}

TEST_CASE("composition identities") {
  const auto swap = registry_map("swap-h1");
  const auto& g = swap.source_alg();
  const Point x = make_point(g, {0.3, 0.1, -0.2});
  const Point X = make_point(g, {1, 0, 0}), Y = make_point(g, {0, 1, 0});
  CHECK(composition_check(swap, x, X, Y, 2.0, 0.5).discrepancy < 1e-9);

  const auto smooth = registry_map("smooth-h1r");
  DerivativeOptions opt;
  opt.schedule = parse_schedule("1:0.5:30");
  CHECK(composition_check(smooth, x, X, Y, 1.0, 1.0, opt).discrepancy < 1e-4);

  // eta = 0 reduces the identity to the dilation property.
  CHECK(composition_check(smooth, x, X, Point(g), 2.0, 1.0, opt).discrepancy < 1e-4);
  CHECK_THROWS_AS(composition_check(smooth, x, X, Y, 1.0, 0.0, opt), InvalidArgument);
}

TEST_CASE("dilated directions scale the derivative") {
  const auto f = registry_map("smooth-h1r");
  const auto& g = f.source_alg();
  const auto& m = f.target_alg();
  std::mt19937_64 rng(12);
  for (int i = 0; i < 10; ++i) {
    const Point x = carnot::test::random_point(g, rng), zeta = carnot::test::random_point(g, rng);
    const auto base = directional_derivative(f, x, zeta);
    REQUIRE(base.converged);
    for (double a : {0.5, 2.0}) {
      const auto scaled = directional_derivative(f, x, dilate(g, a, zeta));
      REQUIRE(scaled.converged);
      CHECK(hdist(f.target, scaled.limit, dilate(m, a, base.limit)) <= 2 * scaled.tolerance);
    }
  }
}

TEST_CASE("limits do not depend on the sampled approximating curve") {
  // An opaque predicate forces the randomized shell search.
  auto f = registry_map("smooth-h1r");
  f.domain = DomainSet::custom(f.source, "left-half", [](const Point& p) { return p[0] <= 0.0; });
  const auto& g = f.source_alg();
  const Point x = make_point(g, {-0.01, 0.2, 0.1}), zeta = make_point(g, {1, 0.3, 0.2});
  DerivativeOptions a, b;
  a.seed = 1;
  b.seed = 977;
  const auto ea = directional_derivative(f, x, zeta, a);
  const auto eb = directional_derivative(f, x, zeta, b);
  REQUIRE(ea.converged);
  REQUIRE(eb.converged);
  CHECK(hdist(f.target, ea.limit, eb.limit) < 2 * ea.tolerance);
}
