#include <functional>

#include "doctest.h"
#include "support.hpp"
#include "carnot/algebra.hpp"
#include "carnot/algebra_io.hpp"
#include "carnot/free_nilpotent.hpp"
#include "carnot/verify.hpp"

using namespace carnot;
using carnot::test::make_exact;
using carnot::test::random_exact;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }

// Term-by-term Dynkin sum: enumerate every 2k-tuple directly and build the
// left-nested product letter by letter. Shares no code with the library's
// coefficient tables or trie walk.
ExactElement naive_dynkin(const GradedAlgebra& alg, int m, const ExactElement& x, const ExactElement& y) {
  ExactElement total(alg);
  std::vector<int> parts;
  std::function<void(int)> rec = [&](int remaining) {
    if (remaining == 0) {
      const int k = static_cast<int>(parts.size()) / 2;
      Rational coeff = q(k % 2 == 1 ? 1 : -1, k * m);
      std::vector<int> letters;
      for (int i = 0; i < k; ++i) {
        for (int f = 2; f <= parts[2 * i]; ++f) coeff /= f;
        for (int f = 2; f <= parts[2 * i + 1]; ++f) coeff /= f;
        letters.insert(letters.end(), parts[2 * i], 0);
        letters.insert(letters.end(), parts[2 * i + 1], 1);
      }
      ExactElement acc = letters[0] == 0 ? x : y;
      for (std::size_t l = 1; l < letters.size(); ++l) acc = bracket(alg, acc, letters[l] == 0 ? x : y);
      total = add(total, scale(coeff, acc));
      return;
    }
    for (int p = 0; p <= remaining; ++p) {
      for (int r = 0; p + r <= remaining; ++r) {
        if (p + r == 0) continue;
        parts.push_back(p);
        parts.push_back(r);
        rec(remaining - p - r);
        parts.pop_back();
        parts.pop_back();
      }
    }
  };
  rec(m);
  return total;
}

}  // namespace

TEST_CASE("heisenberg bracket table") {
  auto h = build_heisenberg(1);
  const auto X = basis_vector<Rational>(*h, 0);
  const auto Y = basis_vector<Rational>(*h, 1);
  const auto T = basis_vector<Rational>(*h, 2);
  CHECK(bracket(*h, X, Y) == T);
  CHECK(bracket(*h, Y, X) == scale(q(-1), T));
  CHECK(bracket(*h, X, T).is_zero());
  CHECK(h->dim() == 3);
  CHECK(h->step() == 2);
  CHECK(h->hom_dim() == 4);
  std::mt19937_64 rng(1);
  for (int n = 0; n < 20; ++n) {
    const auto x = random_exact(*h, rng);
    CHECK(bracket(*h, x, x).is_zero());
  }
}

TEST_CASE("dynkin polynomial of degree two is half the bracket") {
  auto alg = build_free_nilpotent(2, 4);
  std::mt19937_64 rng(2);
  for (int n = 0; n < 20; ++n) {
    const auto x = random_exact(*alg, rng);
    const auto y = random_exact(*alg, rng);
    CHECK(dynkin_polynomial(*alg, 2, x, y) == scale(q(1, 2), bracket(*alg, x, y)));
    for (int m = 2; m <= 4; ++m) CHECK(dynkin_polynomial(*alg, m, x, ExactElement(*alg)).is_zero());
  }
  CHECK_THROWS_AS(dynkin_polynomial(*alg, 5, ExactElement(*alg), ExactElement(*alg)), InvalidArgument);
  CHECK_THROWS_AS(dynkin_polynomial(*alg, 1, ExactElement(*alg), ExactElement(*alg)), InvalidArgument);
}

TEST_CASE("dynkin degree three in the free rank-2 step-3 algebra") {
  auto alg = build_free_nilpotent(2, 3);
  REQUIRE(alg->labels()[3] == "[X1,[X1,X2]]");
  REQUIRE(alg->labels()[4] == "[X2,[X1,X2]]");
  const auto X = basis_vector<Rational>(*alg, 0);
  const auto Y = basis_vector<Rational>(*alg, 1);
  const auto p3 = dynkin_polynomial(*alg, 3, X, Y);
  CHECK(p3 == make_exact(*alg, {q(0), q(0), q(0), q(1, 12), q(-1, 12)}));
  CHECK(p3 == naive_dynkin(*alg, 3, X, Y));
}

TEST_CASE("library dynkin terms match direct enumeration") {
  std::mt19937_64 rng(3);
  for (auto alg : {build_free_nilpotent(2, 4), build_free_nilpotent(3, 3), build_engel(), build_free_nilpotent(2, 5)}) {
    for (int n = 0; n < 5; ++n) {
      const auto x = random_exact(*alg, rng);
      const auto y = random_exact(*alg, rng);
      for (int m = 2; m <= alg->step(); ++m) CHECK(dynkin_polynomial(*alg, m, x, y) == naive_dynkin(*alg, m, x, y));
    }
  }
}

TEST_CASE("group product basics") {
  auto h = build_heisenberg(1);
  const auto p = group_product(*h, make_exact(*h, {q(1), q(0), q(0)}), make_exact(*h, {q(0), q(1), q(0)}));
  CHECK(p == make_exact(*h, {q(1), q(1), q(1, 2)}));
  std::mt19937_64 rng(4);
  const ExactElement zero(*h);
  for (int n = 0; n < 20; ++n) {
    const auto x = random_exact(*h, rng);
    CHECK(group_product(*h, x, zero) == x);
    CHECK(group_product(*h, zero, x) == x);
    CHECK(group_product(*h, x, group_inverse(x)).is_zero());
  }
}

TEST_CASE("heisenberg center term against the coordinate formula") {
  // In coordinates s = 2t the product reads s'' = s + s' + <h1,h2'> - <h2,h1'>.
  for (int n = 1; n <= 3; ++n) {
    auto h = build_heisenberg(n);
    std::mt19937_64 rng(5 + n);
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_exact(*h, rng);
      const auto b = random_exact(*h, rng);
      const auto p = group_product(*h, a, b);
      Rational symplectic = 0;
      for (int i = 0; i < n; ++i) symplectic += a[i] * b[n + i] - a[n + i] * b[i];
      const Rational s = 2 * a[2 * n] + 2 * b[2 * n] + symplectic;
      CHECK(2 * p[2 * n] == s);
      for (int i = 0; i < 2 * n; ++i) CHECK(p[i] == a[i] + b[i]);
    }
  }
}

TEST_CASE("dilation and projection") {
  auto h = build_heisenberg(1);
  CHECK(dilate(*h, q(2), make_exact(*h, {q(1), q(1), q(1)})) == make_exact(*h, {q(2), q(2), q(4)}));
  CHECK(project(*h, 2, make_exact(*h, {q(3), q(4), q(5)})) == make_exact(*h, {q(0), q(0), q(5)}));
  CHECK_THROWS_AS(dilate(*h, q(0), ExactElement(*h)), InvalidArgument);
  CHECK_THROWS_AS(dilate(*h, q(-1), ExactElement(*h)), InvalidArgument);
  CHECK_THROWS_AS(project(*h, 3, ExactElement(*h)), InvalidArgument);
  CHECK_THROWS_AS(project(*h, 0, ExactElement(*h)), InvalidArgument);
}

TEST_CASE("mismatched algebras are rejected") {
  auto a = build_heisenberg(1);
  auto b = build_heisenberg(1);
  CHECK_THROWS_AS(bracket(*a, ExactElement(*a), ExactElement(*b)), AlgebraMismatch);
  CHECK_THROWS_AS(group_product(*a, ExactElement(*b), ExactElement(*a)), AlgebraMismatch);
  CHECK_THROWS_AS(Point(*a, {1.0, 2.0}), InvalidArgument);
}

TEST_CASE("exact group identities on builtin algebras") {
  std::vector<AlgebraPtr> algebras{build_heisenberg(1), build_heisenberg(2), build_heisenberg(3), build_engel(),
                                   build_free_nilpotent(2, 3), build_free_nilpotent(2, 4), build_free_nilpotent(3, 3),
                                   build_abelian(3)};
  std::mt19937_64 rng(11);
  for (const auto& alg : algebras) {
    CAPTURE(alg->name());
    for (int n = 0; n < 30; ++n) {
      const auto x = random_exact(*alg, rng);
      const auto y = random_exact(*alg, rng);
      const auto z = random_exact(*alg, rng);
      CHECK(group_product(*alg, group_product(*alg, x, y), z) == group_product(*alg, x, group_product(*alg, y, z)));
      const Rational r = test::random_rational(rng, 5, 3) * test::random_rational(rng, 5, 3) + q(1, 7);
      const Rational rr = r > 0 ? r : -r;
      if (sgn(rr) != 0) {
        CHECK(dilate(*alg, rr, group_product(*alg, x, y)) ==
              group_product(*alg, dilate(*alg, rr, x), dilate(*alg, rr, y)));
        CHECK(dilate(*alg, rr, bracket(*alg, x, y)) == bracket(*alg, dilate(*alg, rr, x), dilate(*alg, rr, y)));
      }
    }
  }
}

TEST_CASE("abelian product is vector addition") {
  auto alg = build_abelian(4);
  std::mt19937_64 rng(12);
  for (int n = 0; n < 20; ++n) {
    const auto x = random_exact(*alg, rng);
    const auto y = random_exact(*alg, rng);
    CHECK(group_product(*alg, x, y) == add(x, y));
  }
}

TEST_CASE("double and exact products agree") {
  auto alg = build_free_nilpotent(2, 4);
  std::mt19937_64 rng(13);
  for (int n = 0; n < 20; ++n) {
    const auto x = random_exact(*alg, rng);
    const auto y = random_exact(*alg, rng);
    const auto exact = to_double(group_product(*alg, x, y));
    const auto approx = group_product(*alg, to_double(x), to_double(y));
    for (std::size_t i = 0; i < exact.size(); ++i) CHECK(approx[i] == doctest::Approx(exact[i]).epsilon(1e-12));
  }
}

TEST_CASE("dynkin coefficients") {
  // P_2 = ([x,y] - [y,x]) / 4.
  CHECK(dynkin_coefficient(2, 0b10) == q(1, 4));
  CHECK(dynkin_coefficient(2, 0b01) == q(-1, 4));
  CHECK(dynkin_coefficient(2, 0b00) == q(0));
}

TEST_CASE("free nilpotent dimensions") {
  CHECK(witt_dimensions(2, 5) == std::vector<long>{2, 1, 2, 3, 6});
  CHECK(witt_dimensions(3, 4) == std::vector<long>{3, 3, 8, 18});
  auto f23 = build_free_nilpotent(2, 3);
  CHECK(f23->dim() == 5);
  CHECK(std::vector<int>(f23->layer_dims().begin(), f23->layer_dims().end()) == std::vector<int>{2, 1, 2});
  auto f11 = build_free_nilpotent(1, 5);
  CHECK(f11->dim() == 1);
  CHECK(f11->is_abelian());
  CHECK(f11->step() == 1);
  CHECK_THROWS_AS(build_free_nilpotent(2, 10), DimensionCapExceeded);
  CHECK_NOTHROW(build_free_nilpotent(2, 8));
  CHECK_THROWS_AS(build_free_nilpotent(4, 4, 50), DimensionCapExceeded);
}

TEST_CASE("free rank-2 step-2 is the heisenberg algebra") {
  auto f = build_free_nilpotent(2, 2);
  auto h = build_heisenberg(1);
  REQUIRE(f->structure().size() == h->structure().size());
  for (std::size_t t = 0; t < f->structure().size(); ++t) {
    CHECK(f->structure()[t].i == h->structure()[t].i);
    CHECK(f->structure()[t].j == h->structure()[t].j);
    CHECK(f->structure()[t].k == h->structure()[t].k);
    CHECK(f->structure()[t].value == h->structure()[t].value);
  }
}

TEST_CASE("verify builtin algebras") {
  for (auto alg : {build_heisenberg(1), build_heisenberg(3), build_engel(), build_free_nilpotent(2, 5),
                   build_free_nilpotent(3, 4), build_abelian(1)}) {
    CAPTURE(alg->name());
    const auto report = verify_algebra(*alg);
    CHECK(report.passed());
    CHECK(report.violations.empty());
  }
}

TEST_CASE("abelian algebra is stratified only at step one") {
  GradedAlgebra two_layer("ab", {1, 1}, {}, {}, true);
  const auto r = verify_algebra(two_layer);
  CHECK(r.antisymmetry);
  CHECK(r.jacobi);
  CHECK(r.grading);
  CHECK_FALSE(r.rank_condition);
  CHECK_FALSE(r.passed());
  GradedAlgebra unflagged("ab", {1, 1}, {}, {}, false);
  CHECK(verify_algebra(unflagged).passed());
}

TEST_CASE("injected bad table is reported") {
  // [X,Y] = T, [X,T] = Y: X-T bracket lands in layer 1.
  GradedAlgebra bad("bad", {2, 1}, {"X", "Y", "T"}, {{0, 1, 2, q(1)}, {0, 2, 1, q(1)}}, true);
  const auto r = verify_algebra(bad);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.grading);
  // Only one triple exists and its cyclic sum is 0 + [Y,-Y] + [T,T] = 0.
  CHECK(r.jacobi);
  bool saw_grading = false;
  for (const auto& v : r.violations) saw_grading |= v.check == "grading" && v.i == 0 && v.j == 2 && v.k == 1;
  CHECK(saw_grading);
}

TEST_CASE("json round trip and schema errors") {
  auto f = build_free_nilpotent(2, 4);
  auto doc = algebra_to_json(*f);
  auto back = algebra_from_json(doc);
  CHECK(back->dim() == f->dim());
  CHECK(back->structure().size() == f->structure().size());
  CHECK(back->is_stratified());
  std::mt19937_64 rng(21);
  const auto x = random_exact(*f, rng);
  const auto y = random_exact(*f, rng);
  CHECK(group_product(*back, ExactElement(*back, {x.coords().begin(), x.coords().end()}),
                      ExactElement(*back, {y.coords().begin(), y.coords().end()}))
            .coords()
            .size() == 8);
  auto reversed = doc;
  reversed["brackets"][0]["i"] = 1;
  reversed["brackets"][0]["j"] = 0;
  CHECK_THROWS_AS(algebra_from_json(reversed), InvalidAlgebra);
  auto unknown = doc;
  unknown["extra"] = 1;
  CHECK_THROWS_AS(algebra_from_json(unknown), InvalidAlgebra);
  nlohmann::json bad = {{"dim", 3}, {"step", 2}, {"layer_dims", {2, 1}},
                        {"brackets", {{{"i", 0}, {"j", 1}, {"coeffs", {{{"k", 2}, {"num", 1}}}}},
                                      {{"i", 0}, {"j", 2}, {"coeffs", {{{"k", 1}, {"num", "1"}, {"den", "1"}}}}}}}};
  CHECK_THROWS_AS(algebra_from_json(bad), InvalidAlgebra);
  CHECK_NOTHROW(algebra_from_json(bad, false));
  nlohmann::json inferred = {{"dim", 3}, {"step", 2}, {"layer_dims", {2, 1}},
                             {"brackets", {{{"i", 0}, {"j", 1}, {"coeffs", {{{"k", 2}, {"num", 1}}}}}}}};
  CHECK(algebra_from_json(inferred)->is_stratified());
}
