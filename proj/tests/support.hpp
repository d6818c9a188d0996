#pragma once

#include <random>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot::test {

inline Rational random_rational(std::mt19937_64& rng, int max_num = 9, int max_den = 6) {
  std::uniform_int_distribution<int> num(-max_num, max_num);
  std::uniform_int_distribution<int> den(1, max_den);
  return make_rational(num(rng), den(rng));
}

inline ExactElement random_exact(const GradedAlgebra& alg, std::mt19937_64& rng) {
  std::vector<Rational> c;
  for (int i = 0; i < alg.dim(); ++i) c.push_back(random_rational(rng));
  return ExactElement(alg, std::move(c));
}

inline Point random_point(const GradedAlgebra& alg, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c;
  for (int i = 0; i < alg.dim(); ++i) c.push_back(u(rng));
  return Point(alg, std::move(c));
}

inline Point make_point(const GradedAlgebra& alg, std::vector<double> c) { return Point(alg, std::move(c)); }

inline ExactElement make_exact(const GradedAlgebra& alg, std::vector<Rational> c) {
  return ExactElement(alg, std::move(c));
}

}  // namespace carnot::test
