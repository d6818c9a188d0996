#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace carnot {

/// Exact rational scalar. mpq_class keeps values canonical (lowest terms,
/// positive denominator) as long as construction goes through make_rational.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
Rational make_rational(const mpz_class& num, const mpz_class& den);

/// Parses "3", "-3/4" or a finite decimal such as "0.125" or "-2.5e-3" exactly.
Rational parse_rational(std::string_view text);

/// Exact conversion: every finite double is a dyadic rational.
Rational exact_from_double(double value);

double to_double(const Rational& value);

std::string to_string(const Rational& value);

template <class T>
T scalar_cast(double value);

template <>
inline double scalar_cast<double>(double value) {
  return value;
}

template <>
inline Rational scalar_cast<Rational>(double value) {
  return exact_from_double(value);
}

inline bool is_zero(double value) { return value == 0.0; }
inline bool is_zero(const Rational& value) { return sgn(value) == 0; }

}  // namespace carnot
