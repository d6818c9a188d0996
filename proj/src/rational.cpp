#include "carnot/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "carnot/errors.hpp"

namespace carnot {

Rational make_rational(long num, long den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational make_rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace {

mpz_class parse_integer(std::string_view digits, std::string_view original) {
  if (digits.empty()) throw InvalidArgument("malformed number '" + std::string(original) + "'");
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw InvalidArgument("malformed number '" + std::string(original) + "'");
    }
  }
  return mpz_class(std::string(digits), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InvalidArgument("empty number");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (sgn(den) == 0) throw InvalidArgument("rational with zero denominator");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = text.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    mpz_class ev = parse_integer(exp_text, original);
    if (!ev.fits_slong_p() || abs(ev) > 4096) throw InvalidArgument("exponent out of range in '" + std::string(original) + "'");
    exponent = ev.get_si();
    if (exp_negative) exponent = -exponent;
    text = text.substr(0, e);
  }
  std::string digits;
  long fraction_digits = 0;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw InvalidArgument("malformed number '" + std::string(original) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    fraction_digits = static_cast<long>(frac_part.size());
  } else {
    digits = std::string(text);
  }
  mpz_class mantissa = parse_integer(digits, original);
  const long shift = exponent - fraction_digits;
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational q = shift >= 0 ? Rational(mantissa * power) : make_rational(mantissa, power);
  if (negative) q = -q;
  return q;
}

Rational exact_from_double(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("cannot convert non-finite double to a rational");
  Rational q(value);
  q.canonicalize();
  return q;
}

double to_double(const Rational& value) {
  // mpq_get_d truncates; pick the nearest of the truncated value and its
  // upward neighbour so conversions are correctly rounded.
  const double truncated = value.get_d();
  if (!std::isfinite(truncated)) return truncated;
  const double away = std::nextafter(truncated, sgn(value) >= 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(away)) return truncated;
  const Rational err_truncated = abs(value - Rational(truncated));
  const Rational err_away = abs(value - Rational(away));
  return err_away < err_truncated ? away : truncated;
}

std::string to_string(const Rational& value) { return value.get_str(); }

}  // namespace carnot
