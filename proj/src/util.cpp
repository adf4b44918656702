#include "capbound/types.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace capbound {

Rational rational_from_decimal(std::string_view text) {
  using Int = boost::multiprecision::cpp_int;
  std::size_t pos = 0;
  const auto fail = [&] {
    throw std::invalid_argument("malformed decimal literal: " +
                                std::string(text));
  };
  if (text.empty()) fail();

  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }

  Int mantissa = 0;
  long frac_digits = 0;
  bool any_digit = false;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (seen_dot) fail();
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      any_digit = true;
    } else {
      break;
    }
  }
  if (!any_digit) fail();

  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    bool exp_neg = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_neg = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size()) fail();
    long value = 0;
    for (; pos < text.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) fail();
      value = value * 10 + (text[pos] - '0');
      if (value > 1000000) fail();
    }
    exponent = exp_neg ? -value : value;
  }
  if (pos != text.size()) fail();

  const long net = exponent - frac_digits;
  Int num = mantissa;
  Int den = 1;
  if (net >= 0) {
    num *= boost::multiprecision::pow(Int(10), static_cast<unsigned>(net));
  } else {
    den = boost::multiprecision::pow(Int(10), static_cast<unsigned>(-net));
  }
  if (negative) num = -num;
  return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational rational_from(double x) { return Rational(x); }

}  // namespace capbound
