#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "pirlab/error.hpp"

namespace pirlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  return Rational(num, den);
}

inline BigInt pow_int(std::uint64_t base, unsigned exponent) {
  BigInt r = 1;
  for (unsigned i = 0; i < exponent; ++i) r *= base;
  return r;
}

inline Rational pow_rational(const Rational& base, unsigned exponent) {
  Rational r = 1;
  for (unsigned i = 0; i < exponent; ++i) r *= base;
  return r;
}

/// Always "num/den", including integers ("2/1") and zero ("0/1").
inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r) << '/' << boost::multiprecision::denominator(r);
  return os.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Shortest decimal rendering for display: "1.5", "2", "0.666667".
inline std::string to_decimal(const Rational& r) {
  std::ostringstream os;
  os.precision(6);
  os << to_double(r);
  return os.str();
}

namespace detail {

// Boost reads a leading 0 as octal and 0x as hex; accept plain decimal only.
inline BigInt parse_decimal_integer(std::string digits) {
  bool negative = false;
  if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
    negative = digits[0] == '-';
    digits.erase(0, 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw InvalidArgument("not an integer: " + digits);
  const auto first = digits.find_first_not_of('0');
  BigInt value = first == std::string::npos ? BigInt(0) : BigInt(digits.substr(first));
  return negative ? BigInt(-value) : value;
}

}  // namespace detail

/// Parses "3", "-2/7" or a finite decimal such as "0.25" exactly.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw InvalidArgument("empty number");
  std::string s(text);
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      BigInt num = detail::parse_decimal_integer(s.substr(0, slash));
      BigInt den = detail::parse_decimal_integer(s.substr(slash + 1));
      return make_rational(num, den);
    }
    bool negative = false;
    std::size_t start = 0;
    if (s[0] == '-' || s[0] == '+') {
      negative = s[0] == '-';
      start = 1;
    }
    std::string digits;
    BigInt den = 1;
    bool seen_point = false;
    for (std::size_t i = start; i < s.size(); ++i) {
      const char c = s[i];
      if (c == '.' && !seen_point) {
        seen_point = true;
      } else if (c >= '0' && c <= '9') {
        digits.push_back(c);
        if (seen_point) den *= 10;
      } else {
        throw InvalidArgument("not a number: " + s);
      }
    }
    if (digits.empty()) throw InvalidArgument("not a number: " + s);
    BigInt num = detail::parse_decimal_integer(digits);
    if (negative) num = -num;
    return make_rational(num, den);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const Error*>(&e) != nullptr) throw;
    throw InvalidArgument("not a number: " + s);
  }
}

}  // namespace pirlab
