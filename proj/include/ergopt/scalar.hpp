#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>

#include "ergopt/error.hpp"

namespace ergopt {

// Expression templates off so `auto x = a + b` holds a value.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;

/// Arithmetic policy for the two supported scalar types. Exact arithmetic
/// compares with zero tolerance; doubles use the LP tolerance of 1e-9.
template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational tolerance() { return Rational(0); }
  static Rational pivot_tolerance() { return Rational(0); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double tolerance() { return 1e-9; }
  static double pivot_tolerance() { return 1e-12; }
};

template <typename S>
inline constexpr bool is_exact_v = ScalarTraits<S>::exact;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <typename S>
S from_rational(const Rational& q) {
  if constexpr (std::is_same_v<S, Rational>) {
    return q;
  } else {
    return to_double(q);
  }
}

template <typename S>
bool is_zero(const S& x) {
  if constexpr (is_exact_v<S>) {
    return x == 0;
  } else {
    return std::abs(x) <= ScalarTraits<S>::tolerance();
  }
}

template <typename S>
bool approx_equal(const S& a, const S& b) {
  return is_zero<S>(S(a - b));
}

template <typename S>
S abs_value(const S& x) {
  return x < 0 ? S(-x) : x;
}

/// Parses "p/q", integers, and finite decimals ("-0.75", "1e-3") exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational {
    throw Error(ErrorKind::ParseError, "not a rational number: '" + s + "'");
  };
  if (s.empty()) return fail();
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      boost::multiprecision::mpz_int num(s.substr(0, slash));
      boost::multiprecision::mpz_int den(s.substr(slash + 1));
      if (den == 0) return fail();
      return Rational(num, den);
    }
    std::string mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
      mantissa = s.substr(0, e);
      exponent = std::stol(s.substr(e + 1));
    }
    bool negative = false;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
      negative = mantissa[0] == '-';
      mantissa.erase(0, 1);
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (char c : mantissa) {
      if (c == '.') {
        if (seen_point) return fail();
        seen_point = true;
      } else if (c >= '0' && c <= '9') {
        digits.push_back(c);
        if (seen_point) ++frac_digits;
      } else {
        return fail();
      }
    }
    if (digits.empty()) return fail();
    boost::multiprecision::mpz_int num(digits);
    long shift = exponent - frac_digits;
    boost::multiprecision::mpz_int scale = boost::multiprecision::pow(
        boost::multiprecision::mpz_int(10), static_cast<unsigned>(shift < 0 ? -shift : shift));
    Rational q = shift < 0 ? Rational(num, scale) : Rational(num * scale);
    return negative ? Rational(-q) : q;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    return fail();
  }
}

inline std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

}  // namespace ergopt
