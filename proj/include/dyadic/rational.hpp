#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace dyadic {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", "p" or "-p/q". Throws InvalidInput on malformed text or q = 0.
Rational parse_rational(std::string_view text);

/// Always renders with an explicit denominator ("3/8", "0/1", "1/1").
std::string to_string(const Rational& value);

/// 2^exponent for any sign of exponent.
Rational pow2(int exponent);

/// count / 2^resolution.
Rational dyadic_measure(std::uint64_t count, int resolution);

/// Distance from x to the nearest integer.
Rational distance_to_integer(const Rational& x);

}  // namespace dyadic
