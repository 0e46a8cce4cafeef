#include "dyadic/rational.hpp"

#include <cctype>

#include "dyadic/errors.hpp"

namespace dyadic {
namespace {

Integer parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw InvalidInput("malformed rational '" + std::string(whole) + "'");
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) throw InvalidInput("malformed rational '" + std::string(whole) + "'");
  Integer value = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw InvalidInput("malformed rational '" + std::string(whole) + "'");
    }
    value = value * 10 + (text[i] - '0');
  }
  return negative ? Integer(-value) : value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(t, text));
  const Integer num = parse_integer(trim(t.substr(0, slash)), text);
  const Integer den = parse_integer(trim(t.substr(slash + 1)), text);
  if (den == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& value) {
  return numerator(value).str() + "/" + denominator(value).str();
}

Rational pow2(int exponent) {
  Integer p = 1;
  p <<= (exponent < 0 ? -exponent : exponent);
  return exponent < 0 ? Rational(Integer(1), p) : Rational(p);
}

Rational dyadic_measure(std::uint64_t count, int resolution) {
  Integer den = 1;
  den <<= resolution;
  return Rational(Integer(count), den);
}

Rational distance_to_integer(const Rational& x) {
  const Integer& num = numerator(x);
  const Integer& den = denominator(x);
  Integer rem = num % den;  // sign follows num
  if (rem < 0) rem += den;
  Integer other = den - rem;
  return Rational(rem < other ? rem : other, den);
}

}  // namespace dyadic
