#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace barsample {

using Rational = boost::rational<std::int64_t>;

// Parses "1/10", "0.1", "5" or "-2.25" into an exact rational.
// Throws DomainError on anything else.
Rational parse_rational(std::string_view text);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Smallest integer >= r.
inline std::int64_t ceil(const Rational& r) {
  const auto n = r.numerator();
  const auto d = r.denominator();  // always positive
  return n >= 0 ? (n + d - 1) / d : -((-n) / d);
}

std::string to_string(const Rational& r);

}  // namespace barsample
