#include "barsample/rational.hpp"

#include <charconv>
#include <limits>

#include "barsample/error.hpp"

namespace barsample {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end)
    throw DomainError("not a rational number: '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  Rational r;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(text.substr(slash + 1), whole);
    if (den == 0) throw DomainError("zero denominator: '" + std::string(whole) + "'");
    r = Rational(parse_int(text.substr(0, slash), whole), den);
  } else if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 17) throw DomainError("too many decimals: '" + std::string(whole) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const auto ip = text.substr(0, dot);
    const std::int64_t int_part = ip.empty() ? 0 : parse_int(ip, whole);
    const std::int64_t frac_part = frac.empty() ? 0 : parse_int(frac, whole);
    if (ip.empty() && frac.empty()) throw DomainError("not a rational number: '" + std::string(whole) + "'");
    r = Rational(int_part) + Rational(frac_part, scale);
  } else {
    r = Rational(parse_int(text, whole));
  }
  return negative ? -r : r;
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace barsample
