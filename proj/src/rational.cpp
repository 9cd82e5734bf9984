#include "bplab/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace bplab {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("not a rational: '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t den = parse_int(text.substr(slash + 1), whole);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(whole) + "'");
    return Rational(parse_int(text.substr(0, slash), whole), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("too many decimals in '" + std::string(whole) + "'");
    std::string_view ip = text.substr(0, dot);
    bool neg = !ip.empty() && ip.front() == '-';
    if (neg || (!ip.empty() && ip.front() == '+')) ip.remove_prefix(1);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational r(ip.empty() ? 0 : parse_int(ip, whole));
    if (!frac.empty()) r += Rational(parse_int(frac, whole), scale);
    return neg ? -r : r;
  }
  return Rational(parse_int(text, whole));
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rational pow2(int j) {
  if (j > 62 || j < -62) throw std::out_of_range("pow2: exponent out of range");
  return j >= 0 ? Rational(std::int64_t{1} << j) : Rational(1, std::int64_t{1} << -j);
}

Rational floor_rational(const Rational& q) {
  std::int64_t n = q.numerator(), d = q.denominator();
  std::int64_t f = n / d;
  if ((n % d != 0) && (n < 0)) --f;
  return Rational(f);
}

}  // namespace bplab
