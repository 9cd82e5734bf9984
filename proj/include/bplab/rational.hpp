#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace bplab {

using Rational = boost::rational<std::int64_t>;

// Parses "a", "a/b" or a terminating decimal such as "-0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

inline double to_double(const Rational& q) {
  return boost::rational_cast<double>(q);
}

// 2^j as an exact rational, j of either sign.
Rational pow2(int j);

Rational floor_rational(const Rational& q);  // largest integer <= q
inline Rational abs(const Rational& q) { return q.numerator() < 0 ? -q : q; }

}  // namespace bplab
