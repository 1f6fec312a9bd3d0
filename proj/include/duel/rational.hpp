#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace duel {

// Exact arithmetic backend for algebraic identity checks. Kept separate from
// the double-precision kernels used in hot loops.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Rational from a decimal literal pair, e.g. rational(9, 10) = 9/10.
inline Rational rational(long long num, long long den) {
  return Rational(num) / Rational(den);
}

}  // namespace duel
