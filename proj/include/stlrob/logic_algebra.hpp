#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

#include "stlrob/error.hpp"

namespace stlrob {

/// [f]_+ : f if f > 0, else 0.
constexpr double positive_part(double f) noexcept { return f > 0.0 ? f : 0.0; }

/// [f]_- = -[-f]_+ : f if f < 0, else 0.
constexpr double negative_part(double f) noexcept { return -positive_part(-f); }

namespace detail {

// Conjunction over sign*x_i, returned multiplied by sign again. sign = -1
// gives the disjunction through ▽(x) = -△(-x), so both operators share one
// arithmetic path and DeMorgan holds bit-for-bit, except at operands that are
// exactly 0: the conjunction needs every operand > 0 for its geometric branch
// while the disjunction takes its geometric branch when none is > 0.
inline double agm_and_signed(std::span<const double> xs, double sign) noexcept {
  const std::size_t m = xs.size();
  bool all_equal = true;
  bool geometric = true;
  for (double x : xs) {
    all_equal = all_equal && x == xs.front();
    geometric = geometric && (sign > 0.0 ? x > 0.0 : x <= 0.0);
  }
  // Mean of m equal values is that value; skip the rounding of the long path.
  if (all_equal) return xs.front();

  double acc = 0.0;
  if (geometric) {
    // m-th root of prod(1 + y_i), minus 1, in log space.
    for (double x : xs) acc += std::log1p(sign * x);
    return sign * std::expm1(acc / static_cast<double>(m));
  }
  for (double x : xs) acc += negative_part(sign * x);
  return sign * (acc / static_cast<double>(m));
}

inline void check_score(double x, const char* what) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + ": argument " + std::to_string(x) + " outside [-1,1]");
  }
}

}  // namespace detail

/// n-ary AGM conjunction: shifted geometric mean when every operand is
/// strictly positive, otherwise the arithmetic mean of the negative parts.
/// Also the Globally rule over the scores of a time window.
inline double agm_and(std::span<const double> xs) noexcept {
  return detail::agm_and_signed(xs, 1.0);
}

/// n-ary AGM disjunction: arithmetic mean of the positive parts when any
/// operand is strictly positive, otherwise 1 - geometric mean of (1 - x_i).
/// Also the Eventually rule over the scores of a time window.
inline double agm_or(std::span<const double> xs) noexcept {
  return detail::agm_and_signed(xs, -1.0);
}

/// Conjunction function △ on [-1,1]².
inline double conj(double x, double y) {
  detail::check_score(x, "conj");
  detail::check_score(y, "conj");
  const double xs[] = {x, y};
  return agm_and(xs);
}

/// Disjunction function ▽ on [-1,1]².
inline double disj(double x, double y) {
  detail::check_score(x, "disj");
  detail::check_score(y, "disj");
  const double xs[] = {x, y};
  return agm_or(xs);
}

inline double neg(double x) {
  detail::check_score(x, "neg");
  return -x;
}

/// Implication ▷(x, y) = ▽(-x, y).
inline double implies(double x, double y) {
  detail::check_score(x, "implies");
  detail::check_score(y, "implies");
  return disj(-x, y);
}

}  // namespace stlrob
