#pragma once

#include <cmath>
#include <string>

#include "isomed/errors.hpp"

namespace isomed {

namespace detail {

inline double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

/// Continued fraction for the incomplete beta function (modified Lentz).
/// Converges fast for x < (a+1)/(a+b+2).
inline double incomplete_beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw ArgumentError("regularized_incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - detail::log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::incomplete_beta_cf(x, a, b) / a;
  return 1.0 - front * detail::incomplete_beta_cf(1.0 - x, b, a) / b;
}

/// Upper-tail probability P(T > t) for Student's t with nu degrees of freedom.
inline double student_t_upper_tail(double t, long nu) {
  if (nu < 1) throw ArgumentError("student_t_upper_tail: nu must be >= 1");
  const double v = static_cast<double>(nu);
  const double tail = 0.5 * regularized_incomplete_beta(v / (v + t * t), 0.5 * v, 0.5);
  return t >= 0.0 ? tail : 1.0 - tail;
}

/// Upper-tail Student t quantile: the t with P(T > t) = p, found by
/// bisection of the incomplete-beta CDF to absolute tolerance 1e-10.
inline double t_quantile(double p, long nu) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("t_quantile: p must be in (0, 1)");
  if (nu < 1) throw ArgumentError("t_quantile: nu must be >= 1");
  if (p == 0.5) return 0.0;
  if (p > 0.5) return -t_quantile(1.0 - p, nu);
  double lo = 0.0, hi = 1.0;
  while (student_t_upper_tail(hi, nu) > p) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (student_t_upper_tail(mid, nu) > p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace isomed
