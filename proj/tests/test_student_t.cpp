#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "isomed/student_t.hpp"

using isomed::regularized_incomplete_beta;
using isomed::student_t_upper_tail;
using isomed::t_quantile;
using Catch::Matchers::WithinAbs;

TEST_CASE("regularized incomplete beta basics") {
  // I_x(1,1) = x
  for (double x : {0.1, 0.25, 0.5, 0.9})
    REQUIRE_THAT(regularized_incomplete_beta(x, 1.0, 1.0), WithinAbs(x, 1e-13));
  // complement identity
  for (double x : {0.05, 0.3, 0.77}) {
    const double a = 2.5, b = 7.0;
    REQUIRE_THAT(regularized_incomplete_beta(x, a, b) +
                     regularized_incomplete_beta(1.0 - x, b, a),
                 WithinAbs(1.0, 1e-12));
  }
  REQUIRE(regularized_incomplete_beta(0.0, 2.0, 3.0) == 0.0);
  REQUIRE(regularized_incomplete_beta(1.0, 2.0, 3.0) == 1.0);
  REQUIRE_THROWS_AS(regularized_incomplete_beta(0.5, 0.0, 1.0), isomed::ArgumentError);
}

TEST_CASE("t upper tail at zero is one half") {
  for (long nu : {1L, 5L, 50L}) REQUIRE_THAT(student_t_upper_tail(0.0, nu), WithinAbs(0.5, 1e-13));
}

TEST_CASE("t quantile reproduces tabulated values") {
  REQUIRE_THAT(t_quantile(0.05, 50), WithinAbs(1.6759050251630974, 1e-9));
  REQUIRE_THAT(t_quantile(0.05, 50), WithinAbs(1.676, 1e-3));
  // nu = 1 closed form: tan(pi (0.5 - p))
  REQUIRE_THAT(t_quantile(0.05, 1), WithinAbs(std::tan(M_PI * 0.45), 1e-9));
  REQUIRE_THAT(t_quantile(0.05, 1), WithinAbs(6.3138, 5e-4));
  REQUIRE_THAT(t_quantile(0.05, 2), WithinAbs(2.919985580355516, 1e-9));
  REQUIRE_THAT(t_quantile(0.025, 10), WithinAbs(2.2281388519649385, 1e-9));
}

TEST_CASE("t quantile is zero at the median and antisymmetric") {
  for (long nu : {1L, 3L, 47L}) {
    REQUIRE(t_quantile(0.5, nu) == 0.0);
    for (double p : {0.01, 0.2, 0.4})
      REQUIRE_THAT(t_quantile(p, nu), WithinAbs(-t_quantile(1.0 - p, nu), 1e-10));
  }
}

TEST_CASE("t quantile decreases in nu toward the normal limit") {
  double prev = t_quantile(0.05, 1);
  for (long nu = 2; nu <= 200; ++nu) {
    const double q = t_quantile(0.05, nu);
    REQUIRE(q < prev);
    REQUIRE(q > 1.6448536269514722);
    prev = q;
  }
  REQUIRE_THAT(t_quantile(0.05, 200), WithinAbs(1.652508100910269, 1e-8));
}

TEST_CASE("t quantile rejects bad arguments") {
  REQUIRE_THROWS_AS(t_quantile(0.0, 5), isomed::ArgumentError);
  REQUIRE_THROWS_AS(t_quantile(1.0, 5), isomed::ArgumentError);
  REQUIRE_THROWS_AS(t_quantile(-0.1, 5), isomed::ArgumentError);
  REQUIRE_THROWS_AS(t_quantile(0.05, 0), isomed::ArgumentError);
}

TEST_CASE("quantile and tail probability invert each other") {
  for (long nu : {1L, 4L, 12L, 60L})
    for (double p : {0.001, 0.01, 0.05, 0.25, 0.6, 0.95})
      REQUIRE_THAT(student_t_upper_tail(t_quantile(p, nu), nu), WithinAbs(p, 1e-10));
}
