#include <cmath>
#include <numbers>

#include "bessel.hpp"
#include "doctest.h"
#include "error.hpp"
#include "oracles.hpp"

using namespace hodge;
using namespace hodge::bessel;

namespace {

constexpr double pi = std::numbers::pi;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::numerical_failure;
}

}  // namespace

TEST_SUITE("bessel") {

TEST_CASE("order arithmetic") {
  constexpr BesselOrder half(1);
  static_assert(half.is_half_odd());
  static_assert(half.value() == 0.5);
  static_assert(half.next() == BesselOrder(3));
  static_assert(BesselOrder::integer(2).twice() == 4);
  CHECK_FALSE(BesselOrder::integer(3).is_half_odd());
}

TEST_CASE("series matches the integral representation") {
  for (int n = 0; n <= 3; ++n) {
    for (double x : {0.25, 1.0, 2.404825557695773, 5.0, 12.5, 25.0, 40.0}) {
      CAPTURE(n);
      CAPTURE(x);
      CHECK(std::abs(bessel_j(BesselOrder::integer(n), x) - oracle::bessel_j_int(n, x)) < 1e-13);
      const double ref = oracle::bessel_i_int(n, x);
      CHECK(std::abs(bessel_i(BesselOrder::integer(n), x) - ref) <= 1e-14 * ref);
    }
  }
}

TEST_CASE("half-integer closed forms") {
  for (double x : {0.1, 1.0, 3.0, 7.5, 20.0}) {
    CAPTURE(x);
    const double c = std::sqrt(2.0 / (pi * x));
    CHECK(std::abs(bessel_j(BesselOrder(1), x) - c * std::sin(x)) < 1e-14);
    CHECK(std::abs(bessel_j(BesselOrder(3), x) - c * (std::sin(x) / x - std::cos(x))) < 1e-14);
    CHECK(std::abs(bessel_i(BesselOrder(1), x) - c * std::sinh(x)) <= 1e-14 * c * std::sinh(x));
    const double i32 = c * (std::cosh(x) - std::sinh(x) / x);
    CHECK(std::abs(bessel_i(BesselOrder(3), x) - i32) <= 1e-13 * i32);
  }
}

TEST_CASE("values at the origin and the domain") {
  CHECK(bessel_j(BesselOrder(0), 0.0) == 1.0);
  CHECK(bessel_i(BesselOrder(0), 0.0) == 1.0);
  CHECK(bessel_j(BesselOrder(1), 0.0) == 0.0);
  CHECK(bessel_i(BesselOrder(4), 0.0) == 0.0);
  CHECK(code_of([] { bessel_j(BesselOrder(0), -1.0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { bessel_i(BesselOrder(2), -0.5); }) == ErrorCode::invalid_argument);
}

TEST_CASE("cross function combines the two series") {
  for (double x : {0.5, 3.0, 6.0}) {
    const double expected = bessel_j(BesselOrder(0), x) * bessel_i(BesselOrder(2), x) +
                            bessel_j(BesselOrder(2), x) * bessel_i(BesselOrder(0), x);
    CHECK(cross_function(BesselOrder(0), x) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("first zeros agree with the bisection oracles") {
  CHECK(std::abs(first_zero_j(BesselOrder(0)) - oracle::zero_j0()) < 1e-12);
  CHECK(std::abs(first_zero_j(BesselOrder(2)) - oracle::zero_j1()) < 1e-12);
  CHECK(std::abs(first_zero_j(BesselOrder(1)) - oracle::zero_j_half()) < 1e-12);
  CHECK(std::abs(first_zero_j(BesselOrder(3)) - oracle::zero_j_three_halves()) < 1e-12);
  CHECK(std::abs(first_zero_cross(BesselOrder(0)) - oracle::zero_cross0()) < 1e-11);
  CHECK(std::abs(first_zero_cross(BesselOrder(1)) - oracle::zero_cross_half()) < 1e-12);
}

TEST_CASE("frozen zeros") {
  CHECK(first_zero_j(BesselOrder(0)) == doctest::Approx(2.404825557695773).epsilon(1e-14));
  CHECK(first_zero_j(BesselOrder(2)) == doctest::Approx(3.831705970207512).epsilon(1e-14));
  CHECK(first_zero_j(BesselOrder(1)) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(first_zero_j(BesselOrder(3)) == doctest::Approx(4.493409457909064).epsilon(1e-14));
  CHECK(first_zero_j(BesselOrder(4)) == doctest::Approx(5.135622301840683).epsilon(1e-14));
  CHECK(first_zero_cross(BesselOrder(0)) == doctest::Approx(3.196220616582977).epsilon(1e-12));
  CHECK(first_zero_cross(BesselOrder(1)) == doctest::Approx(3.926602312047919).epsilon(1e-13));
  CHECK(first_zero_cross(BesselOrder(2)) == doctest::Approx(4.610899879).epsilon(1e-9));
  CHECK(first_zero_cross(BesselOrder(3)) == doctest::Approx(5.267657530).epsilon(1e-9));
}

TEST_CASE("zeros increase with the order") {
  double prev_j = 0.0;
  double prev_k = 0.0;
  for (unsigned t = 0; t <= 14; ++t) {
    const double j = first_zero_j(BesselOrder(t));
    const double k = first_zero_cross(BesselOrder(t));
    CHECK(j > prev_j);
    CHECK(k > prev_k);
    // j_{nu,1} < k_{nu,1} < j_{nu+1,1}
    CHECK(k > j);
    CHECK(k < first_zero_j(BesselOrder(t).next()));
    prev_j = j;
    prev_k = k;
  }
}

TEST_CASE("bracketing") {
  auto f = [](double x) { return x * x - 2.0; };
  const auto b = find_bracket(f, 0.0, 3.0, 0.1);
  REQUIRE(b.has_value());
  CHECK(b->lo < std::sqrt(2.0));
  CHECK(b->hi > std::sqrt(2.0));
  CHECK(bisect(f, *b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_FALSE(find_bracket([](double x) { return 1.0 + x * x; }, 0.0, 3.0, 0.1).has_value());
}

TEST_CASE("unit disk") {
  const auto s = ball_spectrum(2, 1.0);
  CHECK(s.lambda1 == doctest::Approx(5.783185962946784).epsilon(1e-13));
  CHECK(s.big_lambda1 == doctest::Approx(14.681970642123893).epsilon(1e-13));
  CHECK(s.big_gamma1 == doctest::Approx(104.3631055588).epsilon(1e-11));
}

TEST_CASE("unit ball in three dimensions") {
  const auto s = ball_spectrum(3, 1.0);
  CHECK(s.lambda1 == doctest::Approx(pi * pi).epsilon(1e-14));
  const double j32 = oracle::zero_j_three_halves();
  CHECK(s.big_lambda1 == doctest::Approx(j32 * j32).epsilon(1e-13));
  const double k = oracle::zero_cross_half();
  CHECK(s.big_gamma1 == doctest::Approx(k * k * k * k).epsilon(1e-12));
}

TEST_CASE("scale covariance") {
  for (int n = 2; n <= 8; ++n) {
    const auto one = ball_spectrum(n, 1.0);
    for (double r : {0.5, 2.0, 3.7}) {
      const auto s = ball_spectrum(n, r);
      CHECK(s.lambda1 * r * r == doctest::Approx(one.lambda1).epsilon(1e-14));
      CHECK(s.big_lambda1 * r * r == doctest::Approx(one.big_lambda1).epsilon(1e-14));
      CHECK(s.big_gamma1 * std::pow(r, 4) == doctest::Approx(one.big_gamma1).epsilon(1e-14));
    }
  }
}

TEST_CASE("chain ordering holds for every dimension") {
  for (int n = 2; n <= 12; ++n) {
    const auto s = ball_spectrum(n, 1.0);
    CAPTURE(n);
    CHECK(s.big_gamma1 >= s.lambda1 * s.lambda1);
    CHECK(s.big_gamma1 <= s.big_lambda1 * s.big_lambda1);
    CHECK(s.big_gamma1 >= s.big_lambda1 * s.lambda1);
    CHECK(s.big_lambda1 > s.lambda1);
  }
}

TEST_CASE("ball arguments are validated") {
  CHECK(code_of([] { ball_spectrum(1, 1.0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { ball_spectrum(2, 0.0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { ball_spectrum(2, -1.0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { ball_spectrum(3, NAN); }) == ErrorCode::invalid_argument);
}

}  // TEST_SUITE
