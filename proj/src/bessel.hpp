#pragma once

#include <functional>
#include <optional>

namespace hodge::bessel {

/// Nonnegative half-integer Bessel order, stored as twice its value so that
/// nu = n/2 and nu = n/2 - 1 are both exact.
class BesselOrder {
 public:
  constexpr explicit BesselOrder(unsigned twice_order) : twice_(twice_order) {}

  static constexpr BesselOrder integer(unsigned nu) { return BesselOrder(2 * nu); }

  constexpr unsigned twice() const { return twice_; }
  constexpr double value() const { return 0.5 * static_cast<double>(twice_); }
  constexpr bool is_half_odd() const { return (twice_ & 1U) != 0; }

  constexpr BesselOrder next() const { return BesselOrder(twice_ + 2); }

  friend constexpr bool operator==(BesselOrder, BesselOrder) = default;

 private:
  unsigned twice_;
};

/// A sign change of a scalar function: f(lo) * f(hi) < 0.
struct ZeroBracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

/// J_nu(x) by the ascending series, summed in extended precision.
/// Accurate to ~1e-12 relative for 0 <= x <= 50. Throws on x < 0.
double bessel_j(BesselOrder nu, double x);

/// Modified Bessel I_nu(x); same contract as bessel_j.
double bessel_i(BesselOrder nu, double x);

/// J_a(x) I_{a+1}(x) + J_{a+1}(x) I_a(x), whose first positive zero is k_{a,1}.
double cross_function(BesselOrder a, double x);

/// Scan [start, stop] with a fixed step for the first sign change of f.
std::optional<ZeroBracket> find_bracket(const std::function<double(double)>& f,
                                        double start, double stop, double step);

/// Bisection to absolute width ~1e-15; returns the bracket midpoint.
double bisect(const std::function<double(double)>& f, ZeroBracket bracket);

/// j_{nu,1}: smallest positive zero of J_nu.
double first_zero_j(BesselOrder nu);

/// k_{a,1}: smallest positive zero of cross_function(a, .).
double first_zero_cross(BesselOrder a);

/// Closed-form first eigenvalues of the Euclidean ball of radius R in R^n.
/// The values are independent of the form degree.
struct BallSpectrum {
  int dim;
  double radius;
  double lambda1;      // Dirichlet:  j_{n/2-1,1}^2 / R^2
  double big_lambda1;  // buckling:   j_{n/2,1}^2   / R^2
  double big_gamma1;   // clamped:    k_{n/2-1,1}^4 / R^4
};

BallSpectrum ball_spectrum(int dim, double radius);

}  // namespace hodge::bessel
