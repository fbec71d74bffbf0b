#include "bessel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace hodge::bessel {
namespace {

#if defined(__SIZEOF_FLOAT128__)
using Wide = __float128;
#else
using Wide = long double;
#endif

constexpr double kScanStep = 0.1;
constexpr double kScanReach = 20.0;
constexpr int kMaxSeriesTerms = 1000;

Wide wide_sqrt(Wide a) {
  if (a <= 0) return 0;
  Wide s = std::sqrt(static_cast<double>(a));
  s = (s + a / s) / 2;
  s = (s + a / s) / 2;
  return s;
}

Wide sqrt_pi() {
  // double-double split of sqrt(pi)
  return Wide(1.772453850905516) + Wide(-7.6665864998257988279e-17);
}

// Gamma(twice_arg / 2) for twice_arg >= 1.
Wide gamma_half_units(unsigned twice_arg) {
  if (twice_arg % 2 == 0) {
    Wide g = 1;
    for (unsigned k = 2; k < twice_arg / 2; ++k) g *= k;
    return g;
  }
  // Gamma(m + 1/2) = (2m-1)!! sqrt(pi) / 2^m
  const unsigned m = (twice_arg - 1) / 2;
  Wide g = sqrt_pi();
  for (unsigned k = 1; k <= m; ++k) g *= Wide(2 * k - 1) / 2;
  return g;
}

// sum_k sign^k (x/2)^{2k+nu} / (k! Gamma(k+nu+1))
double ascending_series(BesselOrder nu, double x, int sign) {
  if (!(x >= 0.0)) {
    fail(ErrorCode::invalid_argument,
         "bessel: domain error, x must be >= 0 (got " + std::to_string(x) + ")");
  }
  if (x == 0.0) return nu.twice() == 0 ? 1.0 : 0.0;

  const Wide half_x = Wide(x) / 2;
  Wide lead = 1;
  for (unsigned k = 0; k < nu.twice() / 2; ++k) lead *= half_x;
  if (nu.is_half_odd()) lead *= wide_sqrt(half_x);
  lead /= gamma_half_units(nu.twice() + 2);

  const Wide q = half_x * half_x;
  const Wide order = Wide(nu.value());
  Wide term = lead;
  Wide sum = lead;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const Wide k1 = Wide(k + 1);
    term *= q / (k1 * (k1 + order));
    if (sign < 0) term = -term;
    sum += term;
    const bool decreasing = k1 * k1 > q;
    const Wide mag = term < 0 ? -term : term;
    const Wide ref = sum < 0 ? -sum : sum;
    if (decreasing && mag < Wide(1e-17) * ref) break;
  }
  return static_cast<double>(sum);
}

double first_zero_of(const std::function<double(double)>& f, double order,
                     const char* what) {
  const double start = std::max(order, 0.1);
  const auto bracket = find_bracket(f, start, order + kScanReach, kScanStep);
  if (!bracket) {
    fail(ErrorCode::numerical_failure,
         std::string(what) + ": no sign change found before x = " +
             std::to_string(order + kScanReach));
  }
  return bisect(f, *bracket);
}

}  // namespace

double bessel_j(BesselOrder nu, double x) { return ascending_series(nu, x, -1); }

double bessel_i(BesselOrder nu, double x) { return ascending_series(nu, x, +1); }

double cross_function(BesselOrder a, double x) {
  const BesselOrder b = a.next();
  return bessel_j(a, x) * bessel_i(b, x) + bessel_j(b, x) * bessel_i(a, x);
}

std::optional<ZeroBracket> find_bracket(const std::function<double(double)>& f,
                                        double start, double stop, double step) {
  double lo = start;
  double f_lo = f(lo);
  for (int i = 1;; ++i) {
    const double hi = start + i * step;
    if (hi > stop) break;
    const double f_hi = f(hi);
    if (f_lo == 0.0) return ZeroBracket{lo, lo, 0.0, 0.0};
    if ((f_lo < 0.0) != (f_hi < 0.0) || f_hi == 0.0) {
      return ZeroBracket{lo, hi, f_lo, f_hi};
    }
    lo = hi;
    f_lo = f_hi;
  }
  return std::nullopt;
}

double bisect(const std::function<double(double)>& f, ZeroBracket bracket) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (bracket.f_lo == 0.0) return lo;
  if (bracket.f_hi == 0.0) return hi;
  const bool lo_negative = bracket.f_lo < 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double first_zero_j(BesselOrder nu) {
  return first_zero_of([nu](double x) { return bessel_j(nu, x); }, nu.value(),
                       "first_zero_j");
}

double first_zero_cross(BesselOrder a) {
  return first_zero_of([a](double x) { return cross_function(a, x); }, a.value(),
                       "first_zero_cross");
}

BallSpectrum ball_spectrum(int dim, double radius) {
  require(dim >= 2, "ball_spectrum: dimension must be >= 2");
  require(radius > 0.0 && std::isfinite(radius), "ball_spectrum: radius must be > 0");
  const auto n = static_cast<unsigned>(dim);
  const double h0 = 1.0 / radius;
  const double j_low = first_zero_j(BesselOrder(n - 2));
  const double j_high = first_zero_j(BesselOrder(n));
  const double k_low = first_zero_cross(BesselOrder(n - 2));

  const double h0_sq = h0 * h0;
  BallSpectrum s{};
  s.dim = dim;
  s.radius = radius;
  s.lambda1 = j_low * j_low * h0_sq;
  s.big_lambda1 = j_high * j_high * h0_sq;
  s.big_gamma1 = (k_low * k_low * h0_sq) * (k_low * k_low * h0_sq);
  return s;
}

}  // namespace hodge::bessel
