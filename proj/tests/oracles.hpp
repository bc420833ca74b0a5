// Test-side reference computations. None of these call into the library code
// they are used to check.
#ifndef ABE_TESTS_ORACLES_HPP_
#define ABE_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

struct Moments {
  long double f0, f1, f2;
};

/// Kernel moments by direct long-double summation of the cell integrals
/// int_{(m-1)dx}^{m dx} exp(-z/theta)/theta dz.
inline Moments kernel_moments(double dx, double theta, std::size_t n) {
  const long double h = static_cast<long double>(dx) / theta;
  long double s0 = 0, s1 = 0, s2 = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    const long double md = m;
    const long double w = std::exp(-(md - 1) * h) - std::exp(-md * h);
    s0 += w;
    s1 += md * w;
    s2 += md * (md - 1) * w;
  }
  return {s0, h * s1, h * h / 2 * s2};
}

/// EO flux of u_t = (u^2/2)_x from its defining integral. In conservation form
/// the flux is -u^2/2, so g = (a^2 + b^2)/4 + (1/2) int_a^b |s| ds.
inline double eo_flux_integral(double a, double b) {
  auto abs_int = [](double lo, double hi) {  // int_lo^hi |s| ds for lo <= hi
    if (lo >= 0) return (hi * hi - lo * lo) / 2;
    if (hi <= 0) return (lo * lo - hi * hi) / 2;
    return (lo * lo + hi * hi) / 2;
  };
  const double integral = a <= b ? abs_int(a, b) : -abs_int(b, a);
  return (a * a / 2 + b * b / 2) / 2 + integral / 2;
}

inline double gk(const std::function<double(double)>& f, double lo, double hi) {
  double err = 0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-13, &err);
}

/// Viscosity-2 diffusive wave for a given constant C, with the half-line
/// Gaussian integral computed by quadrature instead of erf.
inline double wave_v2(double t, double x, double c) {
  const double y = x / std::sqrt(2 * t);
  const double partial =
      y < -40 ? 0.0 : gk([](double s) { return std::exp(-s * s / 4); }, -40.0, y);
  return 2 * std::sqrt(2 / t) * std::exp(-x * x / (8 * t)) / (c + partial);
}

/// Mass of wave_v2(1, ., c) by quadrature.
inline double mass_v2(double c) {
  return gk([c](double x) { return wave_v2(1.0, x, c); }, -60.0, 60.0);
}

/// Constant C with mass_v2(C) = m_prime, by bisection. The mass is decreasing
/// in C on (0, inf) and on (-inf, -2 sqrt(pi)).
inline double c_by_bisection(double m_prime) {
  const double two_sqrt_pi = 2 * std::sqrt(std::numbers::pi);
  double lo, hi;
  if (m_prime > 0) {
    lo = 1e-12;
    hi = 1e6;
  } else {
    lo = -1e6;
    hi = -two_sqrt_pi - 1e-12;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = m_prime > 0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    const double m = mass_v2(mid);
    // Decreasing in C: too much mass means C is too small.
    if (m > m_prime) lo = mid; else hi = mid;
    if (std::abs(hi - lo) <= 1e-15 * std::abs(mid)) break;
  }
  return 0.5 * (lo + hi);
}

/// Mass of an arbitrary profile by adaptive quadrature over [lo, hi].
inline double integral(const std::function<double(double)>& f, double lo, double hi) {
  return gk(f, lo, hi);
}

}  // namespace oracle

#endif  // ABE_TESTS_ORACLES_HPP_
