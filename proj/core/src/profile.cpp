#include "abe/profile.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace abe {

namespace {

constexpr double kTwoSqrtPi = 2.0 * 1.772453850905516027298167483341145;  // 2 sqrt(pi)

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("diffusive wave: t must be > 0");
  }
}

// Evaluation at a known constant; the half-line Gaussian integral is
// sqrt(pi) (1 + erf(z)) = sqrt(pi) erfc(-z), which keeps full relative accuracy
// in the far left tail.
double eval_with_constant(double t, double x, double c) {
  const double z = x / (2.0 * std::sqrt(2.0 * t));
  const double partial = std::sqrt(std::numbers::pi) * std::erfc(-z);
  return 2.0 * std::sqrt(2.0 / t) * std::exp(-x * x / (8.0 * t)) / (c + partial);
}

}  // namespace

double c_constant(double m_prime) {
  if (m_prime == 0.0) throw ZeroMassProfile();
  if (!std::isfinite(m_prime)) throw std::invalid_argument("c_constant: non-finite mass");
  return kTwoSqrtPi / std::expm1(m_prime / 4.0);
}

double eval_viscosity2(double t, double x, double m_prime) {
  check_time(t);
  if (m_prime == 0.0) return 0.0;
  return eval_with_constant(t, x, c_constant(m_prime));
}

AsymptoticProfile::AsymptoticProfile(double mass, double viscosity)
    : mass_(mass), viscosity_(viscosity), c_m_(0.0) {
  if (!(viscosity > 0.0) || !std::isfinite(viscosity)) {
    throw std::invalid_argument("AsymptoticProfile: viscosity must be > 0");
  }
  if (!std::isfinite(mass)) throw std::invalid_argument("AsymptoticProfile: non-finite mass");
  if (mass != 0.0) c_m_ = c_constant(scaled_mass());
}

double eval(const AsymptoticProfile& profile, double t, double x) {
  check_time(t);
  if (profile.is_zero()) return 0.0;
  const double half_a = 0.5 * profile.viscosity();
  return half_a * eval_with_constant(half_a * t, x, profile.c_m());
}

GridFunction sample_on_grid(const AsymptoticProfile& profile, const Grid& grid, double t) {
  check_time(t);
  std::vector<double> values(grid.num_cells(), 0.0);
  if (!profile.is_zero()) {
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = eval(profile, t, grid.center(j));
  }
  return GridFunction(grid, std::move(values));
}

}  // namespace abe
