#ifndef ABE_PROFILE_HPP_
#define ABE_PROFILE_HPP_

#include <stdexcept>

#include "abe/grid.hpp"

namespace abe {

/// Thrown by c_constant(0): the zero-mass profile is the zero function.
class ZeroMassProfile : public std::domain_error {
 public:
  ZeroMassProfile() : std::domain_error("zero-mass profile has no Hopf-Cole constant") {}
};

/// Constant C of the viscosity-2 diffusive wave of mass m_prime:
/// 2 sqrt(pi) / (exp(m_prime/4) - 1). Negative masses give C < -2 sqrt(pi).
double c_constant(double m_prime);

/// Diffusive wave of u_t = u u_x + 2 u_xx with initial mass m_prime * delta_0:
/// 2 sqrt(2/t) exp(-x^2/(8t)) / (C + int_{-inf}^{x/sqrt(2t)} exp(-s^2/4) ds).
double eval_viscosity2(double t, double x, double m_prime);

/// Diffusive wave of u_t = u u_x + a u_xx with mass M.
class AsymptoticProfile {
 public:
  AsymptoticProfile(double mass, double viscosity);

  double mass() const noexcept { return mass_; }
  double viscosity() const noexcept { return viscosity_; }
  /// Mass 2M/a of the underlying viscosity-2 profile.
  double scaled_mass() const noexcept { return 2.0 * mass_ / viscosity_; }
  /// Hopf-Cole constant of the underlying profile; zero when mass is zero.
  double c_m() const noexcept { return c_m_; }
  bool is_zero() const noexcept { return mass_ == 0.0; }

 private:
  double mass_;
  double viscosity_;
  double c_m_;
};

/// (a/2) eval_viscosity2((a/2) t, x, 2M/a).
double eval(const AsymptoticProfile& profile, double t, double x);

/// Point values at cell centers.
GridFunction sample_on_grid(const AsymptoticProfile& profile, const Grid& grid, double t);

}  // namespace abe

#endif  // ABE_PROFILE_HPP_
