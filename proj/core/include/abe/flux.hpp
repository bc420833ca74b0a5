#ifndef ABE_FLUX_HPP_
#define ABE_FLUX_HPP_

#include <string_view>
#include <variant>

namespace abe {

// Two-point numerical fluxes for the convective term (u^2/2)_x. The scheme adds
// +(g_{j+1/2} - g_{j-1/2})/dx, so every flux here is consistent with +u^2/2.

/// Engquist-Osher flux. a is the left state u_j, b the right state u_{j+1}.
inline double eo_flux(double a, double b) noexcept {
  const double abs_a = a < 0.0 ? -a : a;
  const double abs_b = b < 0.0 ? -b : b;
  return 0.25 * a * (a - abs_a) + 0.25 * b * (b + abs_b);
}

/// Modified Lax-Friedrichs: central flux plus a discrete viscosity dx^2/(4 dt_ref).
inline double mlf_flux(double a, double b, double dx, double dt_ref) noexcept {
  return 0.25 * (a * a + b * b) + dx / (4.0 * dt_ref) * (b - a);
}

/// R(u, v) = (v|v| - u|u|) / (4 dx). The EO flux equals (a^2+b^2)/4 + dx R(a, b).
double r_form(double u, double v, double dx);

struct EngquistOsher {};

/// dt_ref is rebound to the current time step by the stepper.
struct ModifiedLaxFriedrichs {
  double dt_ref = 1.0;
};

using FluxKind = std::variant<EngquistOsher, ModifiedLaxFriedrichs>;

/// Validates dt_ref > 0 for the MLF variant.
FluxKind make_mlf(double dt_ref);

/// "eo" or "mlf".
std::string_view flux_name(const FluxKind& kind) noexcept;
FluxKind flux_from_name(std::string_view name);

}  // namespace abe

#endif  // ABE_FLUX_HPP_
