#include "abe/flux.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace abe {

double r_form(double u, double v, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("r_form: dx must be > 0");
  return (v * std::abs(v) - u * std::abs(u)) / (4.0 * dx);
}

FluxKind make_mlf(double dt_ref) {
  if (!(dt_ref > 0.0) || !std::isfinite(dt_ref)) {
    throw std::invalid_argument("modified Lax-Friedrichs: dt_ref must be > 0");
  }
  return ModifiedLaxFriedrichs{dt_ref};
}

std::string_view flux_name(const FluxKind& kind) noexcept {
  return std::holds_alternative<EngquistOsher>(kind) ? "eo" : "mlf";
}

FluxKind flux_from_name(std::string_view name) {
  if (name == "eo") return EngquistOsher{};
  if (name == "mlf") return ModifiedLaxFriedrichs{};
  throw std::invalid_argument("unknown flux '" + std::string(name) + "' (accepted: eo, mlf)");
}

}  // namespace abe
