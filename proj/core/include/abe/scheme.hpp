#ifndef ABE_SCHEME_HPP_
#define ABE_SCHEME_HPP_

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "abe/flux.hpp"
#include "abe/grid.hpp"
#include "abe/kernel.hpp"
#include "abe/run_record.hpp"

namespace abe {

/// Coefficients of u_t = u u_x + nu u_xx + c K_theta * u_xx.
struct PhysicalParams {
  double nu = 1e-2;
  double c = 2e-2;
  double theta = 1.0;

  /// Throws std::invalid_argument unless nu, c >= 0, nu + c > 0, theta > 0.
  void validate() const;
};

/// Paper: the moment correctors f0, f1 of the truncated quadrature.
/// Naive: both set to one, which leaves a spurious transport and mass drift.
enum class CorrectorMode { kPaper, kNaive };

std::string_view corrector_name(CorrectorMode mode) noexcept;
CorrectorMode corrector_from_name(std::string_view name);

class SchemeConfig {
 public:
  SchemeConfig(FluxKind flux, KernelQuadrature quadrature, CorrectorMode mode, Grid grid);

  const FluxKind& flux() const noexcept { return flux_; }
  const KernelQuadrature& quadrature() const noexcept { return quadrature_; }
  CorrectorMode corrector_mode() const noexcept { return mode_; }
  const Grid& grid() const noexcept { return grid_; }

  /// Correctors actually used in front of u and u_x.
  double f0_used() const noexcept;
  double f1_used() const noexcept;

  /// Copy with the MLF reference step rebound (no-op for EO).
  SchemeConfig with_dt_ref(double dt) const;

 private:
  FluxKind flux_;
  KernelQuadrature quadrature_;
  CorrectorMode mode_;
  Grid grid_;
};

struct SolverState {
  double t = 0.0;
  GridFunction u;
};

class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Semi-discrete right-hand side, zero extension outside the grid:
///   (g_{j+1/2} - g_{j-1/2})/dx + nu (u_{j-1} - 2u_j + u_{j+1})/dx^2
///   + (c/theta^2) (sum_m omega_m u_{j-m} - F0 u_j) + (c/theta) F1 (u_{j+1} - u_j)/dx
GridFunction rhs(const SolverState& state, const PhysicalParams& params,
                 const SchemeConfig& config);

/// Allocation-free form of rhs(); conv_scratch must hold num_cells values.
void rhs_into(std::span<const double> u, const PhysicalParams& params,
              const SchemeConfig& config, std::span<double> out,
              std::span<double> conv_scratch);

/// Largest explicit Euler step keeping the update monotone, times safety.
/// Returns +infinity when nothing bounds the step (u = 0, nu = c = 0).
double stable_dt(const SolverState& state, const PhysicalParams& params,
                 const SchemeConfig& config, double safety);
double stable_dt(std::span<const double> u, const PhysicalParams& params,
                 const SchemeConfig& config, double safety);

/// u <- u + dt rhs(u). Throws StabilityError if dt exceeds stable_dt(safety = 1).
std::pair<SolverState, StepReport> step_euler(const SolverState& state,
                                              const PhysicalParams& params,
                                              const SchemeConfig& config, double dt);

struct RunOptions {
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  double safety = 0.9;
  double dt_max = 0.5;
  /// When set, every step uses this dt (shortened only to land on snapshots).
  std::optional<double> fixed_dt;
  /// Keep every k-th step report (the last step is always kept).
  std::size_t report_stride = 1;
};

/// Explicit Euler integration from t = 0. The initial state is always the first
/// snapshot; requested snapshot times are hit exactly.
RunRecord run(const GridFunction& initial, const PhysicalParams& params,
              const SchemeConfig& config, const RunOptions& options);

/// Grid function of mu * u(mu^2 t, mu x): spacing dx/mu, values mu u_j.
GridFunction rescale(const GridFunction& u, double mu);

}  // namespace abe

#endif  // ABE_SCHEME_HPP_
