#include "abe/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "abe/summation.hpp"

namespace abe {

namespace {

constexpr std::size_t kBoundaryCells = 10;
constexpr double kBoundaryFraction = 1e-10;

void check_grid(std::span<const double> u, const SchemeConfig& config) {
  if (u.size() != config.grid().num_cells()) {
    throw std::invalid_argument("scheme: state has " + std::to_string(u.size()) +
                                " cells, configuration grid has " +
                                std::to_string(config.grid().num_cells()));
  }
}

void check_theta(const PhysicalParams& params, const SchemeConfig& config) {
  const double qt = config.quadrature().theta();
  if (std::abs(qt - params.theta) > 1e-12 * params.theta) {
    throw std::invalid_argument("scheme: quadrature built for theta = " + std::to_string(qt) +
                                " but params.theta = " + std::to_string(params.theta));
  }
}

template <typename Flux>
void add_flux_differences(std::span<const double> u, double inv_dx, Flux flux,
                          std::span<double> out) {
  const std::size_t n = u.size();
  double left_face = flux(0.0, u[0]);
  for (std::size_t j = 0; j < n; ++j) {
    const double right = j + 1 < n ? u[j + 1] : 0.0;
    const double right_face = flux(u[j], right);
    out[j] = (right_face - left_face) * inv_dx;
    left_face = right_face;
  }
}

bool all_finite(std::span<const double> u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

StepReport make_report(double t, double dt, std::span<const double> u, double dx) {
  StepReport r;
  r.t = t;
  r.dt_used = dt;
  r.mass_after = dx * compensated_sum(u);
  r.l1 = norm(u, dx, NormKind::L1());
  r.l2 = norm(u, dx, NormKind::L2());
  r.linf = max_abs(u);
  return r;
}

void record_scheme_manifest(Manifest& m, const PhysicalParams& params,
                            const SchemeConfig& config, const RunOptions& options) {
  const auto& q = config.quadrature();
  m.set("nu", params.nu);
  m.set("c", params.c);
  m.set("theta", params.theta);
  m.set("dx", config.grid().dx());
  m.set("x_left", config.grid().x_left());
  m.set("x_right", config.grid().x_right());
  m.set("num_cells", std::to_string(config.grid().num_cells()));
  m.set("flux", std::string(flux_name(config.flux())));
  if (std::holds_alternative<ModifiedLaxFriedrichs>(config.flux())) {
    m.set("mlf_viscosity", "dx^2/(4 dt), dt_ref = current step");
  }
  m.set("corrector_mode", std::string(corrector_name(config.corrector_mode())));
  m.set("n_terms", std::to_string(q.n_terms()));
  m.set("f0", q.f0());
  m.set("f1", q.f1());
  m.set("f2", q.f2());
  m.set("f0_used", config.f0_used());
  m.set("f1_used", config.f1_used());
  m.set("safety", options.safety);
  m.set("dt_max", options.dt_max);
  m.set("dt_policy", options.fixed_dt ? "fixed" : "adaptive");
  if (options.fixed_dt) m.set("fixed_dt", *options.fixed_dt);
  m.set("t_end", options.t_end);
  m.set("report_stride", std::to_string(options.report_stride));
}

}  // namespace

void PhysicalParams::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be >= 0");
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be >= 0");
  if (!(nu + c > 0.0)) throw std::invalid_argument("nu + c must be > 0");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("theta must be > 0");
}

std::string_view corrector_name(CorrectorMode mode) noexcept {
  return mode == CorrectorMode::kPaper ? "paper" : "naive";
}

CorrectorMode corrector_from_name(std::string_view name) {
  if (name == "paper") return CorrectorMode::kPaper;
  if (name == "naive") return CorrectorMode::kNaive;
  throw std::invalid_argument("unknown corrector_mode '" + std::string(name) +
                              "' (accepted: paper, naive)");
}

SchemeConfig::SchemeConfig(FluxKind flux, KernelQuadrature quadrature, CorrectorMode mode,
                           Grid grid)
    : flux_(flux), quadrature_(std::move(quadrature)), mode_(mode), grid_(grid) {
  if (std::abs(quadrature_.dx() - grid_.dx()) > 1e-12 * grid_.dx()) {
    throw std::invalid_argument("SchemeConfig: quadrature dx " +
                                std::to_string(quadrature_.dx()) + " differs from grid dx " +
                                std::to_string(grid_.dx()));
  }
  if (const auto* mlf = std::get_if<ModifiedLaxFriedrichs>(&flux_)) {
    make_mlf(mlf->dt_ref);
  }
}

double SchemeConfig::f0_used() const noexcept {
  return mode_ == CorrectorMode::kPaper ? quadrature_.f0() : 1.0;
}

double SchemeConfig::f1_used() const noexcept {
  return mode_ == CorrectorMode::kPaper ? quadrature_.f1() : 1.0;
}

SchemeConfig SchemeConfig::with_dt_ref(double dt) const {
  SchemeConfig copy = *this;
  if (std::holds_alternative<ModifiedLaxFriedrichs>(copy.flux_)) copy.flux_ = make_mlf(dt);
  return copy;
}

void rhs_into(std::span<const double> u, const PhysicalParams& params,
              const SchemeConfig& config, std::span<double> out,
              std::span<double> conv_scratch) {
  check_grid(u, config);
  check_theta(params, config);
  const std::size_t n = u.size();
  const double dx = config.grid().dx();
  const double inv_dx = 1.0 / dx;

  std::visit(
      [&](const auto& flux) {
        using F = std::decay_t<decltype(flux)>;
        if constexpr (std::is_same_v<F, EngquistOsher>) {
          add_flux_differences(u, inv_dx, [](double a, double b) { return eo_flux(a, b); }, out);
        } else {
          const double dt_ref = flux.dt_ref;
          add_flux_differences(
              u, inv_dx, [dx, dt_ref](double a, double b) { return mlf_flux(a, b, dx, dt_ref); },
              out);
        }
      },
      config.flux());

  // Convolution sum_{m=1..min(N,j)} omega_m u_{j-m}. The m-loop is outermost so
  // the j-loop vectorizes; each cell still accumulates in increasing m.
  const auto weights = config.quadrature().weights();
  double* __restrict__ conv = conv_scratch.data();
  const double* __restrict__ src = u.data();
  std::fill(conv, conv + n, 0.0);
  const std::size_t n_terms = std::min(weights.size(), n);
  for (std::size_t m = 1; m <= n_terms; ++m) {
    const double w = weights[m - 1];
    for (std::size_t j = m; j < n; ++j) conv[j] += w * src[j - m];
  }

  const double diffusion = params.nu * inv_dx * inv_dx;
  const double relax = params.c / (params.theta * params.theta);
  const double drift = params.c / params.theta * config.f1_used() * inv_dx;
  const double f0 = config.f0_used();
  for (std::size_t j = 0; j < n; ++j) {
    const double left = j > 0 ? u[j - 1] : 0.0;
    const double right = j + 1 < n ? u[j + 1] : 0.0;
    double r = out[j];
    r += diffusion * (left - 2.0 * u[j] + right);
    r += relax * (conv[j] - f0 * u[j]);
    r += drift * (right - u[j]);
    out[j] = r;
  }
}

GridFunction rhs(const SolverState& state, const PhysicalParams& params,
                 const SchemeConfig& config) {
  if (!(state.u.grid() == config.grid())) {
    throw std::invalid_argument("rhs: state grid differs from configuration grid");
  }
  const std::size_t n = state.u.size();
  std::vector<double> out(n), scratch(n);
  rhs_into(state.u.values(), params, config, out, scratch);
  return GridFunction(state.u.grid(), std::move(out));
}

double stable_dt(std::span<const double> u, const PhysicalParams& params,
                 const SchemeConfig& config, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw std::invalid_argument("stable_dt: safety must lie in (0, 1]");
  }
  if (!all_finite(u)) throw std::domain_error("stable_dt: non-finite state");
  const double dx = config.grid().dx();
  const double convective = max_abs(u) / dx;
  const double linear = 2.0 * params.nu / (dx * dx) +
                        params.c / (params.theta * params.theta) *
                            config.quadrature().stability_sum();
  double rate = 0.0;
  if (std::holds_alternative<EngquistOsher>(config.flux())) {
    rate = convective + linear;
  } else {
    // The MLF viscosity dx^2/(4 dt) already spends half of the diagonal weight;
    // monotonicity needs dt |u|/dx <= 1/2 and dt * linear <= 1/2.
    rate = 2.0 * std::max(convective, linear);
  }
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return safety / rate;
}

double stable_dt(const SolverState& state, const PhysicalParams& params,
                 const SchemeConfig& config, double safety) {
  return stable_dt(state.u.values(), params, config, safety);
}

std::pair<SolverState, StepReport> step_euler(const SolverState& state,
                                              const PhysicalParams& params,
                                              const SchemeConfig& config, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step_euler: dt must be > 0");
  const double bound = stable_dt(state, params, config, 1.0);
  if (dt > bound * (1.0 + 1e-12)) {
    throw StabilityError("step_euler: dt = " + format_real(dt) +
                         " exceeds the stability bound " + format_real(bound));
  }
  const SchemeConfig bound_config = config.with_dt_ref(dt);
  const auto u = state.u.values();
  std::vector<double> r(u.size()), scratch(u.size());
  rhs_into(u, params, bound_config, r, scratch);
  for (std::size_t j = 0; j < u.size(); ++j) r[j] = u[j] + dt * r[j];
  if (!all_finite(r)) throw std::domain_error("step_euler: update produced non-finite values");
  const double t = state.t + dt;
  StepReport report = make_report(t, dt, r, state.u.grid().dx());
  return {SolverState{t, GridFunction(state.u.grid(), std::move(r))}, report};
}

RunRecord run(const GridFunction& initial, const PhysicalParams& params,
              const SchemeConfig& config, const RunOptions& options) {
  params.validate();
  if (!(initial.grid() == config.grid())) {
    throw std::invalid_argument("run: initial data grid differs from configuration grid");
  }
  if (!(options.t_end >= 0.0)) throw std::invalid_argument("run: t_end must be >= 0");
  if (!(options.dt_max > 0.0)) throw std::invalid_argument("run: dt_max must be > 0");
  if (options.report_stride < 1) throw std::invalid_argument("run: report_stride must be >= 1");
  if (options.fixed_dt && !(*options.fixed_dt > 0.0)) {
    throw std::invalid_argument("run: fixed_dt must be > 0");
  }
  std::vector<double> targets = options.snapshot_times;
  if (!std::is_sorted(targets.begin(), targets.end())) {
    throw std::invalid_argument("run: snapshot_times must be sorted");
  }
  for (double s : targets) {
    if (s < 0.0 || s > options.t_end) {
      throw std::invalid_argument("run: snapshot time " + format_real(s) +
                                  " outside [0, t_end]");
    }
  }
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  if (!targets.empty() && targets.front() == 0.0) targets.erase(targets.begin());

  RunRecord record;
  record_scheme_manifest(record.manifest, params, config, options);

  const Grid& grid = config.grid();
  const double dx = grid.dx();
  const std::size_t n = grid.num_cells();
  std::vector<double> u(initial.values().begin(), initial.values().end());
  std::vector<double> r(n), scratch(n);
  record.snapshots.push_back({0.0, initial});

  const double boundary_threshold = kBoundaryFraction * max_abs(u);
  const std::size_t edge = std::min(kBoundaryCells, n / 2);
  auto check_boundary = [&](double t) {
    if (record.boundary_warning_time) return;
    for (std::size_t k = 0; k < edge; ++k) {
      if (std::abs(u[k]) > boundary_threshold || std::abs(u[n - 1 - k]) > boundary_threshold) {
        record.boundary_warning_time = t;
        return;
      }
    }
  };

  double t = 0.0;
  std::size_t next_target = 0;
  StepReport last_report;
  bool last_report_kept = true;
  while (t < options.t_end) {
    const double bound = stable_dt(u, params, config, 1.0);
    double dt = 0.0;
    if (options.fixed_dt) {
      dt = *options.fixed_dt;
      if (dt > bound * (1.0 + 1e-12)) {
        throw StabilityError("run: fixed dt = " + format_real(dt) + " exceeds the bound " +
                             format_real(bound) + " at t = " + format_real(t));
      }
    } else {
      dt = std::min(options.safety * bound, options.dt_max);
    }
    const double goal = next_target < targets.size() ? targets[next_target] : options.t_end;
    bool lands = false;
    if (goal - t <= dt) {
      dt = goal - t;
      lands = true;
    }

    const SchemeConfig step_config = config.with_dt_ref(dt);
    rhs_into(u, params, step_config, r, scratch);
    for (std::size_t j = 0; j < n; ++j) r[j] = u[j] + dt * r[j];
    if (!all_finite(r)) {
      record.status = RunStatus::kAborted;
      record.abort_reason = "non-finite state after step " +
                            std::to_string(record.steps_taken + 1) + " at t = " + format_real(t);
      if (record.snapshots.back().t != t) record.snapshots.push_back({t, GridFunction(grid, u)});
      break;
    }
    u.swap(r);
    t = lands ? goal : t + dt;
    ++record.steps_taken;
    check_boundary(t);

    last_report = make_report(t, dt, u, dx);
    last_report_kept = record.steps_taken % options.report_stride == 0;
    if (last_report_kept) record.step_reports.push_back(last_report);

    if (lands && next_target < targets.size() && goal == targets[next_target]) {
      record.snapshots.push_back({t, GridFunction(grid, u)});
      ++next_target;
    }
  }
  if (!last_report_kept) record.step_reports.push_back(last_report);

  record.manifest.set("steps_taken", std::to_string(record.steps_taken));
  record.manifest.set("status",
                      record.status == RunStatus::kCompleted ? "completed" : "aborted");
  if (!record.abort_reason.empty()) record.manifest.set("abort_reason", record.abort_reason);
  record.manifest.set("boundary_warning", record.boundary_warning_time
                                              ? format_real(*record.boundary_warning_time)
                                              : std::string("none"));
  return record;
}

GridFunction rescale(const GridFunction& u, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("rescale: mu must be > 0");
  const Grid& g = u.grid();
  Grid scaled(g.x_left() / mu, g.dx() / mu, g.num_cells());
  std::vector<double> values(u.values().begin(), u.values().end());
  for (double& v : values) v *= mu;
  return GridFunction(scaled, std::move(values));
}

}  // namespace abe
