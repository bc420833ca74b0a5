#include "abe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "abe/kernel.hpp"
#include "abe/summation.hpp"

namespace abe {

namespace {

double initial_l1(const RunRecord& record) {
  if (record.snapshots.empty()) throw std::invalid_argument("monitor: record has no snapshots");
  return norm(record.snapshots.front().u, NormKind::L1());
}

std::vector<DecayEntry> monitor(const RunRecord& record, NormKind p, bool gradient) {
  const double l1_0 = initial_l1(record);
  const double rate = p.decay_exponent() + (gradient ? 0.5 : 0.0);
  std::vector<DecayEntry> out;
  out.reserve(record.snapshots.size());
  for (const auto& snap : record.snapshots) {
    const double value = gradient ? norm(d_plus(snap.u), p) : norm(snap.u, p);
    const double ratio = l1_0 > 0.0 ? value * std::pow(snap.t, rate) / l1_0 : 0.0;
    out.push_back({snap.t, value, ratio});
  }
  return out;
}

}  // namespace

RateSeries scaled_profile_error(const RunRecord& record, const AsymptoticProfile& profile,
                                NormKind p) {
  if (record.snapshots.empty()) {
    throw std::invalid_argument("scaled_profile_error: record has no snapshots");
  }
  RateSeries series{p, {}};
  const double rate = p.decay_exponent();
  for (const auto& snap : record.snapshots) {
    if (!(snap.t > 0.0)) {
      std::cerr << "warning: scaled_profile_error skips the snapshot at t = " << snap.t << '\n';
      continue;
    }
    const GridFunction target = sample_on_grid(profile, snap.u.grid(), snap.t);
    std::vector<double> diff(snap.u.size());
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = snap.u[j] - target[j];
    const double err = norm(diff, snap.u.grid().dx(), p);
    series.entries.push_back({snap.t, std::pow(snap.t, rate) * err});
  }
  return series;
}

std::vector<DecayEntry> decay_monitor(const RunRecord& record, NormKind p) {
  return monitor(record, p, false);
}

std::vector<DecayEntry> grad_decay_monitor(const RunRecord& record, NormKind p) {
  return monitor(record, p, true);
}

bool is_bounded(std::span<const DecayEntry> series, double t_min, double t_max, double factor) {
  std::vector<double> ratios;
  for (const auto& e : series) {
    if (e.t >= t_min && e.t <= t_max) ratios.push_back(e.bound_ratio);
  }
  if (ratios.empty()) return true;
  const double max = *std::max_element(ratios.begin(), ratios.end());
  const auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
  std::nth_element(ratios.begin(), mid, ratios.end());
  double median = *mid;
  if (ratios.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(ratios.begin(), mid));
  }
  return max <= factor * median;
}

GridFunction restrict_pairs(const GridFunction& fine) {
  const Grid& g = fine.grid();
  if (g.num_cells() % 2 != 0) {
    throw std::invalid_argument("restrict_pairs: fine mesh needs an even number of cells");
  }
  Grid coarse(g.x_left(), 2.0 * g.dx(), g.num_cells() / 2);
  std::vector<double> values(coarse.num_cells());
  for (std::size_t j = 0; j < values.size(); ++j) {
    values[j] = 0.5 * (fine[2 * j] + fine[2 * j + 1]);
  }
  return GridFunction(coarse, std::move(values));
}

std::vector<ConvergenceEntry> self_convergence(const SelfConvergenceSetup& setup,
                                               std::span<const double> dx_list, double t_check) {
  if (dx_list.size() < 2) throw std::invalid_argument("self_convergence: need at least two dx");
  if (!(t_check > 0.0)) throw std::invalid_argument("self_convergence: t_check must be > 0");
  for (std::size_t i = 0; i + 1 < dx_list.size(); ++i) {
    const double ratio = dx_list[i] / dx_list[i + 1];
    if (std::abs(ratio - 1.0) > 1e-12 && std::abs(ratio - 2.0) > 1e-12) {
      throw std::invalid_argument("self_convergence: meshes are not nested (dx must halve)");
    }
  }

  std::vector<GridFunction> finals;
  for (double dx : dx_list) {
    const Grid grid = Grid::Uniform(setup.x_left, setup.x_right, dx);
    const auto n = choose_n(dx, setup.params.theta, setup.tail_tol);
    SchemeConfig config(setup.flux, KernelQuadrature::Build(dx, setup.params.theta, n),
                        setup.corrector, grid);
    RunOptions options;
    options.t_end = t_check;
    options.snapshot_times = {t_check};
    options.safety = setup.safety;
    options.dt_max = setup.dt_max;
    options.report_stride = 1u << 30;
    RunRecord rec = run(project_initial(setup.initial, grid), setup.params, config, options);
    if (rec.status != RunStatus::kCompleted) {
      throw std::runtime_error("self_convergence: run aborted at dx = " + format_real(dx) +
                               ": " + rec.abort_reason);
    }
    finals.push_back(std::move(rec.snapshots.back().u));
  }

  std::vector<ConvergenceEntry> out;
  for (std::size_t i = 0; i + 1 < finals.size(); ++i) {
    const GridFunction& coarse = finals[i];
    const bool same = std::abs(dx_list[i] / dx_list[i + 1] - 1.0) <= 1e-12;
    const GridFunction fine = same ? finals[i + 1] : restrict_pairs(finals[i + 1]);
    if (fine.size() != coarse.size()) {
      throw std::invalid_argument("self_convergence: restricted mesh does not match");
    }
    std::vector<double> diff(coarse.size());
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = coarse[j] - fine[j];
    out.push_back({dx_list[i], dx_list[i + 1], norm(diff, coarse.grid().dx(), NormKind::L1())});
  }
  return out;
}

NWaveDiagnostic n_wave_diagnostic(const GridFunction& w) {
  const auto u = w.values();
  NWaveDiagnostic d{u[0], u[0], 0.0, 0.0};
  CompensatedSum pos, neg;
  for (double v : u) {
    d.min = std::min(d.min, v);
    d.max = std::max(d.max, v);
    if (v > 0.0) pos.add(v);
    if (v < 0.0) neg.add(v);
  }
  d.positive_mass = w.grid().dx() * pos.value();
  d.negative_mass = w.grid().dx() * neg.value();
  return d;
}

InequalityCheck gns_inequality_check(const GridFunction& w, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("gns_inequality_check: p must be > 1 and finite");
  }
  const double norm_p = norm(w, NormKind::P(p));
  const double norm_1 = norm(w, NormKind::L1());
  if (norm_1 == 0.0) throw std::invalid_argument("gns_inequality_check: w is identically zero");

  std::vector<double> powered(w.size());
  for (std::size_t j = 0; j < powered.size(); ++j) powered[j] = std::pow(std::abs(w[j]), p / 2.0);
  const GridFunction extended = pad(GridFunction(w.grid(), std::move(powered)), 1, 1);
  const double grad_2 = norm(d_plus(extended), NormKind::L2());

  // Both sides in log form: the exponents reach 20/3 at p = 4.
  const double lhs_log = p * (p + 1.0) / (p - 1.0) * std::log(norm_p);
  const double rhs_log =
      std::log(4.0) + 2.0 * p / (p - 1.0) * std::log(norm_1) + 2.0 * std::log(grad_2);
  return {lhs_log <= rhs_log, std::exp(lhs_log), std::exp(rhs_log)};
}

InequalityCheck series_lemma_check(double a, double phi, int n) {
  if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("series_lemma_check: a must be in (0,1)");
  if (n < 1) throw std::invalid_argument("series_lemma_check: n must be >= 1");
  using C = std::complex<double>;
  // b^k - 1 written as (cos - 1) + i sin with cos - 1 = -2 sin^2, exact at phi = 0.
  auto b_pow_minus_one = [phi](double k) {
    const double s = std::sin(0.5 * k * phi);
    return C(-2.0 * s * s, std::sin(k * phi));
  };
  C first(0.0, 0.0);
  double moment = 0.0;
  double a_k = 1.0;
  for (int k = 1; k <= n; ++k) {
    a_k *= a;
    first += a_k * b_pow_minus_one(k);
    moment += k * a_k;
  }
  // 1/b - 1 = conj(b) - 1 on the unit circle.
  const C inv_b_minus_one = std::conj(b_pow_minus_one(1.0));
  const double lhs = std::abs(first + moment * inv_b_minus_one);
  const double half_sin = std::sin(0.5 * phi);
  const double rhs = 4.0 * half_sin * half_sin * a / std::pow(1.0 - a, 3);
  return {lhs <= rhs, lhs, rhs};
}

}  // namespace abe
