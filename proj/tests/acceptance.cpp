// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "abe/experiment.hpp"
#include "abe/kernel.hpp"
#include "abe/profile.hpp"
#include "oracles.hpp"

using namespace abe;

namespace {

int g_failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  fmt::print("criterion {:>2} [{}] {}: {}\n", id, ok ? "PASS" : "FAIL", title, detail);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void note(const std::string& text) { fmt::print("             {}\n", text); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double value_at(const RateSeries& s, double t) {
  for (const auto& e : s.entries) {
    if (std::abs(e.t - t) <= 1e-9 * t) return e.scaled_error;
  }
  throw std::runtime_error(fmt::format("no entry at t = {}", t));
}

const ExperimentConfig& base() {
  static const ExperimentConfig c = parse_config("");
  return c;
}

GridFunction initial_on(const SchemeConfig& s) { return project_initial(make_initial(base()), s.grid()); }

/// Advances u and v with a shared dt (safety times the smaller bound).
void run_shared(const PhysicalParams& p, const SchemeConfig& s, GridFunction u, GridFunction v,
                double t_end, const std::function<void(double, const GridFunction&, const GridFunction&)>& step) {
  SolverState a{0.0, std::move(u)}, b{0.0, std::move(v)};
  while (a.t < t_end) {
    double dt = std::min({0.9 * stable_dt(a, p, s, 1.0), 0.9 * stable_dt(b, p, s, 1.0), 0.5});
    if (t_end - a.t <= dt) dt = t_end - a.t;
    a = step_euler(a, p, s, dt).first;
    b = step_euler(b, p, s, dt).first;
    step(a.t, a.u, b.u);
  }
}

double l1_diff(const GridFunction& u, const GridFunction& v) {
  std::vector<double> d(u.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = u[j] - v[j];
  return norm(d, u.grid().dx(), NormKind::L1());
}

// ---------------------------------------------------------------------------

void criteria_1_2_4() {
  const auto& c = base();
  const PhysicalParams& p = c.physical;
  const auto eo = make_scheme(c, EngquistOsher{}, CorrectorMode::kPaper);
  const auto u0 = initial_on(eo);

  RunOptions o = make_run_options(c);
  o.snapshot_times = log_time_grid(1.0, 1e4, 20);
  o.report_stride = 1;
  const auto start = std::chrono::steady_clock::now();
  const RunRecord rec = run(u0, p, eo, o);
  const double elapsed = seconds_since(start);

  // 1. Mass.
  double worst = 0.0;
  for (const auto& s : rec.snapshots) worst = std::max(worst, std::abs(mass(s.u) - 0.15));
  double worst_step = 0.0;
  for (const auto& r : rec.step_reports) worst_step = std::max(worst_step, std::abs(r.mass_after - 0.15));
  report(1, "mass conservation, EO + Paper to t = 1e4",
         rec.status == RunStatus::kCompleted && worst <= 1e-8 && elapsed <= 600.0,
         fmt::format("max |mass - 0.15| = {:.3e} over {} snapshots ({:.3e} over {} steps), "
                     "tol 1e-8; {:.1f} s (limit 600 s)",
                     worst, rec.snapshots.size(), worst_step, rec.steps_taken, elapsed));

  // 2. Monotone norms at every step, plus boundedness of the decay monitors.
  double l1 = norm(u0, NormKind::L1()), l2 = norm(u0, NormKind::L2()), li = max_abs(u0.values());
  double rise1 = 0, rise2 = 0, risei = 0;
  for (const auto& r : rec.step_reports) {
    rise1 = std::max(rise1, r.l1 - l1);
    rise2 = std::max(rise2, r.l2 - l2);
    risei = std::max(risei, r.linf - li);
    l1 = r.l1;
    l2 = r.l2;
    li = r.linf;
  }
  const bool monotone = rise1 <= 1e-12 && rise2 <= 1e-12 && risei <= 1e-12;
  bool bounded = true;
  std::string monitors;
  for (auto [label, kind] : {std::pair{"1", NormKind::L1()}, std::pair{"2", NormKind::L2()},
                             std::pair{"inf", NormKind::Infinity()}}) {
    const bool b1 = is_bounded(decay_monitor(rec, kind), 1.0, 1e4);
    const bool b2 = is_bounded(grad_decay_monitor(rec, kind), 1.0, 1e4);
    bounded = bounded && b1 && b2;
    monitors += fmt::format(" p={}:{}/{}", label, b1 ? "ok" : "unbounded", b2 ? "ok" : "unbounded");
  }
  report(2, "monotone L1/L2/Linf decay at every step", monotone && bounded,
         fmt::format("largest per-step increase (l1, l2, linf) = ({:.1e}, {:.1e}, {:.1e}), tol 1e-12; "
                     "decay/gradient monitors max <= 10 median on [1, 1e4]:{}",
                     rise1, rise2, risei, monitors));

  // 4. Rates against the diffusive wave with a = nu + c f2.
  const AsymptoticProfile prof(mass(u0), profile_viscosity(c, eo.quadrature()));
  RunOptions two = make_run_options(c);
  two.snapshot_times = {1e2, 1e4};
  two.report_stride = 1000;
  const auto mlf_rec = run(u0, p, make_scheme(c, ModifiedLaxFriedrichs{}, CorrectorMode::kPaper), two);
  const auto naive_rec = run(u0, p, make_scheme(c, EngquistOsher{}, CorrectorMode::kNaive), two);
  RunRecord eo_later, mlf_later, naive_later;
  eo_later.snapshots.assign(rec.snapshots.begin() + 1, rec.snapshots.end());
  mlf_later.snapshots.assign(mlf_rec.snapshots.begin() + 1, mlf_rec.snapshots.end());
  naive_later.snapshots.assign(naive_rec.snapshots.begin() + 1, naive_rec.snapshots.end());
  bool ok4 = true;
  std::string detail;
  for (auto [label, kind] : {std::pair{"1", NormKind::L1()}, std::pair{"2", NormKind::L2()},
                             std::pair{"inf", NormKind::Infinity()}}) {
    const auto se = scaled_profile_error(eo_later, prof, kind);
    const double e2 = value_at(se, 1e2), e4 = value_at(se, 1e4);
    const double m4 = value_at(scaled_profile_error(mlf_later, prof, kind), 1e4);
    const double n4 = value_at(scaled_profile_error(naive_later, prof, kind), 1e4);
    const bool ok = e4 < e2 && e4 < m4 && e4 < n4;
    ok4 = ok4 && ok;
    detail += fmt::format("{}p={}: EO {:.3e} -> {:.3e}, MLF {:.3e}, Naive {:.3e}", detail.empty() ? "" : "; ",
                          label, e2, e4, m4, n4);
  }
  report(4, "scaled profile errors decrease and EO + Paper is best at t = 1e4", ok4, detail);
}

void criterion_3() {
  const auto& c = base();
  const auto eo = make_scheme(c, EngquistOsher{}, CorrectorMode::kPaper);
  const auto u0 = initial_on(eo);
  std::vector<double> half(u0.values().begin(), u0.values().end());
  for (double& x : half) x *= 0.5;
  double prev = l1_diff(u0, GridFunction(eo.grid(), half));
  const double d0 = prev;
  double rise = 0.0;
  std::size_t steps = 0;
  run_shared(c.physical, eo, u0, GridFunction(eo.grid(), half), 1e3,
             [&](double, const GridFunction& u, const GridFunction& v) {
               const double d = l1_diff(u, v);
               rise = std::max(rise, d - prev);
               prev = d;
               ++steps;
             });
  report(3, "L1 contraction of u0 and u0/2 with a shared dt sequence", rise <= 1e-12,
         fmt::format("||u - v||_1: {:.6e} -> {:.6e} over {} steps to t = 1e3; largest increase "
                     "{:.1e}, tol 1e-12",
                     d0, prev, steps, rise));
}

void criterion_5() {
  ExperimentConfig c = base();
  c.output_dir = (std::filesystem::temp_directory_path() / "abe_acceptance_nwave").string();
  const auto start = std::chrono::steady_clock::now();
  const auto out = cmd_nwave(c);
  const double elapsed = seconds_since(start);
  const double m_eo = mass(out.eo.snapshots.back().u), m_mlf = mass(out.mlf.snapshots.back().u);
  const bool ok = out.eo_diag.min < -1e-3 && out.eo_diag.max > 1e-3 &&
                  std::abs(out.eo_diag.negative_mass) > std::abs(out.mlf_diag.negative_mass) &&
                  std::abs(m_eo - 0.15) <= 1e-8 && std::abs(m_mlf - 0.15) <= 1e-8 && elapsed <= 120.0;
  report(5, "N-wave retained by EO at nu = 1e-4, c = 2e-4, t = 100", ok,
         fmt::format("EO min {:.4e} max {:.4e} (limits -1e-3, 1e-3); negative mass EO {:.4e} vs MLF "
                     "{:.4e}; mass drift EO {:.1e} MLF {:.1e}; {:.1f} s (limit 120 s)",
                     out.eo_diag.min, out.eo_diag.max, out.eo_diag.negative_mass,
                     out.mlf_diag.negative_mass, std::abs(m_eo - 0.15), std::abs(m_mlf - 0.15), elapsed));
}

void criterion_6() {
  auto quad = [](double dx) { return KernelQuadrature::Build(dx, 1.0, choose_n(dx, 1.0, 1e-8)); };
  const auto q01 = quad(0.1), q001 = quad(0.01);
  const bool f2_ok = std::abs(q01.f2() - 1.0) <= 1e-2 && std::abs(q001.f2() - 1.0) <= 1e-3;
  note(fmt::format("|F2 - 1| = {:.3e} at dx = 0.1 (tol 1e-2), {:.3e} at dx = 0.01 (tol 1e-3): {}",
                   std::abs(q01.f2() - 1.0), std::abs(q001.f2() - 1.0), f2_ok ? "ok" : "violated"));

  double worst_closed = 0.0;
  const std::vector<double> dxs = {0.4, 0.2, 0.1, 0.05, 0.01};
  for (double dx : dxs) {
    const auto q = quad(dx);
    worst_closed = std::max({worst_closed,
                             std::abs(q.f0() - closed_form_f0(dx, 1.0, q.n_terms())) / q.f0(),
                             std::abs(q.f1() - closed_form_f1(dx, 1.0, q.n_terms())) / q.f1()});
  }
  const bool closed_ok = worst_closed <= 1e-13;
  note(fmt::format("closed forms of F0, F1: worst relative gap {:.2e} (tol 1e-13): {}", worst_closed,
                   closed_ok ? "ok" : "violated"));

  bool mono_ok = true;
  const char* names[] = {"F0", "F1", "F2"};
  for (int k = 0; k < 3; ++k) {
    std::string seq;
    double prev = INFINITY;
    bool mono = true;
    for (double dx : {0.4, 0.2, 0.1, 0.05}) {
      const auto q = quad(dx);
      const double gap = std::abs((k == 0 ? q.f0() : k == 1 ? q.f1() : q.f2()) - 1.0);
      seq += fmt::format(" {:.3e}", gap);
      mono = mono && gap < prev;
      prev = gap;
    }
    mono_ok = mono_ok && mono;
    note(fmt::format("|{} - 1| over dx = 0.4, 0.2, 0.1, 0.05:{} -> {}", names[k], seq,
                     mono ? "monotone" : "NOT monotone"));
  }
  report(6, "corrector factors", f2_ok && closed_ok && mono_ok,
         fmt::format("F2 bounds {}, closed forms {}, monotone approach {}", f2_ok ? "ok" : "fail",
                     closed_ok ? "ok" : "fail", mono_ok ? "ok" : "fail"));
}

void criterion_7() {
  double worst_c = 0.0;
  for (double m : {0.15, -0.15, 1.0, 4.0 * std::log(2.0)}) {
    const double b = oracle::c_by_bisection(m);
    worst_c = std::max(worst_c, std::abs(c_constant(m) - b) / std::abs(b));
  }

  const auto& c = base();
  const auto q = KernelQuadrature::Build(c.dx, 1.0, choose_n(c.dx, 1.0, c.tail_tol));
  const double a = profile_viscosity(c, q);
  const AsymptoticProfile prof(0.15, a);
  double worst_mass = 0.0;
  for (double t : {1.0, 1e4}) {
    const double w = std::sqrt(a * t);
    const double m = oracle::integral([&](double x) { return eval(prof, t, x); }, -80 * w, 80 * w);
    worst_mass = std::max(worst_mass, std::abs(m - 0.15));
  }

  double worst_order = INFINITY;
  for (double t : {10.0, 100.0}) {
    for (double x : {-3.0, -1.0, 0.0, 1.0, 4.0}) {
      auto residual = [&](double h) {
        const double ht = h * std::sqrt(t / a);
        const double wt = (eval(prof, t + ht, x) - eval(prof, t - ht, x)) / (2 * ht);
        const double w0 = eval(prof, t, x), wp = eval(prof, t, x + h), wm = eval(prof, t, x - h);
        return std::abs(wt - w0 * (wp - wm) / (2 * h) - a * (wp - 2 * w0 + wm) / (h * h));
      };
      const double r1 = residual(0.2), r2 = residual(0.1), r3 = residual(0.05);
      worst_order = std::min({worst_order, std::log2(r1 / r2), std::log2(r2 / r3)});
    }
  }

  double worst_collapse = 0.0;
  for (double xi : {-2.0, -0.7, 0.0, 0.5, 1.8}) {
    const double ref = eval(prof, 1.0, xi);
    for (double t : {10.0, 100.0}) {
      worst_collapse = std::max(worst_collapse,
                                std::abs(std::sqrt(t) * eval(prof, t, std::sqrt(t) * xi) - ref) / std::abs(ref));
    }
  }
  const bool ok = worst_c <= 1e-10 && worst_mass <= 1e-6 && worst_order >= 1.8 && worst_collapse <= 1e-10;
  report(7, "diffusive wave profile", ok,
         fmt::format("C_M vs bisection {:.1e} (tol 1e-10); mass error {:.1e} (tol 1e-6); residual "
                     "order >= {:.3f} (min 1.8); collapse {:.1e} (tol 1e-10)",
                     worst_c, worst_mass, worst_order, worst_collapse));
}

void criterion_8() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int gns_fail = 0, gns_total = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(u(rng) * 200);
    const double scale = std::pow(10.0, -3.0 + 6.0 * u(rng));
    std::vector<double> v(n);
    for (double& x : v) x = u(rng) < 0.3 ? 0.0 : scale * (2.0 * u(rng) - 1.0);
    v[n / 2] = scale;
    const GridFunction w(Grid(0.0, std::pow(10.0, -3.0 + 3.0 * u(rng)), n), v);
    for (double p : {2.0, 3.0, 4.0}) {
      ++gns_total;
      if (!gns_inequality_check(w, p).holds) ++gns_fail;
    }
  }
  int series_fail = 0;
  for (int k = 0; k < 1000; ++k) {
    const double a = 1e-6 + (1.0 - 2e-6) * u(rng);
    const double phi = std::numbers::pi * (2.0 * u(rng) - 1.0);
    const int n = 1 + static_cast<int>(u(rng) * 100);
    if (!series_lemma_check(a, phi, n).holds) ++series_fail;
  }
  report(8, "auxiliary inequalities on randomized inputs", gns_fail == 0 && series_fail == 0,
         fmt::format("Gagliardo-Nirenberg {} failures / {} checks; series lemma {} failures / 1000",
                     gns_fail, gns_total, series_fail));
}

void criterion_9() {
  const auto& c = base();
  SelfConvergenceSetup setup;
  setup.initial = make_initial(c);
  setup.params = c.physical;
  setup.x_left = c.x_left;
  setup.x_right = c.x_right;
  const std::vector<double> dxs = {0.2, 0.1, 0.05};
  const auto e = self_convergence(setup, dxs, 1.0);
  const double ratio = e[1].l1_difference / e[0].l1_difference;
  report(9, "self-convergence over dx = 0.2, 0.1, 0.05 at t = 1",
         e[1].l1_difference < e[0].l1_difference && ratio <= 0.8,
         fmt::format("L1 differences {:.4e}, {:.4e}; ratio {:.3f} (max 0.8)", e[0].l1_difference,
                     e[1].l1_difference, ratio));
}

void criterion_10() {
  const auto& c = base();
  const Grid g = Grid::Uniform(-20.0, 20.0, c.dx);
  const auto q = KernelQuadrature::Build(c.dx, 1.0, choose_n(c.dx, 1.0, c.tail_tol));
  const SchemeConfig s(EngquistOsher{}, q, CorrectorMode::kPaper, g);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = -INFINITY;
  int violations = 0;
  for (int pair = 0; pair < 20; ++pair) {
    std::vector<double> a(g.num_cells(), 0.0), b(g.num_cells(), 0.0);
    const double amp = 0.05 + 0.5 * std::abs(u(rng));
    for (std::size_t j = 100; j < 300; ++j) {
      a[j] = amp * u(rng);
      b[j] = a[j] + amp * std::abs(u(rng));
    }
    GridFunction ua(g, a), ub(g, b);
    run_shared(c.physical, s, ua, ub, 1.0, [&](double t, const GridFunction& x, const GridFunction& y) {
      if (t < 1.0) return;
      for (std::size_t j = 0; j < x.size(); ++j) {
        worst = std::max(worst, x[j] - y[j]);
        if (x[j] > y[j] + 1e-12) ++violations;
      }
    });
  }
  report(10, "order preservation for 20 random ordered pairs at t = 1", violations == 0,
         fmt::format("max_j (u_j - v_j) = {:.3e}; cells above 1e-12: {}", worst, violations));
}

}  // namespace

int main() {
  fmt::print("Acceptance criteria (default configuration: nu = 1e-2, c = 2e-2, theta = 1, dx = 0.1, "
             "domain [-200, 200])\n");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::function<void()>> steps = {criteria_1_2_4, criterion_3, criterion_5,
                                                    criterion_6,    criterion_7, criterion_8,
                                                    criterion_9,    criterion_10};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      fmt::print("criterion block threw: {}\n", e.what());
      ++g_failures;
    }
  }
  fmt::print("{} failing criteria; total {:.1f} s\n", g_failures, seconds_since(start));
  return g_failures == 0 ? 0 : 1;
}
