#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "abe/experiment.hpp"
#include "abe/kernel.hpp"
#include "abe/profile.hpp"

namespace abe {

namespace {

struct CaseFailure {
  std::string detail;
};

class CaseRng {
 public:
  CaseRng(std::uint64_t seed, std::string_view suite, int case_index) {
    // FNV-1a of the suite name keeps suites independent under one seed.
    std::uint64_t h = 1469598103934665603ull;
    for (char ch : suite) h = (h ^ static_cast<unsigned char>(ch)) * 1099511628211ull;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(case_index)};
    engine_.seed(seq);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool coin() { return integer(0, 1) == 1; }

 private:
  std::mt19937_64 engine_;
};

void require(bool ok, const std::function<std::string()>& detail) {
  if (!ok) throw CaseFailure{detail()};
}

// ---------------------------------------------------------------------------
// Solver problems on a small mesh

struct SolverProblem {
  PhysicalParams params;
  SchemeConfig scheme;
  GridFunction u0;
};

std::vector<double> random_block(CaseRng& rng, std::size_t n, double amplitude) {
  std::vector<double> v(n, 0.0);
  const std::size_t lo = n / 4;
  const std::size_t hi = 3 * n / 4;
  for (std::size_t j = lo; j < hi; ++j) v[j] = rng.uniform(-amplitude, amplitude);
  return v;
}

SolverProblem random_problem(CaseRng& rng) {
  PhysicalParams p;
  p.nu = rng.coin() ? rng.uniform(0.0, 0.05) : 0.0;
  p.c = rng.uniform(0.005, 0.1);
  p.theta = rng.uniform(0.5, 2.0);
  const double dx = std::array{0.05, 0.1, 0.2}[rng.integer(0, 2)];
  const Grid grid = Grid::Uniform(-10.0, 10.0, dx);
  const FluxKind flux = rng.coin() ? FluxKind(EngquistOsher{}) : FluxKind(ModifiedLaxFriedrichs{});
  SchemeConfig scheme(flux, KernelQuadrature::Build(dx, p.theta, choose_n(dx, p.theta, 1e-8)),
                      CorrectorMode::kPaper, grid);
  GridFunction u0(grid, random_block(rng, grid.num_cells(), rng.uniform(0.05, 1.0)));
  return {p, std::move(scheme), std::move(u0)};
}

std::string describe(const SolverProblem& pr) {
  return fmt::format("nu={} c={} theta={} dx={} flux={}", format_real(pr.params.nu),
                     format_real(pr.params.c), format_real(pr.params.theta),
                     format_real(pr.scheme.grid().dx()), flux_name(pr.scheme.flux()));
}

/// Advances two states with one shared dt sequence (the smaller bound of the
/// two) and calls observe after every step.
void run_pair(const SolverProblem& pr, GridFunction u, GridFunction v, double t_end,
              const std::function<void(double, const GridFunction&, const GridFunction&)>& observe) {
  SolverState a{0.0, std::move(u)};
  SolverState b{0.0, std::move(v)};
  while (a.t < t_end) {
    double dt = 0.9 * std::min(stable_dt(a, pr.params, pr.scheme, 1.0),
                               stable_dt(b, pr.params, pr.scheme, 1.0));
    dt = std::min(dt, 0.5);
    if (t_end - a.t <= dt) dt = t_end - a.t;
    a = step_euler(a, pr.params, pr.scheme, dt).first;
    b = step_euler(b, pr.params, pr.scheme, dt).first;
    if (t_end - a.t < 1e-14) a.t = b.t = t_end;
    observe(a.t, a.u, b.u);
  }
}

double l1_distance(const GridFunction& u, const GridFunction& v) {
  std::vector<double> d(u.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = u[j] - v[j];
  return norm(d, u.grid().dx(), NormKind::L1());
}

// ---------------------------------------------------------------------------
// Suites

void kernel_case(CaseRng& rng) {
  const double dx = rng.log_uniform(0.005, 1.0);
  const double theta = rng.log_uniform(0.1, 10.0);
  const double h = dx / theta;
  // The f1 closed form cancels badly for N h < 1; sample the well-conditioned range.
  const int n_min = static_cast<int>(std::ceil(2.0 / h));
  const auto n = static_cast<std::size_t>(rng.integer(n_min, n_min + 3000));
  const auto q = KernelQuadrature::Build(dx, theta, n);
  const double cf0 = closed_form_f0(dx, theta, n);
  const double cf1 = closed_form_f1(dx, theta, n);
  const auto ctx = [&] { return fmt::format("dx={} theta={} N={}", format_real(dx),
                                            format_real(theta), n); };
  require(std::abs(q.f0() - cf0) <= 1e-13 * cf0, [&] {
    return fmt::format("{}: f0={} closed={}", ctx(), format_real(q.f0()), format_real(cf0));
  });
  require(std::abs(q.f1() - cf1) <= 1e-13 * cf1, [&] {
    return fmt::format("{}: f1={} closed={}", ctx(), format_real(q.f1()), format_real(cf1));
  });
  const double f1_limit = h / -std::expm1(-h);
  const double f2_limit = std::pow(0.5 * h / std::sinh(0.5 * h), 2);
  require(q.f0() <= 1.0 + 1e-14 && q.f1() <= f1_limit * (1.0 + 1e-14) &&
              q.f2() <= f2_limit * (1.0 + 1e-14) && q.f2() > 0.0,
          [&] { return ctx() + ": corrector exceeds its infinite-N limit"; });

  const double tol = rng.log_uniform(1e-12, 1e-2);
  const auto nc = choose_n(dx, theta, tol);
  require(std::exp(-static_cast<double>(nc) * h) <= tol &&
              (nc == 1 || std::exp(-static_cast<double>(nc - 1) * h) > tol),
          [&] { return fmt::format("{}: choose_n({})={} not minimal", ctx(), tol, nc); });
}

void contraction_case(CaseRng& rng) {
  const SolverProblem pr = random_problem(rng);
  GridFunction v0(pr.u0.grid(), random_block(rng, pr.u0.size(), rng.uniform(0.05, 1.0)));
  double previous = l1_distance(pr.u0, v0);
  const double tol = 1e-12 * std::max(previous, 1e-300);
  run_pair(pr, pr.u0, v0, 1.0, [&](double t, const GridFunction& u, const GridFunction& v) {
    const double d = l1_distance(u, v);
    require(d <= previous + tol, [&] {
      return fmt::format("{}: ||u-v||_1 grew from {} to {} at t={}", describe(pr),
                         format_real(previous), format_real(d), format_real(t));
    });
    previous = d;
  });
}

void monotone_norms_case(CaseRng& rng) {
  const SolverProblem pr = random_problem(rng);
  RunOptions options;
  options.t_end = 1.0;
  const RunRecord rec = run(pr.u0, pr.params, pr.scheme, options);
  const auto& u0 = pr.u0;
  double l1 = norm(u0, NormKind::L1()), l2 = norm(u0, NormKind::L2());
  double linf = max_abs(u0.values());
  const double tol1 = 1e-12 * l1, tol2 = 1e-12 * l2, tolinf = 1e-12 * linf;
  for (const auto& r : rec.step_reports) {
    require(r.l1 <= l1 + tol1 && r.l2 <= l2 + tol2 && r.linf <= linf + tolinf, [&] {
      return fmt::format("{}: norms (l1,l2,linf) grew to ({},{},{}) from ({},{},{}) at t={}",
                         describe(pr), format_real(r.l1), format_real(r.l2),
                         format_real(r.linf), format_real(l1), format_real(l2),
                         format_real(linf), format_real(r.t));
    });
    l1 = r.l1;
    l2 = r.l2;
    linf = r.linf;
  }
}

void order_case(CaseRng& rng) {
  const SolverProblem pr = random_problem(rng);
  std::vector<double> above(pr.u0.values().begin(), pr.u0.values().end());
  const auto bump = random_block(rng, above.size(), rng.uniform(0.01, 0.5));
  for (std::size_t j = 0; j < above.size(); ++j) above[j] += std::abs(bump[j]);
  GridFunction v0(pr.u0.grid(), std::move(above));
  run_pair(pr, pr.u0, v0, 1.0, [&](double t, const GridFunction& u, const GridFunction& v) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      require(u[j] <= v[j] + 1e-12, [&] {
        return fmt::format("{}: u > v at cell {} t={} ({} vs {})", describe(pr), j,
                           format_real(t), format_real(u[j]), format_real(v[j]));
      });
    }
  });
}

void gns_case(CaseRng& rng) {
  const auto n = static_cast<std::size_t>(rng.integer(1, 200));
  const double dx = rng.log_uniform(1e-3, 1.0);
  const double scale = rng.log_uniform(1e-3, 1e3);
  std::vector<double> v(n);
  for (double& x : v) x = rng.coin() ? scale * rng.uniform(-1.0, 1.0) : 0.0;
  v[static_cast<std::size_t>(rng.integer(0, static_cast<int>(n) - 1))] = scale;
  const GridFunction w(Grid(0.0, dx, std::max<std::size_t>(n, 2)),
                       n >= 2 ? v : std::vector<double>{v[0], 0.0});
  for (double p : {2.0, 3.0, 4.0}) {
    const auto r = gns_inequality_check(w, p);
    require(r.holds, [&] {
      return fmt::format("n={} dx={} p={}: lhs={} rhs={}", n, format_real(dx), p,
                         format_real(r.lhs), format_real(r.rhs));
    });
  }
}

void series_case(CaseRng& rng) {
  const double a = rng.uniform(1e-6, 1.0 - 1e-6);
  const double phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const int n = rng.integer(1, 100);
  const auto r = series_lemma_check(a, phi, n);
  // Equality is attained as phi -> 0; allow rounding on the right-hand side.
  require(r.lhs <= r.rhs * (1.0 + 1e-12) + 1e-300, [&] {
    return fmt::format("a={} phi={} n={}: lhs={} rhs={}", format_real(a), format_real(phi), n,
                       format_real(r.lhs), format_real(r.rhs));
  });
}

double profile_mass(const AsymptoticProfile& prof, double t) {
  const double width = std::sqrt(prof.viscosity() * t);
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double x) { return eval(prof, t, x); }, -80.0 * width, 80.0 * width, 20, 1e-13,
      &error);
}

void profile_case(CaseRng& rng) {
  const double a = rng.log_uniform(0.01, 2.0);
  const double m_prime = rng.log_uniform(0.1, 60.0) * (rng.coin() ? 1.0 : -1.0);
  const double mass = 0.5 * a * m_prime;
  const AsymptoticProfile prof(mass, a);
  const double t = rng.log_uniform(1.0, 1e4);
  const auto ctx = [&] {
    return fmt::format("M={} a={} t={}", format_real(mass), format_real(a), format_real(t));
  };

  const double q = profile_mass(prof, t);
  require(std::abs(q - mass) <= 1e-6 * std::max(1.0, std::abs(mass)),
          [&] { return fmt::format("{}: mass quadrature {}", ctx(), format_real(q)); });

  const double width = std::sqrt(a * t);
  const double x = rng.uniform(-6.0, 6.0) * width;
  const double w = eval(prof, t, x);
  require(mass > 0.0 ? w > 0.0 : w < 0.0,
          [&] { return fmt::format("{}: sign wrong at x={}", ctx(), format_real(x)); });

  // Residual of w_t - w w_x - a w_xx by central differences.
  const double hx = 1e-3 * width;
  const double ht = 1e-3 * t;
  const double wt = (eval(prof, t + ht, x) - eval(prof, t - ht, x)) / (2.0 * ht);
  const double wxp = eval(prof, t, x + hx), wxm = eval(prof, t, x - hx);
  const double wx = (wxp - wxm) / (2.0 * hx);
  const double wxx = (wxp - 2.0 * w + wxm) / (hx * hx);
  const double residual = wt - w * wx - a * wxx;
  const double scale = std::abs(wt) + std::abs(w * wx) + std::abs(a * wxx);
  require(std::abs(residual) <= 1e-4 * scale, [&] {
    return fmt::format("{}: residual {} against scale {} at x={}", ctx(), format_real(residual),
                       format_real(scale), format_real(x));
  });
}

struct Suite {
  std::string_view name;
  bool solver;  // solver suites use check_solver_cases
  void (*body)(CaseRng&);
};

constexpr std::array kSuites{
    Suite{"kernel_closed_forms", false, &kernel_case},
    Suite{"contraction", true, &contraction_case},
    Suite{"monotone_norms", true, &monotone_norms_case},
    Suite{"order_preservation", true, &order_case},
    Suite{"gns", false, &gns_case},
    Suite{"series_lemma", false, &series_case},
    Suite{"profile", false, &profile_case},
};

const Suite& find_suite(std::string_view name) {
  for (const auto& s : kSuites) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown check suite '" + std::string(name) + "'");
}

std::optional<std::string> run_one(const Suite& suite, std::uint64_t seed, int case_index) {
  CaseRng rng(seed, suite.name, case_index);
  try {
    suite.body(rng);
  } catch (const CaseFailure& f) {
    return f.detail;
  } catch (const std::exception& e) {
    return std::string("exception: ") + e.what();
  }
  return std::nullopt;
}

}  // namespace

bool CheckReport::all_passed() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return s.failures == 0; });
}

std::string CheckReport::table() const {
  std::string out = fmt::format("{:<22} {:>6} {:>8}  {}\n", "suite", "cases", "failures",
                                "status");
  for (const auto& s : suites) {
    out += fmt::format("{:<22} {:>6} {:>8}  {}\n", s.suite, s.cases, s.failures,
                       s.failures == 0 ? "PASS" : "FAIL");
    if (s.failures > 0) {
      out += fmt::format("  first failing case {}: {}\n", s.first_failing_case,
                         s.first_failure_detail);
    }
  }
  return out;
}

std::vector<std::string> check_suite_names() {
  std::vector<std::string> names;
  for (const auto& s : kSuites) names.emplace_back(s.name);
  return names;
}

SuiteResult run_check_case(const ExperimentConfig& config, std::string_view suite,
                           std::uint64_t seed, int case_index) {
  (void)config;
  const Suite& s = find_suite(suite);
  SuiteResult r{std::string(s.name), 1, 0, -1, {}};
  if (auto failure = run_one(s, seed, case_index)) {
    r.failures = 1;
    r.first_failing_case = case_index;
    r.first_failure_detail = *failure;
  }
  return r;
}

CheckReport cmd_check(const ExperimentConfig& input) {
  validate(input);
  const ExperimentConfig config = parse_config(to_text(input));
  CheckReport report;
  for (const auto& s : kSuites) {
    SuiteResult r{std::string(s.name), s.solver ? config.check_solver_cases : config.check_cases,
                  0, -1, {}};
    for (int k = 0; k < r.cases; ++k) {
      if (auto failure = run_one(s, config.seed, k)) {
        if (r.failures++ == 0) {
          r.first_failing_case = k;
          r.first_failure_detail = *failure;
        }
      }
    }
    report.suites.push_back(std::move(r));
  }

  if (!report.all_passed()) {
    const std::filesystem::path dir(config.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream out(dir / "replay.txt", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write replay file in " + dir.string());
    for (const auto& s : report.suites) {
      if (s.failures == 0) continue;
      out << "suite = " << s.suite << "\nseed = " << config.seed
          << "\ncase = " << s.first_failing_case << '\n';
      break;
    }
  }
  return report;
}

SuiteResult replay_check(const ExperimentConfig& config, const std::filesystem::path& replay) {
  std::ifstream in(replay);
  if (!in) throw std::runtime_error("cannot read replay file " + replay.string());
  std::string line, suite;
  std::optional<std::uint64_t> seed;
  std::optional<int> case_index;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    value.erase(std::remove_if(value.begin(), value.end(), ::isspace), value.end());
    if (key == "suite") suite = value;
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "case") case_index = std::stoi(value);
  }
  if (suite.empty() || !seed || !case_index) {
    throw std::runtime_error("replay file needs suite, seed and case entries");
  }
  return run_check_case(config, suite, *seed, *case_index);
}

}  // namespace abe
