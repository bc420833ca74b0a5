#ifndef ABE_EXPERIMENT_HPP_
#define ABE_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abe/analysis.hpp"
#include "abe/grid.hpp"
#include "abe/run_record.hpp"
#include "abe/scheme.hpp"

namespace abe {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class InitialKind { kPaper4, kGaussian, kBoxPair, kFromFile };

/// Box pair: height1 on [left1, right1] plus height2 on [left2, right2].
struct BoxPair {
  double left1 = -2.0, right1 = 0.0, height1 = 0.1;
  double left2 = 0.0, right2 = 1.0, height2 = -0.05;
};

enum class ProfileViscosity { kDiscrete, kContinuous };

/// Every tunable of an experiment. Keys of the `key = value` config format
/// are the member names below (listed by config_keys()).
struct ExperimentConfig {
  PhysicalParams physical;
  double dx = 0.1;
  double x_left = -200.0;
  double x_right = 200.0;
  std::string flux = "eo";
  std::string corrector_mode = "paper";
  double tail_tol = 1e-8;
  double safety = 0.9;
  double dt_max = 0.5;
  std::string dt_policy = "adaptive";
  double fixed_dt = 0.1;
  double t_end = 1e4;
  std::vector<double> snapshot_times = {1e2, 1e3, 1e4};
  InitialKind initial_data = InitialKind::kPaper4;
  double gaussian_mass = 0.15;
  double gaussian_width = 1.0;
  double gaussian_center = 0.0;
  BoxPair boxpair;
  std::string initial_file;
  std::uint64_t seed = 20240601;
  std::string output_dir = "out";
  std::size_t report_stride = 1;
  ProfileViscosity profile_viscosity = ProfileViscosity::kDiscrete;
  double rates_t_min = 1e2;
  double rates_t_max = 1e4;
  int rates_points_per_decade = 20;
  double nwave_nu = 1e-4;
  double nwave_c = 2e-4;
  double nwave_t_end = 100.0;
  std::vector<double> selfconv_dx = {0.2, 0.1, 0.05};
  double selfconv_t = 1.0;
  int check_cases = 1000;
  int check_solver_cases = 20;
};

struct ConfigKey {
  std::string_view name;
  std::string_view accepted;
};

/// The documented key set, in canonical order.
const std::vector<ConfigKey>& config_keys();

/// Parses `key = value` lines (`#` starts a comment), applies the overrides on
/// top, then validates. Missing keys take their defaults.
ExperimentConfig parse_config(std::string_view text,
                              const std::map<std::string, std::string>& overrides = {});

/// Throws ConfigError naming the offending key.
void validate(const ExperimentConfig& config);

/// Canonical text of every key; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

/// Git blob object id (SHA-1 of "blob <size>\0" + content), hex encoded.
std::string git_blob_hash(std::string_view content);

/// The initial datum named by the config (the Paper4 default is the sine pair
/// with its jump at x = -pi).
InitialProfile make_initial(const ExperimentConfig& config);
Grid make_grid(const ExperimentConfig& config);
SchemeConfig make_scheme(const ExperimentConfig& config, FluxKind flux, CorrectorMode mode);
RunOptions make_run_options(const ExperimentConfig& config);

/// Viscosity of the comparison profile: nu + c f2 or nu + c.
double profile_viscosity(const ExperimentConfig& config, const KernelQuadrature& q);

/// Logarithmic grid t_min * 10^{k / per_decade} up to t_max (inclusive).
std::vector<double> log_time_grid(double t_min, double t_max, int per_decade);

struct RunOutput {
  RunRecord record;
  std::filesystem::path directory;
};

/// snapshots.csv (t,x,u), norms.csv (t,l1,l2,linf,mass) and manifest.txt.
RunOutput cmd_run(const ExperimentConfig& config);

struct VariantSeries {
  std::string variant;
  std::vector<RateSeries> by_norm;  // p = 1, 2, infinity
  RunRecord record;
};

struct RatesOutput {
  std::vector<VariantSeries> variants;  // eo_paper, mlf_paper, eo_naive
  AsymptoticProfile profile;
};

/// rates.csv (t,variant,p,scaled_error), final.csv, profile.csv, manifest.txt.
RatesOutput cmd_rates(const ExperimentConfig& config);

struct NWaveOutput {
  RunRecord eo;
  RunRecord mlf;
  NWaveDiagnostic eo_diag;
  NWaveDiagnostic mlf_diag;
};

/// nwave_final.csv (variant,x,u), nwave_diagnostics.csv, manifest.txt.
NWaveOutput cmd_nwave(const ExperimentConfig& config);

/// selfconv.csv (dx_coarse,dx_fine,l1_difference).
std::vector<ConvergenceEntry> cmd_selfconv(const ExperimentConfig& config);

/// profile.csv (t,x,u) sampled at the snapshot times.
AsymptoticProfile cmd_profile(const ExperimentConfig& config);

struct SuiteResult {
  std::string suite;
  int cases = 0;
  int failures = 0;
  int first_failing_case = -1;
  std::string first_failure_detail;
};

struct CheckReport {
  std::vector<SuiteResult> suites;
  bool all_passed() const;
  /// Fixed-width pass/fail table.
  std::string table() const;
};

std::vector<std::string> check_suite_names();

/// Runs every randomized invariant suite. On failure, replay.txt in the output
/// directory names the first failing case.
CheckReport cmd_check(const ExperimentConfig& config);

/// Reruns one case of one suite; the returned result has cases == 1.
SuiteResult run_check_case(const ExperimentConfig& config, std::string_view suite,
                           std::uint64_t seed, int case_index);

/// Reads a replay file (suite, seed, case) and reruns that case.
SuiteResult replay_check(const ExperimentConfig& config, const std::filesystem::path& replay);

}  // namespace abe

#endif  // ABE_EXPERIMENT_HPP_
