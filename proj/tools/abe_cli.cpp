// abe: command line front end for the augmented Burgers experiments.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "abe/experiment.hpp"

namespace {

std::string key_help() {
  std::string out = "Config keys (file lines `key = value`, or --key VALUE):\n";
  for (const auto& k : abe::config_keys()) {
    out += fmt::format("  {:<24} {}\n", k.name, k.accepted);
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw abe::ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_run(const abe::RunRecord& rec) {
  fmt::print("status: {}  steps: {}  snapshots: {}\n",
             rec.status == abe::RunStatus::kCompleted ? "completed" : "aborted", rec.steps_taken,
             rec.snapshots.size());
  if (rec.boundary_warning_time) {
    fmt::print("warning: solution reached the domain edge at t = {}\n",
               abe::format_real(*rec.boundary_warning_time));
  }
  if (!rec.abort_reason.empty()) fmt::print("abort: {}\n", rec.abort_reason);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-preserving solver for the augmented Burgers equation"};
  app.footer(key_help());
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "Config file of `key = value` lines")
      ->check(CLI::ExistingFile);
  app.add_option_function<std::string>(
      "--out", [&](const std::string& v) { overrides["output_dir"] = v; }, "Output directory");
  app.add_option_function<std::string>(
      "--seed", [&](const std::string& v) { overrides["seed"] = v; }, "Seed of the check suites");
  for (const auto& key : abe::config_keys()) {
    const std::string name(key.name);
    if (name == "seed" || name == "output_dir") continue;
    app.add_option_function<std::string>(
           "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; },
           std::string(key.accepted))
        ->group("Config overrides");
  }

  auto* run = app.add_subcommand("run", "Single run: snapshots.csv, norms.csv, manifest.txt");
  auto* rates = app.add_subcommand("rates", "Scaled profile errors of three scheme variants");
  auto* nwave = app.add_subcommand("nwave", "Small-viscosity N-wave run with EO and MLF");
  auto* selfconv = app.add_subcommand("selfconv", "L1 self-convergence over nested meshes");
  auto* profile = app.add_subcommand("profile", "Sample the asymptotic diffusive wave");
  auto* check = app.add_subcommand("check", "Randomized invariant suites");
  std::string replay_path;
  check->add_option("--replay", replay_path, "Rerun the single case named in a replay file")
      ->check(CLI::ExistingFile);
  for (auto* sub : {run, rates, nwave, selfconv, profile, check}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const std::string text = config_path.empty() ? std::string() : read_text(config_path);
    const abe::ExperimentConfig config = abe::parse_config(text, overrides);

    if (run->parsed()) {
      const auto out = abe::cmd_run(config);
      print_run(out.record);
      fmt::print("wrote {}\n", out.directory.string());
      return out.record.status == abe::RunStatus::kCompleted ? 0 : 3;
    }
    if (rates->parsed()) {
      const auto out = abe::cmd_rates(config);
      for (const auto& v : out.variants) {
        fmt::print("{:<10}", v.variant);
        for (const auto& s : v.by_norm) {
          fmt::print("  p={:<4} {:.6e} -> {:.6e}", s.p.is_infinity() ? "inf" : fmt::format("{}", s.p.p()),
                     s.entries.front().scaled_error, s.entries.back().scaled_error);
        }
        fmt::print("\n");
      }
      return 0;
    }
    if (nwave->parsed()) {
      const auto out = abe::cmd_nwave(config);
      for (const auto& [name, d] : {std::pair{"eo", out.eo_diag}, std::pair{"mlf", out.mlf_diag}}) {
        fmt::print("{:<4} min {:.6e}  max {:.6e}  negative mass {:.6e}\n", name, d.min, d.max,
                   d.negative_mass);
      }
      return 0;
    }
    if (selfconv->parsed()) {
      for (const auto& e : abe::cmd_selfconv(config)) {
        fmt::print("dx {} vs {}: L1 difference {:.6e}\n", abe::format_real(e.dx_coarse),
                   abe::format_real(e.dx_fine), e.l1_difference);
      }
      return 0;
    }
    if (profile->parsed()) {
      const auto p = abe::cmd_profile(config);
      fmt::print("mass {}  viscosity {}  C_M {}\n", abe::format_real(p.mass()),
                 abe::format_real(p.viscosity()), abe::format_real(p.c_m()));
      return 0;
    }
    if (check->parsed()) {
      if (!replay_path.empty()) {
        const auto r = abe::replay_check(config, replay_path);
        fmt::print("{} case {}: {}\n", r.suite, r.first_failing_case < 0 ? 0 : r.first_failing_case,
                   r.failures == 0 ? "PASS" : "FAIL " + r.first_failure_detail);
        return r.failures == 0 ? 0 : 1;
      }
      const auto report = abe::cmd_check(config);
      fmt::print("{}", report.table());
      if (!report.all_passed()) {
        fmt::print("replay file: {}/replay.txt\n", config.output_dir);
        return 1;
      }
      return 0;
    }
  } catch (const abe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
