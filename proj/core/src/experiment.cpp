#include "abe/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "abe/kernel.hpp"
#include "abe/profile.hpp"

namespace abe {

namespace {

// ---------------------------------------------------------------------------
// Value parsing

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view accepted) {
  throw ConfigError(fmt::format("config key '{}': invalid value '{}' (accepted: {})", key, value,
                                accepted));
}

double parse_real(std::string_view key, const std::string& value, std::string_view accepted) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE ||
      !std::isfinite(x)) {
    bad_value(key, value, accepted);
  }
  return x;
}

long long parse_integer(std::string_view key, const std::string& value,
                        std::string_view accepted) {
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE) {
    bad_value(key, value, accepted);
  }
  return x;
}

std::vector<double> parse_list(std::string_view key, const std::string& value,
                               std::string_view accepted) {
  std::vector<double> out;
  if (trim(value).empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item), accepted));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_real(xs[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Key registry

struct KeyHandler {
  ConfigKey key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Member>
KeyHandler real_key(std::string_view name, std::string_view accepted, Member member) {
  return {{name, accepted},
          [=](ExperimentConfig& c, const std::string& v) {
            std::invoke(member, c) = parse_real(name, v, accepted);
          },
          [=](const ExperimentConfig& c) {
            return format_real(std::invoke(member, const_cast<ExperimentConfig&>(c)));
          }};
}

template <typename Member>
KeyHandler string_key(std::string_view name, std::string_view accepted, Member member) {
  return {{name, accepted},
          [=](ExperimentConfig& c, const std::string& v) { std::invoke(member, c) = v; },
          [=](const ExperimentConfig& c) {
            return std::invoke(member, const_cast<ExperimentConfig&>(c));
          }};
}

template <typename Member>
KeyHandler list_key(std::string_view name, std::string_view accepted, Member member) {
  return {{name, accepted},
          [=](ExperimentConfig& c, const std::string& v) {
            std::invoke(member, c) = parse_list(name, v, accepted);
          },
          [=](const ExperimentConfig& c) {
            return join(std::invoke(member, const_cast<ExperimentConfig&>(c)));
          }};
}

template <typename Member>
KeyHandler int_key(std::string_view name, std::string_view accepted, Member member) {
  return {{name, accepted},
          [=](ExperimentConfig& c, const std::string& v) {
            using T = std::remove_reference_t<decltype(std::invoke(member, c))>;
            const long long x = parse_integer(name, v, accepted);
            if (x < 0 && std::is_unsigned_v<T>) bad_value(name, v, accepted);
            std::invoke(member, c) = static_cast<T>(x);
          },
          [=](const ExperimentConfig& c) {
            return std::to_string(std::invoke(member, const_cast<ExperimentConfig&>(c)));
          }};
}

std::string_view initial_name(InitialKind k) {
  switch (k) {
    case InitialKind::kPaper4: return "paper4";
    case InitialKind::kGaussian: return "gaussian";
    case InitialKind::kBoxPair: return "boxpair";
    case InitialKind::kFromFile: return "file";
  }
  return "paper4";
}

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> table = [] {
    std::vector<KeyHandler> t;
    t.push_back(real_key("nu", "real >= 0, nu + c > 0",
                         [](ExperimentConfig& c) -> double& { return c.physical.nu; }));
    t.push_back(real_key("c", "real >= 0, nu + c > 0",
                         [](ExperimentConfig& c) -> double& { return c.physical.c; }));
    t.push_back(real_key("theta", "real > 0",
                         [](ExperimentConfig& c) -> double& { return c.physical.theta; }));
    t.push_back(real_key("dx", "real > 0 dividing x_right - x_left", &ExperimentConfig::dx));
    t.push_back(real_key("x_left", "real < x_right", &ExperimentConfig::x_left));
    t.push_back(real_key("x_right", "real > x_left", &ExperimentConfig::x_right));
    t.push_back(string_key("flux", "eo | mlf", &ExperimentConfig::flux));
    t.push_back(string_key("corrector_mode", "paper | naive", &ExperimentConfig::corrector_mode));
    t.push_back(real_key("tail_tol", "real in (0, 1)", &ExperimentConfig::tail_tol));
    t.push_back(real_key("safety", "real in (0, 1]", &ExperimentConfig::safety));
    t.push_back(real_key("dt_max", "real > 0", &ExperimentConfig::dt_max));
    t.push_back(string_key("dt_policy", "adaptive | fixed", &ExperimentConfig::dt_policy));
    t.push_back(real_key("fixed_dt", "real > 0", &ExperimentConfig::fixed_dt));
    t.push_back(real_key("t_end", "real >= 0", &ExperimentConfig::t_end));
    t.push_back(list_key("snapshot_times", "increasing comma list in (0, t_end]",
                         &ExperimentConfig::snapshot_times));
    t.push_back({{"initial_data", "paper4 | gaussian | boxpair | file"},
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v == "paper4") c.initial_data = InitialKind::kPaper4;
                   else if (v == "gaussian") c.initial_data = InitialKind::kGaussian;
                   else if (v == "boxpair") c.initial_data = InitialKind::kBoxPair;
                   else if (v == "file") c.initial_data = InitialKind::kFromFile;
                   else bad_value("initial_data", v, "paper4 | gaussian | boxpair | file");
                 },
                 [](const ExperimentConfig& c) { return std::string(initial_name(c.initial_data)); }});
    t.push_back(real_key("gaussian_mass", "real", &ExperimentConfig::gaussian_mass));
    t.push_back(real_key("gaussian_width", "real > 0", &ExperimentConfig::gaussian_width));
    t.push_back(real_key("gaussian_center", "real", &ExperimentConfig::gaussian_center));
    t.push_back({{"boxpair", "six reals left1,right1,height1,left2,right2,height2 (left < right)"},
                 [](ExperimentConfig& c, const std::string& v) {
                   const auto xs = parse_list("boxpair", v, "six reals");
                   if (xs.size() != 6) bad_value("boxpair", v, "six comma-separated reals");
                   c.boxpair = {xs[0], xs[1], xs[2], xs[3], xs[4], xs[5]};
                 },
                 [](const ExperimentConfig& c) {
                   const auto& b = c.boxpair;
                   return join({b.left1, b.right1, b.height1, b.left2, b.right2, b.height2});
                 }});
    t.push_back(string_key("initial_file", "path to an x,u CSV (initial_data = file)",
                           &ExperimentConfig::initial_file));
    t.push_back(int_key("seed", "unsigned integer", &ExperimentConfig::seed));
    t.push_back(string_key("output_dir", "non-empty path", &ExperimentConfig::output_dir));
    t.push_back(int_key("report_stride", "integer >= 1", &ExperimentConfig::report_stride));
    t.push_back({{"profile_viscosity", "discrete (nu + c f2) | continuous (nu + c)"},
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v == "discrete") c.profile_viscosity = ProfileViscosity::kDiscrete;
                   else if (v == "continuous") c.profile_viscosity = ProfileViscosity::kContinuous;
                   else bad_value("profile_viscosity", v, "discrete | continuous");
                 },
                 [](const ExperimentConfig& c) {
                   return std::string(c.profile_viscosity == ProfileViscosity::kDiscrete
                                          ? "discrete"
                                          : "continuous");
                 }});
    t.push_back(real_key("rates_t_min", "real > 0", &ExperimentConfig::rates_t_min));
    t.push_back(real_key("rates_t_max", "real > rates_t_min", &ExperimentConfig::rates_t_max));
    t.push_back(int_key("rates_points_per_decade", "integer >= 1",
                        &ExperimentConfig::rates_points_per_decade));
    t.push_back(real_key("nwave_nu", "real >= 0", &ExperimentConfig::nwave_nu));
    t.push_back(real_key("nwave_c", "real >= 0, nwave_nu + nwave_c > 0",
                         &ExperimentConfig::nwave_c));
    t.push_back(real_key("nwave_t_end", "real > 0", &ExperimentConfig::nwave_t_end));
    t.push_back(list_key("selfconv_dx", "at least two reals, each half (or equal to) the previous",
                         &ExperimentConfig::selfconv_dx));
    t.push_back(real_key("selfconv_t", "real > 0", &ExperimentConfig::selfconv_t));
    t.push_back(int_key("check_cases", "integer >= 1", &ExperimentConfig::check_cases));
    t.push_back(int_key("check_solver_cases", "integer >= 1",
                        &ExperimentConfig::check_solver_cases));
    return t;
  }();
  return table;
}

const KeyHandler& handler_for(std::string_view key) {
  for (const auto& h : handlers()) {
    if (h.key.name == key) return h;
  }
  std::string known;
  for (const auto& h : handlers()) {
    if (!known.empty()) known += ", ";
    known += h.key.name;
  }
  throw ConfigError(fmt::format("unknown config key '{}' (known keys: {})", key, known));
}

[[noreturn]] void out_of_range(std::string_view key) {
  throw ConfigError(fmt::format("config key '{}' out of range (accepted: {})", key,
                                handler_for(key).key.accepted));
}

// ---------------------------------------------------------------------------
// Output helpers

std::filesystem::path prepare_output(const ExperimentConfig& config) {
  std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output_dir '" + config.output_dir +
                             "': " + ec.message());
  }
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void append_snapshot_rows(std::string& out, const Snapshot& snap, std::string_view prefix = {}) {
  const Grid& g = snap.u.grid();
  for (std::size_t j = 0; j < snap.u.size(); ++j) {
    if (!prefix.empty()) {
      out += prefix;
      out += ',';
    }
    out += format_real(snap.t);
    out += ',';
    out += format_real(g.center(j));
    out += ',';
    out += format_real(snap.u[j]);
    out += '\n';
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config key 'initial_file': cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string input_hash(const ExperimentConfig& config) {
  std::string content = to_text(config);
  if (config.initial_data == InitialKind::kFromFile) content += read_file(config.initial_file);
  return git_blob_hash(content);
}

/// Manifest: the canonical config, then derived values of each run.
std::string manifest_text(const ExperimentConfig& config,
                          const std::vector<std::pair<std::string, const Manifest*>>& runs) {
  std::string out = "# configuration\n" + to_text(config);
  out += "input_hash = " + input_hash(config) + "\n";
  for (const auto& [name, manifest] : runs) {
    out += "# derived: " + name + "\n";
    for (const auto& [k, v] : manifest->entries()) out += name + "." + k + " = " + v + "\n";
  }
  return out;
}

/// Round trip through the canonical text so every output is produced from
/// exactly what the manifest records.
ExperimentConfig canonical(const ExperimentConfig& config) {
  validate(config);
  return parse_config(to_text(config));
}

RunRecord run_variant(const ExperimentConfig& config, FluxKind flux, CorrectorMode mode,
                      const RunOptions& options) {
  const SchemeConfig scheme = make_scheme(config, flux, mode);
  const GridFunction u0 = project_initial(make_initial(config), scheme.grid());
  return run(u0, config.physical, scheme, options);
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& h : handlers()) k.push_back(h.key);
    return k;
  }();
  return keys;
}

ExperimentConfig parse_config(std::string_view text,
                              const std::map<std::string, std::string>& overrides) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    handler_for(key).set(config, value);
  }
  for (const auto& [key, value] : overrides) handler_for(key).set(config, trim(value));
  validate(config);
  return config;
}

void validate(const ExperimentConfig& c) {
  const auto& p = c.physical;
  if (p.nu < 0.0) out_of_range("nu");
  if (p.c < 0.0) out_of_range("c");
  if (!(p.nu + p.c > 0.0)) out_of_range("nu");
  if (!(p.theta > 0.0)) out_of_range("theta");
  if (!(c.dx > 0.0)) out_of_range("dx");
  if (!(c.x_left < c.x_right)) out_of_range("x_left");
  try {
    Grid::Uniform(c.x_left, c.x_right, c.dx);
  } catch (const std::invalid_argument&) {
    out_of_range("dx");
  }
  if (c.flux != "eo" && c.flux != "mlf") out_of_range("flux");
  if (c.corrector_mode != "paper" && c.corrector_mode != "naive") out_of_range("corrector_mode");
  if (!(c.tail_tol > 0.0 && c.tail_tol < 1.0)) out_of_range("tail_tol");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) out_of_range("safety");
  if (!(c.dt_max > 0.0)) out_of_range("dt_max");
  if (c.dt_policy != "adaptive" && c.dt_policy != "fixed") out_of_range("dt_policy");
  if (!(c.fixed_dt > 0.0)) out_of_range("fixed_dt");
  if (!(c.t_end >= 0.0)) out_of_range("t_end");
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
    const double s = c.snapshot_times[i];
    if (!(s > 0.0 && s <= c.t_end)) out_of_range("snapshot_times");
    if (i > 0 && !(s > c.snapshot_times[i - 1])) out_of_range("snapshot_times");
  }
  if (!(c.gaussian_width > 0.0)) out_of_range("gaussian_width");
  if (!(c.boxpair.left1 < c.boxpair.right1) || !(c.boxpair.left2 < c.boxpair.right2)) {
    out_of_range("boxpair");
  }
  if (c.initial_data == InitialKind::kFromFile && c.initial_file.empty()) {
    out_of_range("initial_file");
  }
  if (c.output_dir.empty()) out_of_range("output_dir");
  if (c.report_stride < 1) out_of_range("report_stride");
  if (!(c.rates_t_min > 0.0)) out_of_range("rates_t_min");
  if (!(c.rates_t_max > c.rates_t_min)) out_of_range("rates_t_max");
  if (c.rates_points_per_decade < 1) out_of_range("rates_points_per_decade");
  if (c.nwave_nu < 0.0) out_of_range("nwave_nu");
  if (c.nwave_c < 0.0 || !(c.nwave_nu + c.nwave_c > 0.0)) out_of_range("nwave_c");
  if (!(c.nwave_t_end > 0.0)) out_of_range("nwave_t_end");
  if (c.selfconv_dx.size() < 2) out_of_range("selfconv_dx");
  for (std::size_t i = 0; i < c.selfconv_dx.size(); ++i) {
    if (!(c.selfconv_dx[i] > 0.0)) out_of_range("selfconv_dx");
    if (i > 0) {
      const double r = c.selfconv_dx[i - 1] / c.selfconv_dx[i];
      if (std::abs(r - 2.0) > 1e-12 && std::abs(r - 1.0) > 1e-12) out_of_range("selfconv_dx");
    }
  }
  if (!(c.selfconv_t > 0.0)) out_of_range("selfconv_t");
  if (c.check_cases < 1) out_of_range("check_cases");
  if (c.check_solver_cases < 1) out_of_range("check_solver_cases");
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& h : handlers()) {
    out += h.key.name;
    out += " = ";
    out += h.get(config);
    out += '\n';
  }
  return out;
}

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("git_blob_hash: SHA-1 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

InitialProfile make_initial(const ExperimentConfig& config) {
  switch (config.initial_data) {
    case InitialKind::kPaper4: {
      constexpr double pi = std::numbers::pi;
      return {[](double x) {
                if (x >= -pi && x <= 0.0) return -0.1 * std::sin(0.5 * x);
                if (x > 0.0 && x <= 0.5 * pi) return -0.05 * std::sin(2.0 * x);
                return 0.0;
              },
              {-pi, 0.0, 0.5 * pi}};
    }
    case InitialKind::kGaussian: {
      const double m = config.gaussian_mass;
      const double w = config.gaussian_width;
      const double x0 = config.gaussian_center;
      return {[=](double x) {
                const double z = (x - x0) / w;
                return m * std::exp(-0.5 * z * z) / (w * std::sqrt(2.0 * std::numbers::pi));
              },
              {}};
    }
    case InitialKind::kBoxPair: {
      const BoxPair b = config.boxpair;
      return {[=](double x) {
                double v = 0.0;
                if (x >= b.left1 && x <= b.right1) v += b.height1;
                if (x >= b.left2 && x <= b.right2) v += b.height2;
                return v;
              },
              {b.left1, b.right1, b.left2, b.right2}};
    }
    case InitialKind::kFromFile: {
      // Rows "x,u" (an optional header line is skipped); linear interpolation
      // between samples, zero outside.
      std::istringstream in(read_file(config.initial_file));
      std::vector<std::pair<double, double>> pts;
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        const auto comma = s.find(',');
        if (comma == std::string::npos) {
          throw ConfigError(fmt::format("initial_file line {}: expected 'x,u'", line_no));
        }
        char* end = nullptr;
        const std::string xs = trim(std::string_view(s).substr(0, comma));
        const std::string us = trim(std::string_view(s).substr(comma + 1));
        const double x = std::strtod(xs.c_str(), &end);
        if (end != xs.c_str() + xs.size() || xs.empty()) {
          if (pts.empty()) continue;  // header
          throw ConfigError(fmt::format("initial_file line {}: bad x '{}'", line_no, xs));
        }
        const double u = std::strtod(us.c_str(), &end);
        if (end != us.c_str() + us.size() || us.empty() || !std::isfinite(u)) {
          throw ConfigError(fmt::format("initial_file line {}: bad u '{}'", line_no, us));
        }
        if (!pts.empty() && !(x > pts.back().first)) {
          throw ConfigError(fmt::format("initial_file line {}: x must increase", line_no));
        }
        pts.emplace_back(x, u);
      }
      if (pts.size() < 2) throw ConfigError("initial_file: need at least two samples");
      std::vector<double> breaks;
      for (const auto& pt : pts) breaks.push_back(pt.first);
      return {[pts](double x) {
                if (x < pts.front().first || x > pts.back().first) return 0.0;
                auto it = std::lower_bound(pts.begin(), pts.end(), x,
                                           [](const auto& p, double v) { return p.first < v; });
                if (it == pts.begin()) return it->second;
                const auto& [x1, u1] = *it;
                const auto& [x0, u0] = *(it - 1);
                return u0 + (u1 - u0) * (x - x0) / (x1 - x0);
              },
              breaks};
    }
  }
  throw ConfigError("config key 'initial_data': unsupported kind");
}

Grid make_grid(const ExperimentConfig& config) {
  return Grid::Uniform(config.x_left, config.x_right, config.dx);
}

SchemeConfig make_scheme(const ExperimentConfig& config, FluxKind flux, CorrectorMode mode) {
  const auto n = choose_n(config.dx, config.physical.theta, config.tail_tol);
  return SchemeConfig(flux, KernelQuadrature::Build(config.dx, config.physical.theta, n), mode,
                      make_grid(config));
}

RunOptions make_run_options(const ExperimentConfig& config) {
  RunOptions o;
  o.t_end = config.t_end;
  o.snapshot_times = config.snapshot_times;
  o.safety = config.safety;
  o.dt_max = config.dt_max;
  if (config.dt_policy == "fixed") o.fixed_dt = config.fixed_dt;
  o.report_stride = config.report_stride;
  return o;
}

double profile_viscosity(const ExperimentConfig& config, const KernelQuadrature& q) {
  const auto& p = config.physical;
  return config.profile_viscosity == ProfileViscosity::kDiscrete ? p.nu + p.c * q.f2()
                                                                 : p.nu + p.c;
}

std::vector<double> log_time_grid(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0.0 && t_max > t_min && per_decade >= 1)) {
    throw std::invalid_argument("log_time_grid: need 0 < t_min < t_max and per_decade >= 1");
  }
  std::vector<double> out;
  const double decades = std::log10(t_max / t_min);
  const auto steps = static_cast<int>(std::floor(decades * per_decade + 1e-9));
  for (int k = 0; k <= steps; ++k) {
    out.push_back(t_min * std::pow(10.0, static_cast<double>(k) / per_decade));
  }
  if (std::abs(out.back() - t_max) <= 1e-9 * t_max) {
    out.back() = t_max;
  } else {
    out.push_back(t_max);
  }
  return out;
}

RunOutput cmd_run(const ExperimentConfig& input) {
  const ExperimentConfig config = canonical(input);
  const auto dir = prepare_output(config);
  RunRecord record = run_variant(config, flux_from_name(config.flux),
                                 corrector_from_name(config.corrector_mode),
                                 make_run_options(config));

  std::string snapshots = "t,x,u\n";
  for (const auto& snap : record.snapshots) append_snapshot_rows(snapshots, snap);
  write_file(dir / "snapshots.csv", snapshots);

  std::string norms = "t,l1,l2,linf,mass\n";
  const auto& u0 = record.snapshots.front().u;
  norms += fmt::format("{},{},{},{},{}\n", format_real(0.0), format_real(norm(u0, NormKind::L1())),
                       format_real(norm(u0, NormKind::L2())), format_real(max_abs(u0.values())),
                       format_real(mass(u0)));
  for (const auto& r : record.step_reports) {
    norms += fmt::format("{},{},{},{},{}\n", format_real(r.t), format_real(r.l1),
                         format_real(r.l2), format_real(r.linf), format_real(r.mass_after));
  }
  write_file(dir / "norms.csv", norms);

  record.manifest.set("initial_mass", mass(u0));
  write_file(dir / "manifest.txt", manifest_text(config, {{"run", &record.manifest}}));
  return {std::move(record), dir};
}

RatesOutput cmd_rates(const ExperimentConfig& input) {
  const ExperimentConfig config = canonical(input);
  const auto dir = prepare_output(config);

  RunOptions options = make_run_options(config);
  options.t_end = config.rates_t_max;
  options.snapshot_times =
      log_time_grid(config.rates_t_min, config.rates_t_max, config.rates_points_per_decade);
  // Decay checks only need the snapshots; step reports are thinned.
  options.report_stride = std::max<std::size_t>(config.report_stride, 100);

  const SchemeConfig reference = make_scheme(config, EngquistOsher{}, CorrectorMode::kPaper);
  const double m = mass(project_initial(make_initial(config), reference.grid()));
  AsymptoticProfile profile(m, profile_viscosity(config, reference.quadrature()));

  struct Variant {
    std::string name;
    FluxKind flux;
    CorrectorMode mode;
  };
  const std::vector<Variant> variants = {
      {"eo_paper", EngquistOsher{}, CorrectorMode::kPaper},
      {"mlf_paper", ModifiedLaxFriedrichs{}, CorrectorMode::kPaper},
      {"eo_naive", EngquistOsher{}, CorrectorMode::kNaive},
  };
  const std::vector<std::pair<std::string, NormKind>> norms = {
      {"1", NormKind::L1()}, {"2", NormKind::L2()}, {"inf", NormKind::Infinity()}};

  RatesOutput out{{}, profile};
  for (const auto& v : variants) {
    VariantSeries series{v.name, {}, run_variant(config, v.flux, v.mode, options)};
    // The initial snapshot is not part of the logarithmic grid.
    RunRecord later;
    later.snapshots.assign(series.record.snapshots.begin() + 1, series.record.snapshots.end());
    for (const auto& [label, p] : norms) {
      series.by_norm.push_back(scaled_profile_error(later, profile, p));
    }
    out.variants.push_back(std::move(series));
  }

  std::string rates = "t,variant,p,scaled_error\n";
  const std::size_t n_times = out.variants.front().by_norm.front().entries.size();
  for (std::size_t k = 0; k < n_times; ++k) {
    for (const auto& v : out.variants) {
      for (std::size_t i = 0; i < norms.size(); ++i) {
        const auto& e = v.by_norm[i].entries[k];
        rates += fmt::format("{},{},{},{}\n", format_real(e.t), v.variant, norms[i].first,
                             format_real(e.scaled_error));
      }
    }
  }
  write_file(dir / "rates.csv", rates);

  std::string finals = "variant,t,x,u\n";
  for (const auto& v : out.variants) append_snapshot_rows(finals, v.record.snapshots.back(), v.variant);
  write_file(dir / "final.csv", finals);

  std::string prof = "t,x,u\n";
  const double t_last = out.variants.front().record.snapshots.back().t;
  append_snapshot_rows(prof, {t_last, sample_on_grid(profile, reference.grid(), t_last)});
  write_file(dir / "profile.csv", prof);

  Manifest derived;
  derived.set("profile_mass", profile.mass());
  derived.set("profile_viscosity", profile.viscosity());
  derived.set("profile_c_m", profile.c_m());
  std::vector<std::pair<std::string, const Manifest*>> runs = {{"profile", &derived}};
  for (const auto& v : out.variants) runs.emplace_back(v.variant, &v.record.manifest);
  write_file(dir / "manifest.txt", manifest_text(config, runs));
  return out;
}

NWaveOutput cmd_nwave(const ExperimentConfig& input) {
  ExperimentConfig config = canonical(input);
  config.physical.nu = config.nwave_nu;
  config.physical.c = config.nwave_c;
  const auto dir = prepare_output(config);

  RunOptions options = make_run_options(config);
  options.t_end = config.nwave_t_end;
  options.snapshot_times = {config.nwave_t_end};

  NWaveOutput out{run_variant(config, EngquistOsher{}, CorrectorMode::kPaper, options),
                  run_variant(config, ModifiedLaxFriedrichs{}, CorrectorMode::kPaper, options),
                  {}, {}};
  out.eo_diag = n_wave_diagnostic(out.eo.snapshots.back().u);
  out.mlf_diag = n_wave_diagnostic(out.mlf.snapshots.back().u);

  std::string finals = "variant,t,x,u\n";
  append_snapshot_rows(finals, out.eo.snapshots.back(), "eo");
  append_snapshot_rows(finals, out.mlf.snapshots.back(), "mlf");
  write_file(dir / "nwave_final.csv", finals);

  std::string diag = "variant,t,min,max,positive_mass,negative_mass,mass\n";
  auto row = [&](std::string_view name, const RunRecord& rec, const NWaveDiagnostic& d) {
    diag += fmt::format("{},{},{},{},{},{},{}\n", name, format_real(rec.snapshots.back().t),
                        format_real(d.min), format_real(d.max), format_real(d.positive_mass),
                        format_real(d.negative_mass), format_real(mass(rec.snapshots.back().u)));
  };
  row("eo", out.eo, out.eo_diag);
  row("mlf", out.mlf, out.mlf_diag);
  write_file(dir / "nwave_diagnostics.csv", diag);
  write_file(dir / "manifest.txt",
             manifest_text(config, {{"eo", &out.eo.manifest}, {"mlf", &out.mlf.manifest}}));
  return out;
}

std::vector<ConvergenceEntry> cmd_selfconv(const ExperimentConfig& input) {
  const ExperimentConfig config = canonical(input);
  const auto dir = prepare_output(config);
  SelfConvergenceSetup setup;
  setup.initial = make_initial(config);
  setup.params = config.physical;
  setup.x_left = config.x_left;
  setup.x_right = config.x_right;
  setup.flux = flux_from_name(config.flux);
  setup.corrector = corrector_from_name(config.corrector_mode);
  setup.tail_tol = config.tail_tol;
  setup.safety = config.safety;
  setup.dt_max = config.dt_max;
  auto entries = self_convergence(setup, config.selfconv_dx, config.selfconv_t);

  std::string csv = "dx_coarse,dx_fine,l1_difference\n";
  for (const auto& e : entries) {
    csv += fmt::format("{},{},{}\n", format_real(e.dx_coarse), format_real(e.dx_fine),
                       format_real(e.l1_difference));
  }
  write_file(dir / "selfconv.csv", csv);
  write_file(dir / "manifest.txt", manifest_text(config, {}));
  return entries;
}

AsymptoticProfile cmd_profile(const ExperimentConfig& input) {
  const ExperimentConfig config = canonical(input);
  const auto dir = prepare_output(config);
  const SchemeConfig scheme = make_scheme(config, EngquistOsher{}, CorrectorMode::kPaper);
  const double m = mass(project_initial(make_initial(config), scheme.grid()));
  AsymptoticProfile profile(m, profile_viscosity(config, scheme.quadrature()));

  std::string csv = "t,x,u\n";
  for (double t : config.snapshot_times) {
    append_snapshot_rows(csv, {t, sample_on_grid(profile, scheme.grid(), t)});
  }
  write_file(dir / "profile.csv", csv);

  Manifest derived;
  derived.set("mass", profile.mass());
  derived.set("viscosity", profile.viscosity());
  derived.set("scaled_mass", profile.scaled_mass());
  derived.set("c_m", profile.c_m());
  derived.set("f2", scheme.quadrature().f2());
  write_file(dir / "manifest.txt", manifest_text(config, {{"profile", &derived}}));
  return profile;
}

}  // namespace abe
