#ifndef ABE_RUN_RECORD_HPP_
#define ABE_RUN_RECORD_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "abe/grid.hpp"

namespace abe {

/// Ordered key/value list describing every tunable that produced a run.
class Manifest {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  std::optional<std::string> get(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

  /// "key = value" lines in insertion order.
  std::string to_text() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct Snapshot {
  double t;
  GridFunction u;
};

struct StepReport {
  double t = 0.0;  // time after the step
  double dt_used = 0.0;
  double mass_after = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

enum class RunStatus { kCompleted, kAborted };

struct RunRecord {
  std::vector<Snapshot> snapshots;
  Manifest manifest;
  std::vector<StepReport> step_reports;
  RunStatus status = RunStatus::kCompleted;
  std::string abort_reason;
  std::size_t steps_taken = 0;
  /// First time at which the outermost cells carried non-negligible mass.
  std::optional<double> boundary_warning_time;
};

/// Formats a double with 17 significant digits.
std::string format_real(double x);

}  // namespace abe

#endif  // ABE_RUN_RECORD_HPP_
