#ifndef ABE_ANALYSIS_HPP_
#define ABE_ANALYSIS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "abe/grid.hpp"
#include "abe/profile.hpp"
#include "abe/run_record.hpp"
#include "abe/scheme.hpp"

namespace abe {

struct RateEntry {
  double t;
  double scaled_error;
};

/// t^{(1/2)(1-1/p)} ||u(t) - u_M(t)||_p along a run.
struct RateSeries {
  NormKind p;
  std::vector<RateEntry> entries;
};

/// Snapshots with t <= 0 are skipped (a warning goes to stderr).
RateSeries scaled_profile_error(const RunRecord& record, const AsymptoticProfile& profile,
                                NormKind p);

struct DecayEntry {
  double t;
  double value;        // ||u(t)||_p, or the scaled gradient norm
  double bound_ratio;  // value * t^{rate} / ||u_0||_1
};

/// ||u(t)||_p and ||u(t)||_p t^{(1/2)(1-1/p)} / ||u_0||_1 per snapshot. The
/// first snapshot is taken as u_0.
std::vector<DecayEntry> decay_monitor(const RunRecord& record, NormKind p);

/// ||d+ u(t)||_p and ||d+ u(t)||_p t^{(1/2)(1-1/p) + 1/2} / ||u_0||_1.
std::vector<DecayEntry> grad_decay_monitor(const RunRecord& record, NormKind p);

/// Boundedness test used for the decay monitors: over entries with
/// t in [t_min, t_max], max(bound_ratio) <= factor * median(bound_ratio).
bool is_bounded(std::span<const DecayEntry> series, double t_min, double t_max,
                double factor = 10.0);

/// Averages pairs of fine cells onto the mesh with twice the spacing.
GridFunction restrict_pairs(const GridFunction& fine);

struct SelfConvergenceSetup {
  InitialProfile initial;
  PhysicalParams params;
  double x_left = -60.0;
  double x_right = 60.0;
  FluxKind flux = EngquistOsher{};
  CorrectorMode corrector = CorrectorMode::kPaper;
  double tail_tol = 1e-8;
  double safety = 0.9;
  double dt_max = 0.5;
};

struct ConvergenceEntry {
  double dx_coarse;
  double dx_fine;
  double l1_difference;
};

/// Runs every resolution to t_check and reports the L1 distance between each
/// solution and the next finer one restricted to its mesh. Consecutive dx must
/// either halve or repeat.
std::vector<ConvergenceEntry> self_convergence(const SelfConvergenceSetup& setup,
                                               std::span<const double> dx_list, double t_check);

struct NWaveDiagnostic {
  double min;
  double max;
  double positive_mass;
  double negative_mass;
};

NWaveDiagnostic n_wave_diagnostic(const GridFunction& w);

struct InequalityCheck {
  bool holds;
  double lhs;
  double rhs;
};

/// Discrete Gagliardo-Nirenberg inequality
///   ||w||_p^{p(p+1)/(p-1)} <= 4 ||w||_1^{2p/(p-1)} ||d+ |w|^{p/2}||_2^2,
/// with the difference taken over the zero-extended sequence.
InequalityCheck gns_inequality_check(const GridFunction& w, double p);

/// |sum_{k<=n} a^k (b^k - 1) + (sum_{k<=n} k a^k)(1/b - 1)| <= |b-1|^2 a/(1-a)^3,
/// with b = exp(i phi).
InequalityCheck series_lemma_check(double a, double phi, int n);

}  // namespace abe

#endif  // ABE_ANALYSIS_HPP_
