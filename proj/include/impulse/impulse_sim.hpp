#pragma once

// Segment-by-segment construction of the impulsive process: diffuse from
// q(tau_{k-1}) until the trigger curve s is hit at tau_k, record the pulse,
// reset to q(tau_k) and continue on the same noise stream.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "impulse/model.hpp"
#include "impulse/path_engine.hpp"

namespace impulse {

struct PulseRecord {
  std::size_t k = 0;
  double tau_k = 0.0;
  double delta_tau_k = 0.0;
  double reset_value = 0.0;  ///< q(tau_k)
};

struct PathOutcome {
  std::size_t path_index = 0;
  std::vector<PulseRecord> pulses;
  /// Set to t_max when the horizon (or an absorbing clamp) ended the path before max_pulses.
  std::optional<double> censor_time;
  std::size_t clamp_events = 0;
  /// Segment k+1 covers ]tau_k, tau_{k+1}]; empty unless trajectories were requested.
  std::vector<SegmentTrace> segments;
  /// Total Brownian increments drawn for this path.
  std::uint64_t increments_used = 0;
};

struct PathOptions {
  bool keep_trajectory = false;
  /// Also trace the linear comparison paths, restarted at every reset.
  bool comparison_paths = false;
};

PathOutcome run_impulsive_path(const ValidatedScenario& scn, const GridConfig& grid, std::size_t path_index,
                               PathOptions options = {});

/// Value of the piecewise solution at time t: the segment whose interval
/// ]tau_{k-1}, tau_k] contains t, nearest stored node within it.
/// Throws RangeError for t <= 0, t past the simulated range, or a path without trajectories.
double global_solution_lookup(const PathOutcome& outcome, double t, double dt);

struct RecurrenceResidual {
  std::size_t k = 0;
  std::size_t paths = 0;  ///< paths with at least k pulses
  /// mean(tau_k) - mean(tau_{k-1}) - mean(delta_tau_k), all over the paths with >= k pulses.
  std::optional<double> same_subset;
  /// Same expression with mean(tau_{k-1}) over its own subset; undefined when the subsets differ.
  std::optional<double> mixed_subset;
  double scale = 0.0;  ///< mean(tau_k), for relative comparisons
};

std::vector<RecurrenceResidual> recurrence_check(std::span<const PathOutcome> outcomes);

}  // namespace impulse
