#include "impulse/impulse_sim.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "impulse/errors.hpp"

namespace impulse {

PathOutcome run_impulsive_path(const ValidatedScenario& validated, const GridConfig& grid, std::size_t path_index,
                               PathOptions options) {
  const Scenario& scn = validated.scenario();
  NoiseStream noise(scn.seed, path_index);
  PathOutcome out;
  out.path_index = path_index;

  std::size_t node = 0;
  double x = scn.x0();
  double tau_prev = 0.0;
  SegmentTrace scratch;

  while (out.pulses.size() < scn.max_pulses) {
    if (!(x < scn.curves.upper(grid.time(node)))) {
      // The reset landed on or above the trigger at the reset node (only
      // possible for steep moving curves): the pulse fires at the next node.
      if (node + 1 > grid.last_node()) {
        out.censor_time = grid.t_max();
        break;
      }
      ++node;
      const double tau = grid.time(node);
      const double reset = scn.curves.lower(tau);
      out.pulses.push_back({out.pulses.size() + 1, tau, tau - tau_prev, reset});
      if (options.keep_trajectory) {
        SegmentTrace jump;
        jump.first_node = node;
        jump.x.push_back(scn.curves.upper(tau));
        out.segments.push_back(std::move(jump));
      }
      tau_prev = tau;
      x = reset;
      continue;
    }

    SegmentOptions seg_opts;
    if (options.keep_trajectory) {
      seg_opts.trace = &scratch;
      if (options.comparison_paths) seg_opts.comparison = &scn.sector;
    }
    const SegmentResult seg = run_to_crossing(node, x, scn.curves, scn.drift, scn.sigma, grid, noise, seg_opts);
    out.clamp_events += seg.clamp_events;
    if (options.keep_trajectory) out.segments.push_back(std::move(scratch));

    if (seg.event.censored) {
      out.censor_time = grid.t_max();
      break;
    }
    const double tau = seg.event.t_cross;
    const double reset = scn.curves.lower(tau);
    out.pulses.push_back({out.pulses.size() + 1, tau, tau - tau_prev, reset});
    tau_prev = tau;
    // Time stays on the global grid: the reset takes effect at the crossing node.
    node = seg.event.grid_index;
    x = reset;
  }
  out.increments_used = noise.cursor();
  return out;
}

double global_solution_lookup(const PathOutcome& outcome, double t, double dt) {
  if (outcome.segments.empty()) throw RangeError("path was simulated without trajectory samples");
  if (!(t > 0.0)) throw RangeError(fmt::format("t = {} outside ]0, end]: the solution is defined for t > 0", t));
  const double end = outcome.censor_time ? *outcome.censor_time
                                         : (outcome.pulses.empty() ? 0.0 : outcome.pulses.back().tau_k);
  if (t > end) throw RangeError(fmt::format("t = {} beyond the simulated range ]0, {}]", t, end));

  // Segment index j covers ]tau_j, tau_{j+1}] with tau_0 = 0.
  const auto it = std::lower_bound(outcome.pulses.begin(), outcome.pulses.end(), t,
                                   [](const PulseRecord& p, double v) { return p.tau_k < v; });
  const auto j = static_cast<std::size_t>(it - outcome.pulses.begin());
  if (j >= outcome.segments.size()) throw RangeError(fmt::format("no stored segment covers t = {}", t));

  const SegmentTrace& seg = outcome.segments[j];
  const double first_t = dt * static_cast<double>(seg.first_node);
  const double offset = std::round((t - first_t) / dt);
  const auto idx = static_cast<std::size_t>(std::clamp(offset, 0.0, static_cast<double>(seg.x.size() - 1)));
  return seg.x[idx];
}

std::vector<RecurrenceResidual> recurrence_check(std::span<const PathOutcome> outcomes) {
  std::size_t k_max = 0;
  for (const auto& o : outcomes) k_max = std::max(k_max, o.pulses.size());

  std::vector<RecurrenceResidual> out;
  std::size_t prev_count = outcomes.size();
  double prev_mean_own = 0.0;  // mean(tau_{k-1}) over its own subset; tau_0 = 0
  for (std::size_t k = 1; k <= k_max; ++k) {
    RecurrenceResidual r;
    r.k = k;
    double sum_tau = 0.0, sum_prev = 0.0, sum_delta = 0.0;
    for (const auto& o : outcomes) {
      if (o.pulses.size() < k) continue;
      ++r.paths;
      sum_tau += o.pulses[k - 1].tau_k;
      sum_prev += k >= 2 ? o.pulses[k - 2].tau_k : 0.0;
      sum_delta += o.pulses[k - 1].delta_tau_k;
    }
    if (r.paths > 0) {
      const double n = static_cast<double>(r.paths);
      const double mean_tau = sum_tau / n;
      r.scale = mean_tau;
      r.same_subset = mean_tau - sum_prev / n - sum_delta / n;
      if (r.paths == prev_count) r.mixed_subset = mean_tau - prev_mean_own - sum_delta / n;
      prev_mean_own = mean_tau;
    }
    prev_count = r.paths;
    out.push_back(r);
  }
  return out;
}

}  // namespace impulse
