#pragma once

// Monte Carlo ensembles over independent impulsive paths and the statistics
// built on them: per-pulse means with normal confidence intervals,
// monotonicity of the timeout means, and the sandwich check on E[tau_1].

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "impulse/gbm_analytics.hpp"
#include "impulse/impulse_sim.hpp"

namespace impulse {

inline constexpr double kConfidenceZ = 1.959963984540054;  // two-sided 95%
inline constexpr double kUnreliableCensoring = 0.05;

struct MeanEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Sample mean with (n-1)-denominator standard error; std_err = 0 when n = 1.
/// Throws PreconditionError for an empty sample.
MeanEstimate estimate_mean(std::span<const double> sample);

/// Runs paths 0..n_paths-1. workers = 0 uses the hardware concurrency.
/// The result is indexed by path and independent of the worker count.
std::vector<PathOutcome> run_ensemble(const ValidatedScenario& scn, const GridConfig& grid, std::size_t n_paths,
                                      unsigned workers = 0, PathOptions options = {});

struct PulseLevelStats {
  std::size_t k = 0;
  MeanEstimate tau;
  MeanEstimate delta_tau;
  std::size_t at_risk = 0;          ///< paths with at least k-1 pulses
  std::size_t censored_before = 0;  ///< of those, censored before pulse k
  double censor_fraction = 0.0;
  bool reliable = true;  ///< censor_fraction <= 5%
};

struct PulseExpectations {
  std::size_t n_paths = 0;
  std::vector<PulseLevelStats> levels;  ///< k = 1, 2, ...
  std::size_t clamp_events = 0;
  std::size_t paths_without_pulse = 0;

  std::vector<MeanEstimate> timeout_means() const;
};

/// Index-ordered fold over the outcomes. Throws HorizonError if no path pulsed.
PulseExpectations summarize_pulses(std::span<const PathOutcome> outcomes);

/// Throws PreconditionError if n_paths < 2.
PulseExpectations estimate_pulse_expectations(const ValidatedScenario& scn, const GridConfig& grid,
                                              std::size_t n_paths, unsigned workers = 0);

enum class SeriesShape { decreasing, increasing, flat, inconclusive };

std::string to_string(SeriesShape shape);

struct TimeoutSeriesReport {
  std::vector<MeanEstimate> timeouts;
  SeriesShape shape = SeriesShape::inconclusive;
  std::optional<AsymptoticInterval> interval;
  double tail_mean = 0.0;
  double tail_std_err = 0.0;
  std::size_t tail_count = 0;
  /// Tail mean within [a_beta, a_alpha], widened by 3 tail standard errors plus the allowance.
  std::optional<bool> tail_inside;
};

/// Classification, in order of precedence:
///  flat        every pair of means within 3 pooled standard errors;
///  decreasing  every m_k - m_{k+1} > -2 se_pooled and m_1 - m_m > 2 sqrt(se_1^2 + se_m^2);
///  increasing  mirrored;
///  otherwise inconclusive (always for fewer than 3 estimates).
/// Tail mean: average of the last max(2, m/4) means.
TimeoutSeriesReport classify_timeout_series(std::span<const MeanEstimate> timeouts,
                                            std::optional<AsymptoticInterval> interval, double allowance = 0.0);

enum class SandwichVerdict { inside, below, above };

std::string to_string(SandwichVerdict verdict);

struct SandwichReport {
  TauBounds bounds;
  MeanEstimate tau1;
  SandwichVerdict verdict = SandwichVerdict::inside;
  /// Distance in standard errors: to the nearer bound when inside (>= -3),
  /// past the violated bound otherwise.
  double margin_se = 0.0;
  /// The trigger curve is not constant, so the frozen-level bounds are indicative only.
  bool advisory = false;
};

/// inside iff lower - 3 se <= mean <= upper + 3 se.
SandwichReport sandwich_verdict(const MeanEstimate& tau1, const TauBounds& bounds, bool advisory);

SandwichReport sandwich_check(const ValidatedScenario& scn, const GridConfig& grid, std::size_t n_paths,
                              unsigned workers = 0);

/// Bounds for tau_1 from q(0) to s(0) with the scenario's sector.
TauBounds first_pulse_bounds(const Scenario& scn);

}  // namespace impulse
