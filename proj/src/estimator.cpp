#include "impulse/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/core.h>

#include "impulse/errors.hpp"

namespace impulse {

MeanEstimate estimate_mean(std::span<const double> sample) {
  if (sample.empty()) throw PreconditionError("mean of an empty sample");
  MeanEstimate est;
  est.n = sample.size();
  const double n = static_cast<double>(est.n);
  // Shifted by the first value: a constant sample gives exactly zero spread.
  const double shift = sample.front();
  double sum = 0.0;
  for (double v : sample) sum += v - shift;
  const double mean_d = sum / n;
  est.mean = shift + mean_d;
  if (est.n > 1) {
    double ss = 0.0;
    for (double v : sample) ss += (v - shift - mean_d) * (v - shift - mean_d);
    est.std_err = std::sqrt(ss / (n - 1.0) / n);
  }
  est.ci_low = est.mean - kConfidenceZ * est.std_err;
  est.ci_high = est.mean + kConfidenceZ * est.std_err;
  return est;
}

std::vector<PathOutcome> run_ensemble(const ValidatedScenario& scn, const GridConfig& grid, std::size_t n_paths,
                                      unsigned workers, PathOptions options) {
  std::vector<PathOutcome> outcomes(n_paths);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_paths, 1)));

  // Each slot is written by exactly one worker; the paths are independent
  // functions of their index, so the schedule cannot affect the result.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n_paths; i = next++)
      outcomes[i] = run_impulsive_path(scn, grid, i, options);
  };
  if (workers <= 1) {
    work();
    return outcomes;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  return outcomes;
}

std::vector<MeanEstimate> PulseExpectations::timeout_means() const {
  std::vector<MeanEstimate> out;
  out.reserve(levels.size());
  for (const auto& lv : levels) out.push_back(lv.delta_tau);
  return out;
}

PulseExpectations summarize_pulses(std::span<const PathOutcome> outcomes) {
  PulseExpectations out;
  out.n_paths = outcomes.size();
  std::size_t k_max = 0;
  for (const auto& o : outcomes) {
    k_max = std::max(k_max, o.pulses.size());
    out.clamp_events += o.clamp_events;
    if (o.pulses.empty()) ++out.paths_without_pulse;
  }
  if (k_max == 0)
    throw HorizonError(fmt::format("none of {} paths reached the first pulse before t_max", outcomes.size()));

  std::vector<double> taus, deltas;
  for (std::size_t k = 1; k <= k_max; ++k) {
    PulseLevelStats lv;
    lv.k = k;
    taus.clear();
    deltas.clear();
    for (const auto& o : outcomes) {
      if (o.pulses.size() + 1 < k) continue;
      ++lv.at_risk;
      if (o.pulses.size() >= k) {
        taus.push_back(o.pulses[k - 1].tau_k);
        deltas.push_back(o.pulses[k - 1].delta_tau_k);
      } else if (o.censor_time) {
        ++lv.censored_before;
      }
    }
    lv.tau = estimate_mean(taus);
    lv.delta_tau = estimate_mean(deltas);
    lv.censor_fraction = static_cast<double>(lv.censored_before) / static_cast<double>(lv.at_risk);
    lv.reliable = lv.censor_fraction <= kUnreliableCensoring;
    out.levels.push_back(lv);
  }
  return out;
}

PulseExpectations estimate_pulse_expectations(const ValidatedScenario& scn, const GridConfig& grid,
                                              std::size_t n_paths, unsigned workers) {
  if (n_paths < 2) throw PreconditionError("need at least 2 paths for an estimate with a standard error");
  const auto outcomes = run_ensemble(scn, grid, n_paths, workers);
  return summarize_pulses(outcomes);
}

std::string to_string(SeriesShape shape) {
  switch (shape) {
    case SeriesShape::decreasing: return "decreasing";
    case SeriesShape::increasing: return "increasing";
    case SeriesShape::flat: return "flat";
    case SeriesShape::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

double pooled(const MeanEstimate& a, const MeanEstimate& b) {
  return std::sqrt(a.std_err * a.std_err + b.std_err * b.std_err);
}

bool is_flat(std::span<const MeanEstimate> m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (std::abs(m[i].mean - m[j].mean) > 3.0 * pooled(m[i], m[j])) return false;
  return true;
}

// sign = +1 tests for a decreasing series, -1 for an increasing one.
bool is_directional(std::span<const MeanEstimate> m, double sign) {
  for (std::size_t k = 0; k + 1 < m.size(); ++k)
    if (sign * (m[k].mean - m[k + 1].mean) <= -2.0 * pooled(m[k], m[k + 1])) return false;
  return sign * (m.front().mean - m.back().mean) > 2.0 * pooled(m.front(), m.back());
}

}  // namespace

TimeoutSeriesReport classify_timeout_series(std::span<const MeanEstimate> timeouts,
                                            std::optional<AsymptoticInterval> interval, double allowance) {
  TimeoutSeriesReport rep;
  rep.timeouts.assign(timeouts.begin(), timeouts.end());
  rep.interval = interval;
  const std::size_t m = timeouts.size();

  if (m >= 3) {
    if (is_flat(timeouts))
      rep.shape = SeriesShape::flat;
    else if (is_directional(timeouts, 1.0))
      rep.shape = SeriesShape::decreasing;
    else if (is_directional(timeouts, -1.0))
      rep.shape = SeriesShape::increasing;
  }

  if (m > 0) {
    rep.tail_count = std::min(m, std::max<std::size_t>(2, m / 4));
    double sum = 0.0, var = 0.0;
    for (std::size_t i = m - rep.tail_count; i < m; ++i) {
      sum += timeouts[i].mean;
      var += timeouts[i].std_err * timeouts[i].std_err;
    }
    const double c = static_cast<double>(rep.tail_count);
    rep.tail_mean = sum / c;
    rep.tail_std_err = std::sqrt(var) / c;
    if (interval) {
      const double slack = 3.0 * rep.tail_std_err + allowance;
      rep.tail_inside = rep.tail_mean >= interval->a_beta - slack && rep.tail_mean <= interval->a_alpha + slack;
    }
  }
  return rep;
}

std::string to_string(SandwichVerdict verdict) {
  switch (verdict) {
    case SandwichVerdict::inside: return "inside";
    case SandwichVerdict::below: return "below";
    case SandwichVerdict::above: return "above";
  }
  return "inside";
}

SandwichReport sandwich_verdict(const MeanEstimate& tau1, const TauBounds& bounds, bool advisory) {
  SandwichReport rep;
  rep.bounds = bounds;
  rep.tau1 = tau1;
  rep.advisory = advisory;
  const double se = tau1.std_err;
  const auto in_se = [se](double gap) {
    if (se > 0.0) return gap / se;
    if (gap == 0.0) return 0.0;
    return gap > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  };
  if (tau1.mean < bounds.lower - 3.0 * se) {
    rep.verdict = SandwichVerdict::below;
    rep.margin_se = in_se(bounds.lower - tau1.mean);
  } else if (tau1.mean > bounds.upper + 3.0 * se) {
    rep.verdict = SandwichVerdict::above;
    rep.margin_se = in_se(tau1.mean - bounds.upper);
  } else {
    rep.verdict = SandwichVerdict::inside;
    rep.margin_se = in_se(std::min(tau1.mean - bounds.lower, bounds.upper - tau1.mean));
  }
  return rep;
}

TauBounds first_pulse_bounds(const Scenario& scn) {
  return tau_sandwich(scn.x0(), scn.curves.upper(0.0), scn.sector, scn.sigma);
}

SandwichReport sandwich_check(const ValidatedScenario& scn, const GridConfig& grid, std::size_t n_paths,
                              unsigned workers) {
  const PulseExpectations est = estimate_pulse_expectations(scn, grid, n_paths, workers);
  const bool advisory = curve_trend(scn.scenario().curves.s) != Trend::constant;
  return sandwich_verdict(est.levels.front().tau, first_pulse_bounds(scn.scenario()), advisory);
}

}  // namespace impulse
