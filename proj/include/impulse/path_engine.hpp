#pragma once

// Euler-Maruyama integration of dX = f(X) dt + sigma X dB on a fixed global
// grid t_n = n dt, with first-crossing detection against the trigger curve.

#include <cmath>
#include <cstddef>
#include <vector>

#include "impulse/model.hpp"
#include "impulse/noise.hpp"

namespace impulse {

class GridConfig {
 public:
  /// Throws ParameterError unless 0 < dt <= t_max.
  GridConfig(double dt, double t_max);

  double dt() const noexcept { return dt_; }
  double t_max() const noexcept { return t_max_; }
  double sqrt_dt() const noexcept { return sqrt_dt_; }
  /// Index of the last node, the largest n with n dt <= t_max (up to rounding).
  std::size_t last_node() const noexcept { return last_node_; }
  double time(std::size_t node) const noexcept { return dt_ * static_cast<double>(node); }

 private:
  double dt_;
  double t_max_;
  double sqrt_dt_;
  std::size_t last_node_;
};

struct CrossingEvent {
  std::size_t grid_index = 0;  ///< first node with X >= s, or the last node when censored
  double t_cross = 0.0;
  double x_at_cross = 0.0;
  bool censored = false;
};

/// Node values of one segment; node i of the vectors sits at time (first_node + i) dt.
/// x_alpha / x_beta are empty unless comparison paths were requested.
struct SegmentTrace {
  std::size_t first_node = 0;
  std::vector<double> x;
  std::vector<double> x_alpha;
  std::vector<double> x_beta;
};

struct SegmentOptions {
  SegmentTrace* trace = nullptr;
  /// When set (and trace is set), linear-drift comparison paths at rates
  /// alpha and beta are advanced with the same increments from start_x.
  const SectorBounds* comparison = nullptr;
};

struct SegmentResult {
  CrossingEvent event;
  std::size_t clamp_events = 0;
};

/// One explicit step x + f(x) dt + sigma x dB, clamped at 0 from below.
inline double em_step(double x, const DriftSpec& drift, double sigma, double dt, double d_b) noexcept {
  const double next = x + drift_value(drift, x) * dt + sigma * x * d_b;
  return next < 0.0 ? 0.0 : next;
}

/// Time where the linear interpolant of g through (t0, g0), (t1, g1) vanishes.
/// Expects g0 < 0 <= g1.
inline double interpolate_crossing(double t0, double g0, double t1, double g1) noexcept {
  return t0 + (t1 - t0) * (-g0 / (g1 - g0));
}

/// Steps from (start_node, start_x) until the first node with X >= s(t) or the
/// horizon. A clamp at zero ends the segment as censored: the origin is absorbing.
/// Throws PreconditionError unless 0 < start_x < s(start time).
SegmentResult run_to_crossing(std::size_t start_node, double start_x, const ControlCurves& curves,
                              const DriftSpec& drift, double sigma, const GridConfig& grid, NoiseStream& noise,
                              SegmentOptions options = {});

struct CoupledTriple {
  double dt = 0.0;
  std::vector<double> x_alpha;
  std::vector<double> x;
  std::vector<double> x_beta;
  std::size_t clamp_events = 0;
};

enum class CapPolicy { stop_at_cap, run_to_horizon };

/// X_alpha, X, X_beta from a common start, driven by one increment sequence.
/// With stop_at_cap, all three stop at the first node where any reaches s_cap.
CoupledTriple run_coupled_triple(double start_x, const SectorBounds& sector, const DriftSpec& drift, double sigma,
                                 const GridConfig& grid, NoiseStream& noise,
                                 CapPolicy cap = CapPolicy::stop_at_cap);

struct OrderingCheck {
  std::size_t nodes = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  ///< largest relative breach seen
};

/// Counts nodes where X_alpha <= X <= X_beta fails beyond rel_tol.
OrderingCheck check_coupled_ordering(const CoupledTriple& triple, double rel_tol = 1e-12);

}  // namespace impulse
