#include "impulse/path_engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "impulse/errors.hpp"

namespace impulse {

GridConfig::GridConfig(double dt, double t_max) : dt_(dt), t_max_(t_max) {
  if (!(dt > 0.0) || !(dt <= t_max))
    throw ParameterError(fmt::format("grid needs 0 < dt <= t_max, got dt = {}, t_max = {}", dt, t_max));
  sqrt_dt_ = std::sqrt(dt);
  // Tolerate representation error so that t_max = 100, dt = 1e-3 gives 100000 nodes.
  last_node_ = static_cast<std::size_t>(std::floor(t_max / dt * (1.0 + 1e-12)));
}

SegmentResult run_to_crossing(std::size_t start_node, double start_x, const ControlCurves& curves,
                              const DriftSpec& drift, double sigma, const GridConfig& grid, NoiseStream& noise,
                              SegmentOptions options) {
  double s_prev = curves.upper(grid.time(start_node));
  if (!(start_x > 0.0) || !(start_x < s_prev))
    throw PreconditionError(fmt::format("segment start {} must lie in ]0, s(t) = {}[", start_x, s_prev));

  SegmentTrace* trace = options.trace;
  const bool companions = trace != nullptr && options.comparison != nullptr;
  double xa = start_x;
  double xb = start_x;
  const double rate_a = companions ? options.comparison->alpha : 0.0;
  const double rate_b = companions ? options.comparison->beta : 0.0;
  if (trace) {
    trace->first_node = start_node;
    trace->x.assign(1, start_x);
    trace->x_alpha.clear();
    trace->x_beta.clear();
    if (companions) {
      trace->x_alpha.push_back(xa);
      trace->x_beta.push_back(xb);
    }
  }

  const double dt = grid.dt();
  const double sqrt_dt = grid.sqrt_dt();
  const std::size_t last = grid.last_node();
  SegmentResult out;
  double x = start_x;

  for (std::size_t n = start_node + 1; n <= last; ++n) {
    const double d_b = noise.increment(sqrt_dt);
    const double raw = x + drift_value(drift, x) * dt + sigma * x * d_b;
    if (companions) {
      xa = std::max(0.0, xa + rate_a * xa * dt + sigma * xa * d_b);
      xb = std::max(0.0, xb + rate_b * xb * dt + sigma * xb * d_b);
      trace->x_alpha.push_back(xa);
      trace->x_beta.push_back(xb);
    }
    if (raw < 0.0) {
      ++out.clamp_events;
      if (trace) trace->x.push_back(0.0);
      break;
    }
    const double t = grid.time(n);
    const double s_now = curves.upper(t);
    if (trace) trace->x.push_back(raw);
    if (raw >= s_now) {
      out.event.grid_index = n;
      out.event.t_cross = interpolate_crossing(grid.time(n - 1), x - s_prev, t, raw - s_now);
      out.event.x_at_cross = curves.upper(out.event.t_cross);
      out.event.censored = false;
      return out;
    }
    x = raw;
    s_prev = s_now;
  }

  out.event.grid_index = last;
  out.event.t_cross = grid.t_max();
  out.event.x_at_cross = out.clamp_events > 0 ? 0.0 : x;
  out.event.censored = true;
  return out;
}

CoupledTriple run_coupled_triple(double start_x, const SectorBounds& sector, const DriftSpec& drift, double sigma,
                                 const GridConfig& grid, NoiseStream& noise, CapPolicy cap) {
  if (!(start_x > 0.0) || !(start_x < sector.s_cap))
    throw PreconditionError(fmt::format("triple start {} must lie in ]0, s_cap = {}[", start_x, sector.s_cap));

  CoupledTriple out;
  out.dt = grid.dt();
  const std::size_t last = grid.last_node();
  if (cap == CapPolicy::run_to_horizon) {
    out.x_alpha.reserve(last + 1);
    out.x.reserve(last + 1);
    out.x_beta.reserve(last + 1);
  }
  double xa = start_x, x = start_x, xb = start_x;
  out.x_alpha.push_back(xa);
  out.x.push_back(x);
  out.x_beta.push_back(xb);

  const double dt = grid.dt();
  const double sqrt_dt = grid.sqrt_dt();
  const auto advance = [&](double v, double f_v, double d_b) {
    const double next = v + f_v * dt + sigma * v * d_b;
    if (next < 0.0) {
      ++out.clamp_events;
      return 0.0;
    }
    return next;
  };

  for (std::size_t n = 1; n <= last; ++n) {
    const double d_b = noise.increment(sqrt_dt);
    xa = advance(xa, sector.alpha * xa, d_b);
    x = advance(x, drift_value(drift, x), d_b);
    xb = advance(xb, sector.beta * xb, d_b);
    out.x_alpha.push_back(xa);
    out.x.push_back(x);
    out.x_beta.push_back(xb);
    if (cap == CapPolicy::stop_at_cap && std::max({xa, x, xb}) >= sector.s_cap) break;
  }
  return out;
}

OrderingCheck check_coupled_ordering(const CoupledTriple& triple, double rel_tol) {
  OrderingCheck out;
  out.nodes = triple.x.size();
  for (std::size_t i = 0; i < out.nodes; ++i) {
    const double lo = triple.x_alpha[i];
    const double mid = triple.x[i];
    const double hi = triple.x_beta[i];
    const double scale = std::max({std::abs(lo), std::abs(mid), std::abs(hi)});
    const double excess = std::max(lo - mid, mid - hi) / (scale > 0.0 ? scale : 1.0);
    if (excess > rel_tol) ++out.violations;
    out.worst_excess = std::max(out.worst_excess, excess);
  }
  return out;
}

}  // namespace impulse
