#include "impulse/gbm_analytics.hpp"

#include <cmath>

#include <fmt/core.h>

#include "impulse/errors.hpp"

namespace impulse {

double gbm_value(double x0, double rate, double sigma, double t, double b_t) {
  if (!(x0 > 0.0)) throw DomainError(fmt::format("GBM start must be positive, got {}", x0));
  if (!(t >= 0.0)) throw DomainError(fmt::format("GBM time must be non-negative, got {}", t));
  return x0 * std::exp((rate - 0.5 * sigma * sigma) * t + sigma * b_t);
}

double expected_hit_time(double x0, double level, double rate, double sigma) {
  const double margin = rate - 0.5 * sigma * sigma;
  if (!(margin > 0.0))
    throw MarginError(fmt::format("rate {} does not exceed sigma^2/2 = {}", rate, 0.5 * sigma * sigma));
  if (!(x0 > 0.0)) throw DomainError(fmt::format("start must be positive, got {}", x0));
  if (x0 > level) throw DomainError(fmt::format("start {} lies above the level {}", x0, level));
  return std::log(level / x0) / margin;
}

TauBounds tau_sandwich(double x0, double level, const SectorBounds& sector, double sigma) {
  if (level > sector.s_cap)
    throw DomainError(fmt::format("level {} exceeds the sector cap {}", level, sector.s_cap));
  return {expected_hit_time(x0, level, sector.beta, sigma), expected_hit_time(x0, level, sector.alpha, sigma)};
}

TauBounds timeout_bounds_at_k(double q_val, double s_val, const SectorBounds& sector, double sigma) {
  return {expected_hit_time(q_val, s_val, sector.beta, sigma), expected_hit_time(q_val, s_val, sector.alpha, sigma)};
}

AsymptoticInterval asymptotic_interval(const ControlCurves& curves, const SectorBounds& sector, double sigma) {
  AsymptoticInterval out;
  out.q_limit = curve_limit(curves.q);
  out.s_limit = curve_limit(curves.s);
  if (out.q_limit > out.s_limit)
    throw DomainError(fmt::format("curve limits out of order: Q = {} > S~ = {}", out.q_limit, out.s_limit));
  const TauBounds b = timeout_bounds_at_k(out.q_limit, out.s_limit, sector, sigma);
  out.a_beta = b.lower;
  out.a_alpha = b.upper;
  return out;
}

double printed_fishery_a_beta(double r, double sigma, double s_level, double q_level) {
  return 2.0 / (r - sigma * sigma) * std::log(s_level / q_level);
}

double printed_fishery_a_alpha(double r, double k, double sigma, double s_level, double q_level) {
  return 2.0 * k / (2.0 * r * (k - s_level) - k * sigma * sigma) * std::log(s_level / q_level);
}

}  // namespace impulse
