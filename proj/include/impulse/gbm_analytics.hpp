#pragma once

// Closed-form expectations for geometric Brownian motion
//
//   X(t) = x0 exp((rate - sigma^2/2) t + sigma B(t)),
//
// used as comparison processes for the drift sector [alpha, beta].

#include "impulse/model.hpp"

namespace impulse {

struct TauBounds {
  double lower = 0.0;  ///< E[tau_beta]
  double upper = 0.0;  ///< E[tau_alpha]
};

struct AsymptoticInterval {
  double a_beta = 0.0;
  double a_alpha = 0.0;
  double q_limit = 0.0;  ///< Q
  double s_limit = 0.0;  ///< S~
};

/// Throws DomainError if x0 <= 0 or t < 0.
double gbm_value(double x0, double rate, double sigma, double t, double b_t);

/// Mean first-passage time of the GBM from x0 up to level: ln(level/x0) / (rate - sigma^2/2).
/// Throws MarginError when rate <= sigma^2/2 and DomainError unless 0 < x0 <= level.
double expected_hit_time(double x0, double level, double rate, double sigma);

/// [E[tau_beta], E[tau_alpha]] for a start x0 and a fixed level <= sector.s_cap.
TauBounds tau_sandwich(double x0, double level, const SectorBounds& sector, double sigma);

/// Same bounds with the levels frozen at q(tau_{k-1}) and s(tau_{k-1}).
TauBounds timeout_bounds_at_k(double q_val, double s_val, const SectorBounds& sector, double sigma);

/// Interval [a_beta, a_alpha] = ln(S~/Q) / (beta|alpha - sigma^2/2), with Q, S~ the curve limits.
AsymptoticInterval asymptotic_interval(const ControlCurves& curves, const SectorBounds& sector, double sigma);

/// The fixed-quota specialisation as printed in the fishery application,
/// 2 / (r - sigma^2) * ln(S / (S - C)). Differs from the general a_beta
/// (which gives 2 / (2r - sigma^2)); reported for comparison only.
double printed_fishery_a_beta(double r, double sigma, double s_level, double q_level);

/// 2K / (2r(K - S) - K sigma^2) * ln(S / (S - C)); agrees with the general a_alpha.
double printed_fishery_a_alpha(double r, double k, double sigma, double s_level, double q_level);

}  // namespace impulse
