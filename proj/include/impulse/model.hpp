#pragma once

// Drift families, control curves and scenarios for the impulsive diffusion
//
//   dX = f(X) dt + sigma X dB        between pulses,
//   X(tau_k+) = q(tau_k),            tau_k = inf{t > tau_{k-1} : X(t) = s(t)}.
//
// Everything here is an immutable value type; scenarios are shared read-only
// by the simulation workers.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace impulse {

inline constexpr std::size_t kDefaultGridPoints = 10001;

// Relative widening applied when a drift has a single linear rate, so that
// alpha < beta holds formally while both bounds describe the same rate.
inline constexpr double kSectorWidening = 1e-9;

// ---------------------------------------------------------------------------
// Drift
// ---------------------------------------------------------------------------

struct LinearDrift {
  double rate;
};

/// f(x) = r x (1 - x / K)
struct LogisticDrift {
  double r;
  double k;
};

/// f(x) = c_1 x + c_2 x^2 + ... + c_m x^m (no constant term, so f(0) = 0).
struct PolynomialDrift {
  std::vector<double> coefficients;
};

using DriftSpec = std::variant<LinearDrift, LogisticDrift, PolynomialDrift>;

/// Throws DomainError for x < 0.
double evaluate_drift(const DriftSpec& spec, double x);

/// Unchecked evaluation for the integrator's inner loop (x >= 0 is an invariant there).
double drift_value(const DriftSpec& spec, double x) noexcept;

std::string drift_kind(const DriftSpec& spec);

// ---------------------------------------------------------------------------
// Sector condition: alpha x <= f(x) <= beta x on [0, s_cap]
// ---------------------------------------------------------------------------

struct SectorBounds {
  double alpha = 0.0;
  double beta = 0.0;
  double s_cap = 0.0;
  /// alpha - sigma^2/2, filled in when the bounds are attached to a scenario.
  double nu = 0.0;
};

/// Logistic: alpha = r (K - s_cap) / K, beta = r. Linear: (a, a (1 + 1e-9)).
/// Polynomial: extremes of f(x)/x over a uniform grid on ]0, s_cap].
SectorBounds derive_sector_bounds(const DriftSpec& spec, double s_cap,
                                  std::size_t grid_points = kDefaultGridPoints);

// ---------------------------------------------------------------------------
// Control curves
// ---------------------------------------------------------------------------

struct ConstantCurve {
  double level;
};

/// level * (1 - gamma^(1 + t / t_scale)); increases from level (1 - gamma) towards level.
struct ClosureCurve {
  double level;
  double gamma;
  double t_scale;
};

/// Piecewise-linear table, constant beyond either end.
class TableCurve {
 public:
  /// Times must be strictly increasing; values strictly monotone or all equal.
  TableCurve(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const noexcept;
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

using CurveSpec = std::variant<ConstantCurve, ClosureCurve, TableCurve>;

enum class Trend { constant, increasing, decreasing };

double evaluate_curve(const CurveSpec& curve, double t) noexcept;
/// lim_{t -> inf} of the curve, read off per variant.
double curve_limit(const CurveSpec& curve) noexcept;
Trend curve_trend(const CurveSpec& curve) noexcept;
std::string curve_kind(const CurveSpec& curve);

struct ControlCurves {
  CurveSpec q;  ///< reset curve
  CurveSpec s;  ///< trigger curve

  double lower(double t) const noexcept { return evaluate_curve(q, t); }
  double upper(double t) const noexcept { return evaluate_curve(s, t); }
};

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct Scenario {
  DriftSpec drift;
  SectorBounds sector;
  ControlCurves curves;
  double sigma = 0.0;
  double t_max = 100.0;
  std::size_t max_pulses = 10;
  std::uint64_t seed = 1;

  /// Every path starts on the reset curve.
  double x0() const noexcept { return curves.lower(0.0); }
};

/// Assembles a scenario, deriving the sector bounds on [0, s_cap] and the margin nu.
/// Checks only t_max > 0 and max_pulses >= 1; hypotheses are checked by validate_hypotheses.
Scenario make_scenario(DriftSpec drift, ControlCurves curves, double s_cap, double sigma,
                       double t_max, std::size_t max_pulses, std::uint64_t seed);

struct HypothesisCheck {
  bool pass = true;
  std::string diagnostic;
  /// First violating grid coordinate (state for (A), time for (C)).
  std::optional<double> first_violation;
};

struct ValidationReport {
  HypothesisCheck sector;  ///< (A)
  HypothesisCheck margin;  ///< (B)
  HypothesisCheck curves;  ///< (C)
  double state_pitch = 0.0;
  double time_pitch = 0.0;

  bool all_pass() const noexcept { return sector.pass && margin.pass && curves.pass; }
};

/// Grid-based check of the three hypotheses. (C) is checked as 0 < q(t) < s(t) <= s_cap.
/// Throws PreconditionError if grid_points < 2; violations are report entries.
ValidationReport validate_hypotheses(const Scenario& scn,
                                     std::size_t grid_points = kDefaultGridPoints);

enum class MarginPolicy { enforce, warn };

/// A scenario whose hypotheses have been checked. The simulator only accepts these.
class ValidatedScenario {
 public:
  /// Throws HypothesisError listing failed hypotheses. Under MarginPolicy::warn a
  /// failure of (B) alone is tolerated and recorded in margin_violated().
  explicit ValidatedScenario(Scenario scn, MarginPolicy policy = MarginPolicy::enforce,
                             std::size_t grid_points = kDefaultGridPoints);

  const Scenario& scenario() const noexcept { return scn_; }
  const ValidationReport& report() const noexcept { return report_; }
  bool margin_violated() const noexcept { return !report_.margin.pass; }

 private:
  Scenario scn_;
  ValidationReport report_;
};

/// Logistic stock with quota C taken whenever the stock reaches S: q = S - C, s = S.
Scenario make_fixed_quota_fishery(double r, double k, double s_level, double quota,
                                  double sigma, double t_max, std::size_t max_pulses,
                                  std::uint64_t seed);

/// Logistic stock with shrinking quota: q(t) = S (1 - gamma^(1 + t/T)), s = S.
Scenario make_closure_fishery(double r, double k, double s_level, double gamma,
                              double t_scale, double sigma, double t_max,
                              std::size_t max_pulses, std::uint64_t seed);

}  // namespace impulse
