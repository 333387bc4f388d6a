#include "impulse/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <fmt/core.h>

#include "impulse/errors.hpp"

namespace impulse {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Points i = 1..n-1 of a uniform grid over [0, hi]; the origin is excluded.
template <class F>
void for_each_interior(double hi, std::size_t n, F&& fn) {
  const double pitch = hi / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = i + 1 == n ? hi : pitch * static_cast<double>(i);
    if (!fn(x)) return;
  }
}

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>{}) == v.end();
}

bool strictly_decreasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::less_equal<>{}) == v.end();
}

}  // namespace

double drift_value(const DriftSpec& spec, double x) noexcept {
  return std::visit(overloaded{
                        [x](const LinearDrift& d) { return d.rate * x; },
                        [x](const LogisticDrift& d) { return d.r * x * (1.0 - x / d.k); },
                        [x](const PolynomialDrift& d) {
                          // Horner on c_1 + c_2 x + ..., then one factor of x.
                          double acc = 0.0;
                          for (auto it = d.coefficients.rbegin(); it != d.coefficients.rend(); ++it)
                            acc = acc * x + *it;
                          return acc * x;
                        },
                    },
                    spec);
}

double evaluate_drift(const DriftSpec& spec, double x) {
  if (!(x >= 0.0)) throw DomainError(fmt::format("drift evaluated at negative state {}", x));
  return drift_value(spec, x);
}

std::string drift_kind(const DriftSpec& spec) {
  return std::visit(overloaded{
                        [](const LinearDrift&) { return std::string("linear"); },
                        [](const LogisticDrift&) { return std::string("logistic"); },
                        [](const PolynomialDrift&) { return std::string("polynomial"); },
                    },
                    spec);
}

SectorBounds derive_sector_bounds(const DriftSpec& spec, double s_cap, std::size_t grid_points) {
  if (!(s_cap > 0.0)) throw DomainError(fmt::format("s_cap must be positive, got {}", s_cap));
  if (grid_points < 2) throw PreconditionError("sector grid needs at least 2 points");

  SectorBounds out;
  out.s_cap = s_cap;
  std::visit(overloaded{
                 [&](const LinearDrift& d) {
                   if (!(d.rate > 0.0))
                     throw HypothesisError(fmt::format("linear rate must be positive, got {}", d.rate));
                   out.alpha = d.rate;
                   out.beta = d.rate * (1.0 + kSectorWidening);
                 },
                 [&](const LogisticDrift& d) {
                   if (!(d.r > 0.0) || !(d.k > 0.0))
                     throw HypothesisError("logistic drift needs r > 0 and K > 0");
                   if (s_cap >= d.k)
                     throw HypothesisError(
                         fmt::format("s_cap = {} must lie below the carrying capacity K = {}", s_cap, d.k));
                   out.alpha = d.r * (d.k - s_cap) / d.k;
                   out.beta = d.r;
                 },
                 [&](const PolynomialDrift& d) {
                   if (d.coefficients.empty()) throw HypothesisError("polynomial drift has no coefficients");
                   double lo = d.coefficients.front();  // f(x)/x -> c_1 as x -> 0
                   double hi = lo;
                   for_each_interior(s_cap, grid_points, [&](double x) {
                     const double ratio = drift_value(spec, x) / x;
                     lo = std::min(lo, ratio);
                     hi = std::max(hi, ratio);
                     return true;
                   });
                   out.alpha = lo;
                   out.beta = hi > lo ? hi : lo + std::abs(lo) * kSectorWidening;
                 },
             },
             spec);

  if (!(out.alpha > 0.0))
    throw HypothesisError(fmt::format("derived lower sector rate alpha = {} is not positive", out.alpha));
  return out;
}

// ---------------------------------------------------------------------------

TableCurve::TableCurve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size())
    throw ParameterError("table curve needs matching, non-empty time and value lists");
  if (!strictly_increasing(times_)) throw ParameterError("table curve times must be strictly increasing");
  const bool flat = std::all_of(values_.begin(), values_.end(),
                                [&](double v) { return v == values_.front(); });
  if (!flat && !strictly_increasing(values_) && !strictly_decreasing(values_))
    throw ParameterError("table curve values must be strictly monotone or constant");
}

double TableCurve::operator()(double t) const noexcept {
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(hi - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double evaluate_curve(const CurveSpec& curve, double t) noexcept {
  return std::visit(overloaded{
                        [](const ConstantCurve& c) { return c.level; },
                        [t](const ClosureCurve& c) {
                          return c.level * (1.0 - std::pow(c.gamma, 1.0 + t / c.t_scale));
                        },
                        [t](const TableCurve& c) { return c(t); },
                    },
                    curve);
}

double curve_limit(const CurveSpec& curve) noexcept {
  return std::visit(overloaded{
                        [](const ConstantCurve& c) { return c.level; },
                        [](const ClosureCurve& c) { return c.level; },
                        [](const TableCurve& c) { return c.values().back(); },
                    },
                    curve);
}

Trend curve_trend(const CurveSpec& curve) noexcept {
  return std::visit(overloaded{
                        [](const ConstantCurve&) { return Trend::constant; },
                        [](const ClosureCurve&) { return Trend::increasing; },
                        [](const TableCurve& c) {
                          const auto& v = c.values();
                          if (v.back() > v.front()) return Trend::increasing;
                          if (v.back() < v.front()) return Trend::decreasing;
                          return Trend::constant;
                        },
                    },
                    curve);
}

std::string curve_kind(const CurveSpec& curve) {
  return std::visit(overloaded{
                        [](const ConstantCurve&) { return std::string("constant"); },
                        [](const ClosureCurve&) { return std::string("closure"); },
                        [](const TableCurve&) { return std::string("table"); },
                    },
                    curve);
}

// ---------------------------------------------------------------------------

Scenario make_scenario(DriftSpec drift, ControlCurves curves, double s_cap, double sigma,
                       double t_max, std::size_t max_pulses, std::uint64_t seed) {
  if (!(t_max > 0.0)) throw ParameterError(fmt::format("t_max must be positive, got {}", t_max));
  if (max_pulses < 1) throw ParameterError("max_pulses must be at least 1");
  if (!(sigma >= 0.0)) throw ParameterError(fmt::format("sigma must be non-negative, got {}", sigma));

  Scenario scn;
  scn.sector = derive_sector_bounds(drift, s_cap);
  scn.sector.nu = scn.sector.alpha - 0.5 * sigma * sigma;
  scn.drift = std::move(drift);
  scn.curves = std::move(curves);
  scn.sigma = sigma;
  scn.t_max = t_max;
  scn.max_pulses = max_pulses;
  scn.seed = seed;
  return scn;
}

ValidationReport validate_hypotheses(const Scenario& scn, std::size_t grid_points) {
  if (grid_points < 2) throw PreconditionError("validation grid needs at least 2 points");

  ValidationReport rep;
  const SectorBounds& sec = scn.sector;
  rep.state_pitch = sec.s_cap / static_cast<double>(grid_points - 1);
  rep.time_pitch = scn.t_max / static_cast<double>(grid_points - 1);

  // (A)
  if (!(sec.alpha >= 0.0 && sec.alpha < sec.beta)) {
    rep.sector = {false, fmt::format("need 0 <= alpha < beta, got alpha = {}, beta = {}", sec.alpha, sec.beta),
                  std::nullopt};
  } else if (drift_value(scn.drift, 0.0) != 0.0) {
    rep.sector = {false, "f(0) != 0", 0.0};
  } else {
    for_each_interior(sec.s_cap, grid_points, [&](double x) {
      const double f = drift_value(scn.drift, x);
      const double slack = 1e-12 * std::abs(sec.beta * x);
      if (f < sec.alpha * x - slack || f > sec.beta * x + slack) {
        rep.sector = {false,
                      fmt::format("alpha x <= f(x) <= beta x fails at x = {}: f = {}, bounds [{}, {}]", x, f,
                                  sec.alpha * x, sec.beta * x),
                      x};
        return false;
      }
      return true;
    });
  }
  if (rep.sector.pass)
    rep.sector.diagnostic = fmt::format("{} x <= f(x) <= {} x on ]0, {}] (pitch {})", sec.alpha, sec.beta,
                                        sec.s_cap, rep.state_pitch);

  // (B)
  const double half_var = 0.5 * scn.sigma * scn.sigma;
  rep.margin.pass = sec.alpha > half_var;
  rep.margin.diagnostic = fmt::format("alpha = {} {} sigma^2/2 = {}", sec.alpha, rep.margin.pass ? ">" : "<=",
                                      half_var);

  // (C)
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = i + 1 == grid_points ? scn.t_max : rep.time_pitch * static_cast<double>(i);
    const double q = scn.curves.lower(t);
    const double s = scn.curves.upper(t);
    if (!(q > 0.0 && q < s && s <= sec.s_cap)) {
      rep.curves = {false,
                    fmt::format("0 < q(t) < s(t) <= s_cap fails at t = {}: q = {}, s = {}, s_cap = {}", t, q, s,
                                sec.s_cap),
                    t};
      break;
    }
  }
  if (rep.curves.pass)
    rep.curves.diagnostic =
        fmt::format("0 < q(t) < s(t) <= {} on [0, {}] (pitch {})", sec.s_cap, scn.t_max, rep.time_pitch);
  return rep;
}

ValidatedScenario::ValidatedScenario(Scenario scn, MarginPolicy policy, std::size_t grid_points)
    : scn_(std::move(scn)), report_(validate_hypotheses(scn_, grid_points)) {
  std::string failed;
  if (!report_.sector.pass) failed += " (A): " + report_.sector.diagnostic + ";";
  if (!report_.margin.pass && policy == MarginPolicy::enforce) failed += " (B): " + report_.margin.diagnostic + ";";
  if (!report_.curves.pass) failed += " (C): " + report_.curves.diagnostic + ";";
  if (!failed.empty()) throw HypothesisError("hypotheses violated:" + failed);
}

// ---------------------------------------------------------------------------

namespace {

void require_logistic_params(double r, double k, double s_level, double sigma) {
  if (!(r > 0.0)) throw ParameterError(fmt::format("growth rate r must be positive, got {}", r));
  if (!(sigma > 0.0)) throw ParameterError(fmt::format("sigma must be positive, got {}", sigma));
  if (!(s_level > 0.0 && s_level < k))
    throw HypothesisError(fmt::format("need 0 < S < K, got S = {}, K = {}", s_level, k));
}

Scenario checked(Scenario scn) {
  const ValidationReport rep = validate_hypotheses(scn);
  if (!rep.all_pass()) {
    std::string msg = "fishery scenario violates";
    if (!rep.sector.pass) msg += " (A) " + rep.sector.diagnostic;
    if (!rep.margin.pass) msg += " (B) " + rep.margin.diagnostic;
    if (!rep.curves.pass) msg += " (C) " + rep.curves.diagnostic;
    throw HypothesisError(msg);
  }
  return scn;
}

}  // namespace

Scenario make_fixed_quota_fishery(double r, double k, double s_level, double quota, double sigma,
                                  double t_max, std::size_t max_pulses, std::uint64_t seed) {
  require_logistic_params(r, k, s_level, sigma);
  if (!(quota > 0.0 && quota < s_level))
    throw HypothesisError(fmt::format("quota C = {} must lie in ]0, S[ with S = {}", quota, s_level));
  return checked(make_scenario(LogisticDrift{r, k},
                               ControlCurves{ConstantCurve{s_level - quota}, ConstantCurve{s_level}}, s_level,
                               sigma, t_max, max_pulses, seed));
}

Scenario make_closure_fishery(double r, double k, double s_level, double gamma, double t_scale,
                              double sigma, double t_max, std::size_t max_pulses, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ParameterError(fmt::format("closure fraction gamma = {} must lie in ]0, 1[", gamma));
  if (!(t_scale > 0.0)) throw ParameterError(fmt::format("time scale T = {} must be positive", t_scale));
  require_logistic_params(r, k, s_level, sigma);
  return checked(make_scenario(LogisticDrift{r, k},
                               ControlCurves{ClosureCurve{s_level, gamma, t_scale}, ConstantCurve{s_level}},
                               s_level, sigma, t_max, max_pulses, seed));
}

}  // namespace impulse
