#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "impulse/errors.hpp"
#include "impulse/model.hpp"

using namespace impulse;

namespace {

// Brute-force oracle: extremes of f(x)/x on a fine grid over ]0, cap].
std::pair<double, double> ratio_extremes(const DriftSpec& f, double cap, int n = 200000) {
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 1; i <= n; ++i) {
    const double x = cap * i / n;
    const double r = evaluate_drift(f, x) / x;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

Scenario desk(double sigma = 0.5, double q = 40.0, double s = 50.0) {
  return make_scenario(LogisticDrift{1.0, 100.0}, ControlCurves{ConstantCurve{q}, ConstantCurve{s}}, 50.0, sigma,
                       100.0, 5, 1);
}

}  // namespace

TEST_CASE("evaluate_drift matches the closed forms") {
  CHECK(evaluate_drift(LogisticDrift{1, 100}, 0.0) == 0.0);
  CHECK(evaluate_drift(LogisticDrift{1, 100}, 50.0) == 25.0);
  CHECK(evaluate_drift(LinearDrift{2}, 3.0) == 6.0);
  CHECK(evaluate_drift(PolynomialDrift{{2.0, -0.01}}, 10.0) == doctest::Approx(19.0));
  CHECK_THROWS_AS(evaluate_drift(LinearDrift{1}, -1e-9), DomainError);

  for (const DriftSpec& f : {DriftSpec{LinearDrift{3}}, DriftSpec{LogisticDrift{2, 7}},
                             DriftSpec{PolynomialDrift{{1.0, 2.0, -3.0}}}})
    CHECK(evaluate_drift(f, 0.0) == 0.0);
}

TEST_CASE("logistic sector bounds agree with the grid oracle") {
  struct Case {
    double r, k, cap, alpha, beta;
  };
  for (const Case c : {Case{1, 100, 50, 0.5, 1.0}, Case{2, 10, 5, 1.0, 2.0}}) {
    const DriftSpec f = LogisticDrift{c.r, c.k};
    const SectorBounds sb = derive_sector_bounds(f, c.cap);
    CHECK(sb.alpha == doctest::Approx(c.alpha).epsilon(1e-15));
    CHECK(sb.beta == c.beta);
    const auto [lo, hi] = ratio_extremes(f, c.cap);
    CHECK(lo == doctest::Approx(c.alpha).epsilon(1e-12));  // attained at x = cap
    CHECK(hi <= c.beta);
    CHECK(hi == doctest::Approx(c.beta).epsilon(1e-4));  // supremum as x -> 0
  }
  CHECK_THROWS_AS(derive_sector_bounds(LogisticDrift{1, 100}, 100.0), HypothesisError);
  CHECK_THROWS_AS(derive_sector_bounds(LogisticDrift{1, 100}, 0.0), DomainError);
}

TEST_CASE("linear and polynomial sector bounds") {
  const SectorBounds lin = derive_sector_bounds(LinearDrift{2.0}, 5.0);
  CHECK(lin.alpha == 2.0);
  CHECK(lin.beta > lin.alpha);
  CHECK(lin.beta == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS(derive_sector_bounds(LinearDrift{0.0}, 5.0), HypothesisError);

  // f(x)/x = 2 - 0.01 x on ]0, 50] spans [1.5, 2].
  const SectorBounds poly = derive_sector_bounds(PolynomialDrift{{2.0, -0.01}}, 50.0);
  CHECK(poly.alpha == doctest::Approx(1.5));
  CHECK(poly.beta == doctest::Approx(2.0));
  CHECK_THROWS_AS(derive_sector_bounds(PolynomialDrift{{1.0, -0.1}}, 20.0), HypothesisError);
}

TEST_CASE("sector inequality holds at every grid point of validated scenarios") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double r = u(rng);
    const double k = 10.0 * u(rng);
    const double cap = k * std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const DriftSpec f = LogisticDrift{r, k};
    const SectorBounds sb = derive_sector_bounds(f, cap);
    CHECK(sb.alpha == doctest::Approx(r * (k - cap) / k));
    CHECK(sb.beta == r);
    for (int i = 0; i <= 1000; ++i) {
      const double x = cap * i / 1000.0;
      const double fx = evaluate_drift(f, x);
      CHECK(sb.alpha * x <= fx + 1e-12 * std::abs(fx));
      CHECK(fx <= sb.beta * x + 1e-12 * std::abs(fx));
    }
  }
}

TEST_CASE("validate_hypotheses reports each hypothesis") {
  const ValidationReport ok = validate_hypotheses(desk());
  CHECK(ok.all_pass());
  CHECK(ok.state_pitch == doctest::Approx(50.0 / 10000));

  const ValidationReport noisy = validate_hypotheses(desk(1.2));
  CHECK(noisy.sector.pass);
  CHECK_FALSE(noisy.margin.pass);
  CHECK(noisy.curves.pass);

  const ValidationReport touching = validate_hypotheses(desk(0.5, 50.0, 50.0));
  CHECK_FALSE(touching.curves.pass);
  REQUIRE(touching.curves.first_violation);
  CHECK(*touching.curves.first_violation == 0.0);

  Scenario too_high = desk(0.5, 40.0, 60.0);
  CHECK_FALSE(validate_hypotheses(too_high).curves.pass);

  Scenario bad_sector = desk();
  bad_sector.sector.alpha = 0.6;  // f(50)/50 = 0.5 < 0.6
  const ValidationReport a = validate_hypotheses(bad_sector);
  CHECK_FALSE(a.sector.pass);
  REQUIRE(a.sector.first_violation);
  CHECK(*a.sector.first_violation > 0.0);

  CHECK_THROWS_AS(validate_hypotheses(desk(), 1), PreconditionError);

  const ValidationReport again = validate_hypotheses(desk(1.2));
  CHECK(again.margin.diagnostic == noisy.margin.diagnostic);
  CHECK(again.sector.diagnostic == noisy.sector.diagnostic);
  CHECK(again.curves.diagnostic == noisy.curves.diagnostic);
}

TEST_CASE("ValidatedScenario enforces or tolerates the margin") {
  CHECK_NOTHROW(ValidatedScenario(desk()));
  CHECK_THROWS_AS(ValidatedScenario(desk(1.2)), HypothesisError);
  const ValidatedScenario warned(desk(1.2), MarginPolicy::warn);
  CHECK(warned.margin_violated());
  CHECK_THROWS_AS(ValidatedScenario(desk(0.5, 50, 50), MarginPolicy::warn), HypothesisError);
}

TEST_CASE("fixed-quota fishery") {
  const Scenario scn = make_fixed_quota_fishery(1, 100, 50, 10, 0.5, 100, 5, 9);
  CHECK(scn.curves.lower(3.0) == 40.0);
  CHECK(scn.curves.upper(3.0) == 50.0);
  CHECK(scn.sector.alpha == 0.5);
  CHECK(scn.sector.beta == 1.0);
  CHECK(scn.sector.nu == 0.375);
  CHECK(scn.x0() == 40.0);
  CHECK_THROWS_AS(make_fixed_quota_fishery(1, 100, 50, 50, 0.5, 100, 5, 9), HypothesisError);
  CHECK_THROWS_AS(make_fixed_quota_fishery(1, 100, 100, 10, 0.5, 100, 5, 9), HypothesisError);
  CHECK_THROWS_AS(make_fixed_quota_fishery(1, 100, 50, 10, 1.2, 100, 5, 9), HypothesisError);
}

TEST_CASE("closure fishery curve") {
  const Scenario scn = make_closure_fishery(1, 100, 50, 0.5, 1.0, 0.5, 20, 10, 3);
  CHECK(scn.x0() == doctest::Approx(25.0));
  CHECK(scn.curves.lower(1.0) == doctest::Approx(37.5));
  CHECK(curve_limit(scn.curves.q) == 50.0);
  CHECK(curve_trend(scn.curves.q) == Trend::increasing);
  double prev = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double q = scn.curves.lower(i * 0.01);
    CHECK(q > prev);
    CHECK(q < 50.0);
    prev = q;
  }
  CHECK_THROWS_AS(make_closure_fishery(1, 100, 50, 1.0, 1.0, 0.5, 20, 10, 3), ParameterError);
  CHECK_THROWS_AS(make_closure_fishery(1, 100, 50, 0.0, 1.0, 0.5, 20, 10, 3), ParameterError);
  CHECK_THROWS_AS(make_closure_fishery(1, 100, 50, 0.5, 0.0, 0.5, 20, 10, 3), ParameterError);
}

TEST_CASE("table curves interpolate and hold their end values") {
  const TableCurve q({0.0, 20.0}, {40.0, 30.0});
  CHECK(q(-1.0) == 40.0);
  CHECK(q(10.0) == doctest::Approx(35.0));
  CHECK(q(25.0) == 30.0);
  const CurveSpec spec = q;
  CHECK(curve_limit(spec) == 30.0);
  CHECK(curve_trend(spec) == Trend::decreasing);
  CHECK(curve_trend(CurveSpec{TableCurve({0, 1, 2}, {5, 5, 5})}) == Trend::constant);

  CHECK_THROWS_AS(TableCurve({0.0, 0.0}, {1.0, 2.0}), ParameterError);
  CHECK_THROWS_AS(TableCurve({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0}), ParameterError);
  CHECK_THROWS_AS(TableCurve({0.0, 1.0}, {1.0}), ParameterError);
}

TEST_CASE("make_scenario rejects degenerate run settings") {
  const ControlCurves c{ConstantCurve{40}, ConstantCurve{50}};
  CHECK_THROWS_AS(make_scenario(LogisticDrift{1, 100}, c, 50, 0.5, 0.0, 1, 1), ParameterError);
  CHECK_THROWS_AS(make_scenario(LogisticDrift{1, 100}, c, 50, 0.5, 10.0, 0, 1), ParameterError);
}
