#include <doctest.h>

#include <cmath>
#include <random>

#include "impulse/errors.hpp"
#include "impulse/gbm_analytics.hpp"

using namespace impulse;

namespace {

const double kE = std::exp(1.0);

// Independent first-passage oracle: exact log-space GBM increments on a grid,
// monitored at the nodes, then corrected for discrete monitoring with the
// standard overshoot 0.5826 sigma sqrt(dt).
double mc_gbm_hit_time(double x0, double level, double rate, double sigma, int paths, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  const double drift = (rate - 0.5 * sigma * sigma) * dt;
  const double vol = sigma * std::sqrt(dt);
  const double target = std::log(level / x0);
  double total = 0.0;
  for (int p = 0; p < paths; ++p) {
    double y = 0.0;
    long n = 0;
    while (y < target) {
      y += drift + vol * z(rng);
      ++n;
    }
    total += n * dt;
  }
  return total / paths - 0.5826 * vol / (rate - 0.5 * sigma * sigma);
}

}  // namespace

TEST_CASE("gbm_value") {
  CHECK(gbm_value(1.0, 0.5 * 0.7 * 0.7, 0.7, 5.0, 0.0) == doctest::Approx(1.0));
  CHECK(gbm_value(2.0, 1.0, 0.0, 1.0, 0.0) == doctest::Approx(2.0 * kE));
  CHECK(gbm_value(1.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(std::exp(1.5)));
  CHECK_THROWS_AS(gbm_value(0.0, 1.0, 1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(gbm_value(1.0, 1.0, 1.0, -1.0, 0.0), DomainError);
}

TEST_CASE("expected_hit_time closed form and Monte Carlo oracle") {
  CHECK(expected_hit_time(3.0, 3.0, 1.0, 0.5) == 0.0);
  CHECK(expected_hit_time(1.0, kE, 1.0, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(expected_hit_time(1.0, kE, 1.0, 1.5), MarginError);
  CHECK_THROWS_AS(expected_hit_time(2.0, 1.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(expected_hit_time(0.0, 1.0, 1.0, 0.5), DomainError);

  // Var(tau) = ln(L/x0) sigma^2 / nu^3 = 8, so 4000 paths give se ~ 0.045.
  const double mc = mc_gbm_hit_time(1.0, kE, 1.0, 1.0, 4000, 1e-3, 11);
  CHECK(std::abs(mc - 2.0) < 4.0 * std::sqrt(8.0 / 4000));
}

TEST_CASE("tau_sandwich") {
  const SectorBounds sec{1.0, 2.0, 10.0, 0.5};
  const TauBounds b = tau_sandwich(1.0, kE, sec, 1.0);
  CHECK(b.lower == doctest::Approx(1.0 / 1.5));
  CHECK(b.upper == doctest::Approx(2.0));

  const double mc_beta = mc_gbm_hit_time(1.0, kE, 2.0, 1.0, 4000, 1e-3, 12);
  // Var = 1 * 1 / 1.5^3
  CHECK(std::abs(mc_beta - b.lower) < 4.0 * std::sqrt(1.0 / 3.375 / 4000));

  const SectorBounds flat{1.0, 1.0, 10.0, 0.5};
  const TauBounds c = tau_sandwich(1.0, kE, flat, 1.0);
  CHECK(c.lower == c.upper);

  const TauBounds z = tau_sandwich(2.0, 2.0, sec, 1.0);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);
  CHECK_THROWS_AS(tau_sandwich(1.0, 11.0, sec, 1.0), DomainError);
}

TEST_CASE("timeout_bounds_at_k") {
  const SectorBounds sec{0.5, 1.0, 50.0, 0.375};
  const TauBounds b = timeout_bounds_at_k(40.0, 50.0, sec, 0.5);
  CHECK(b.lower == doctest::Approx(std::log(1.25) / 0.875));
  CHECK(b.upper == doctest::Approx(std::log(1.25) / 0.375));
  CHECK(b.lower == doctest::Approx(0.2550).epsilon(1e-3));
  CHECK(b.upper == doctest::Approx(0.5950).epsilon(1e-3));
  const TauBounds z = timeout_bounds_at_k(45.0, 45.0, sec, 0.5);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);
  CHECK_THROWS_AS(timeout_bounds_at_k(40.0, 50.0, sec, 1.0), MarginError);
}

TEST_CASE("asymptotic_interval") {
  const SectorBounds sec{0.5, 1.0, 50.0, 0.375};
  const AsymptoticInterval fq = asymptotic_interval({ConstantCurve{40}, ConstantCurve{50}}, sec, 0.5);
  CHECK(fq.a_beta == doctest::Approx(0.2550).epsilon(1e-3));
  CHECK(fq.a_alpha == doctest::Approx(0.5950).epsilon(1e-3));

  const AsymptoticInterval closure = asymptotic_interval({ClosureCurve{50, 0.5, 1}, ConstantCurve{50}}, sec, 0.5);
  CHECK(closure.a_beta == 0.0);
  CHECK(closure.a_alpha == 0.0);
  CHECK(closure.q_limit == closure.s_limit);

  // margins alpha - sigma^2/2 = 1 and beta - sigma^2/2 = 2
  const SectorBounds wide{1.5, 2.5, 10.0, 1.0};
  const AsymptoticInterval e = asymptotic_interval({ConstantCurve{5.0 / kE}, ConstantCurve{5.0}}, wide, 1.0);
  CHECK(e.a_beta == doctest::Approx(0.5));
  CHECK(e.a_alpha == doctest::Approx(1.0));

  const AsymptoticInterval tab =
      asymptotic_interval({TableCurve({0, 20}, {40, 30}), TableCurve({0, 20}, {45, 50})}, sec, 0.5);
  CHECK(tab.q_limit == 30.0);
  CHECK(tab.s_limit == 50.0);
}

TEST_CASE("printed fishery interval versus the general formula") {
  // r = 1, sigma = 0.5: printed a_beta uses 2/(r - sigma^2), general gives 2/(2r - sigma^2).
  const double ln = std::log(50.0 / 40.0);
  CHECK(printed_fishery_a_beta(1.0, 0.5, 50, 40) == doctest::Approx(2.0 / 0.75 * ln));
  const SectorBounds sec{0.5, 1.0, 50.0, 0.375};
  const AsymptoticInterval iv = asymptotic_interval({ConstantCurve{40}, ConstantCurve{50}}, sec, 0.5);
  CHECK(iv.a_beta == doctest::Approx(2.0 / 1.75 * ln));
  CHECK(printed_fishery_a_alpha(1.0, 100.0, 0.5, 50, 40) == doctest::Approx(iv.a_alpha));

  const double r = 1.7, sigma = 0.3;
  CHECK(printed_fishery_a_beta(r, sigma, 50, 40) != doctest::Approx(2.0 / (2 * r - sigma * sigma) * ln));
}

TEST_CASE("expected_hit_time properties on sampled parameters") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double sigma = u(rng);
    const double rate = 0.5 * sigma * sigma + u(rng);
    const double x0 = u(rng);
    const double level = x0 * (1.0 + u(rng));
    const double t = expected_hit_time(x0, level, rate, sigma);
    CHECK(t > 0.0);
    CHECK(expected_hit_time(x0, level, rate * 1.1, sigma) < t);
    CHECK(expected_hit_time(x0, level * 1.1, rate, sigma) > t);
    CHECK(expected_hit_time(x0 * 0.95, level, rate, sigma) > t);
    const double c = 10.0 * u(rng);
    CHECK(expected_hit_time(c * x0, c * level, rate, sigma) == doctest::Approx(t).epsilon(1e-12));

    const SectorBounds sec{rate, rate + u(rng), level * 2, 0.0};
    const TauBounds b = tau_sandwich(x0, level, sec, sigma);
    CHECK(b.lower < b.upper);

    const AsymptoticInterval iv = asymptotic_interval({ConstantCurve{x0}, ConstantCurve{level}}, sec, sigma);
    const TauBounds k = timeout_bounds_at_k(x0, level, sec, sigma);
    CHECK(iv.a_beta == k.lower);
    CHECK(iv.a_alpha == k.upper);
  }
}
