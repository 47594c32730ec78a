#include <doctest.h>

#include <numbers>

#include "weakperf/harmonic.hpp"
#include "../support/oracles.hpp"

using namespace weakperf;
using X = long double;
using Cap = CapacityProfile<X>;

namespace {
const X e = std::numbers::e_v<X>;

// integral of dt / (t log((t/kappa) / (2 Cap(t)))) by Simpson in u = log t
X integral_by_simpson(X z, X upper, X kappa, const Cap& cap) {
  return oracle::simpson(
      [&](X u) {
        const X t = std::exp(u);
        return 1 / std::log((t / kappa) / (2 * cap(t)));
      },
      std::log(z), std::log(upper), 20000);
}
}  // namespace

TEST_CASE("comparison function") {
  CHECK(annulus_comparison_phi<X>(0.1L, 10, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(annulus_comparison_phi<X>(0.5L, 2, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(annulus_comparison_phi<X>(0.5L, 2, 0.5L) == 0);
  CHECK(annulus_comparison_phi<X>(0.5L, 2, 2) == 1);
  CHECK_THROWS_AS(annulus_comparison_phi<X>(2, 1, 1.5L), DomainError);
  CHECK_THROWS_AS(annulus_comparison_phi<X>(1, 2, 3), DomainError);
}

TEST_CASE("property: phi is increasing and within [0, 1]") {
  oracle::Gen gen(73);
  for (int i = 0; i < 200; ++i) {
    const X a = gen.log_uniform(1e-6L, 1), b = a * gen.log_uniform(1.001L, 1e6L);
    const X s1 = gen.log_uniform(a, b), s2 = gen.log_uniform(a, b);
    const X p1 = annulus_comparison_phi(a, b, s1), p2 = annulus_comparison_phi(a, b, s2);
    CHECK(p1 >= 0);
    CHECK(p1 <= 1);
    if (s1 < s2) CHECK(p1 <= p2);
  }
}

TEST_CASE("phi is the harmonic measure: radial finite differences") {
  for (const auto& [a, b] : {std::pair<X, X>{0.1L, 1}, {0.5L, 2}, {0.01L, 0.05L}}) {
    const int n = 4000;
    const auto u = oracle::radial_harmonic_fd(a, b, n);
    const X h = (b - a) / (n + 1);
    X worst = 0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(u[i] - annulus_comparison_phi(a, b, a + h * (i + 1))));
    CHECK(worst < 1e-4L);
  }
}

TEST_CASE("delta condition limit ratios") {
  // phi at s = h(r) in (h'(r), r) tends to (a' - a)/(a' - 1) for powers, (b' - b)/b' for log powers
  const X r = 1e-12L;
  for (const auto& [alpha, alpha2] : {std::pair<X, X>{2, 3}, {1.5L, 4}}) {
    const auto h = GaugeFunction<X>::power(alpha);
    const X phi = delta_condition_probe(h, evaluate(GaugeFunction<X>::power(alpha2), r), r, X(0)).phi;
    CHECK(phi == doctest::Approx(double((alpha2 - alpha) / (alpha2 - 1))).epsilon(1e-6));
  }
  for (const auto& [beta, beta2] : {std::pair<X, X>{1, 3}, {2, 5}}) {
    const X L = std::log(1 / r);
    // s = r L^-b inside (r L^-b', r)
    const X phi = annulus_comparison_phi(r * std::pow(L, -beta2), r, r * std::pow(L, -beta));
    CHECK(phi == doctest::Approx(double((beta2 - beta) / beta2)).epsilon(1e-6));
    const auto h = GaugeFunction<X>::log_power(beta);
    const X inner = evaluate(GaugeFunction<X>::log_power(beta2), r);
    CHECK(delta_condition_probe(h, inner, r, X(0)).phi == doctest::Approx(double((beta2 - beta) / beta2)).epsilon(1e-6));
  }
  CHECK(delta_condition_probe(GaugeFunction<X>::power(2), X(1e-30L), X(1e-3L), X(0)).pass);
  CHECK_THROWS_AS(delta_condition_probe(GaugeFunction<X>::power(2), X(1), X(1e-3L), X(0)), DomainError);
}

TEST_CASE("integral bound against the antiderivative") {
  const auto cap = Cap::power_law(1, 1.5L, 1);
  const X kappa = 0.05L, r = 0.5L;
  const X upper = chen_upper_limit(kappa, r);
  for (X z : {1e-3L, 1e-6L, 1e-12L}) {
    const X q = chen_integral(z, upper, kappa, cap);
    CHECK(q == doctest::Approx(double(chen_integral_power_law_closed_form(z, upper, kappa, cap))).epsilon(1e-10));
    CHECK(q == doctest::Approx(double(integral_by_simpson(z, upper, kappa, cap))).epsilon(1e-8));
  }
  const auto logcap = Cap::log_corrected(1, 2, 0.5L);
  const X q = chen_integral(X(1e-8L), upper, kappa, logcap);
  CHECK(q == doctest::Approx(double(integral_by_simpson(1e-8L, upper, kappa, logcap))).epsilon(1e-8));
}

TEST_CASE("integral bound edge behavior") {
  const auto cap = Cap::power_law(1, 1.5L, 1);
  const X kappa = 0.05L, upper = chen_upper_limit(kappa, X(0.5L));
  CHECK(chen_upper_bound(upper, upper, kappa, cap).value == 1);
  X prev = 1;
  for (int k = 1; k <= 30; ++k) {
    const X z = upper * std::pow(X(2), -X(k));
    const X b = chen_upper_bound(z, upper, kappa, cap).value;
    CHECK(b < prev);
    prev = b;
  }
  CHECK_THROWS_AS(chen_integral(X(1e-3L), upper, X(0.1L), cap), DomainError);
  // a profile too large: log term nonpositive
  CHECK_THROWS_WITH_AS(chen_integral(X(1e-3L), upper, kappa, Cap::power_law(1000, 1, 1)),
                       "bound inapplicable: integrand nonpositive on the range", DomainError);
}

TEST_CASE("LHMD gauges") {
  CHECK(lhmd1_bound<X>(0.01L, 0.1L, 1, 1).value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lhmd1_bound<X>(0.1L, 0.1L, 1, 0.7L).value == doctest::Approx(0.7).epsilon(1e-15));
  const X r = std::exp(-X(3));
  CHECK(lhmd2_bound<X>(r, r, 1, 0.6L).value == doctest::Approx(0.6).epsilon(1e-15));
  const X rr = std::exp(-e * e), z = std::exp(-e * e * e);
  CHECK(lhmd2_bound<X>(z, rr, 1, 1).value == doctest::Approx(double(std::exp(-(e * e * e / 3 - e * e / 2)))).epsilon(1e-15));
  CHECK_THROWS_AS(lhmd1_bound<X>(0.5L, 1.0L, 1, 1), DomainError);
  CHECK_THROWS_AS(lhmd2_bound<X>(0.01L, 0.1L, 1, 1), DomainError);
  const auto clamped = lhmd1_bound<X>(0.05L, 0.1L, 1, 5);
  CHECK(clamped.value == 1);
  CHECK(clamped.clamped);
}

TEST_CASE("property: integral bound <= derived LHMD bound") {
  oracle::Gen gen(79);
  for (int trial = 0; trial < 10; ++trial) {
    const X alpha = gen.uniform(1.1L, 1.9L), kappa = gen.uniform(0.01L, 0.06L), r1 = gen.uniform(0.05L, 0.5L);
    const auto cap = Cap::power_law(gen.uniform(0.2L, 1), alpha, 1);
    const auto k = lhmd_constants(cap, kappa, r1);
    for (X r : {r1, r1 / 10, r1 / 100}) {
      const X upper = chen_upper_limit(kappa, r);
      for (int i = 1; i <= 8; ++i) {
        const X z = upper * std::pow(X(10), -X(i));
        CHECK(chen_upper_bound(z, upper, kappa, cap).value <= lhmd1_bound(z, r, k.exponent, k.c3).value * (1 + 1e-12L));
      }
    }
  }
  const X r1 = std::exp(-std::exp(X(2))) * 0.5L;
  const auto logcap = Cap::log_corrected(1, 2, 0.5L);
  const auto k2 = lhmd_constants(logcap, X(0.05L), r1);
  for (X r : {r1, r1 / 10}) {
    const X upper = chen_upper_limit(X(0.05L), r);
    for (int i = 1; i <= 6; ++i) {
      const X z = upper * std::pow(X(10), -X(i));
      CHECK(chen_upper_bound(z, upper, X(0.05L), logcap).value <= lhmd2_bound(z, r, k2.exponent, k2.c3).value * (1 + 1e-12L));
    }
  }
  CHECK_THROWS_AS(lhmd_constants(logcap, X(0.05L), X(0.01L)), DomainError);
}

TEST_CASE("level gap limit") {
  for (X beta : {1.0L, 3.0L, 10.0L}) {
    X prev = std::numeric_limits<X>::infinity();
    for (X r : {1e-8L, 1e-16L, 1e-32L, 1e-64L}) {
      const X I = log_power_level_gap(r, beta);
      CHECK(I < 0);
      CHECK(std::abs(I + beta) < prev);
      prev = std::abs(I + beta);
    }
    CHECK(prev / beta < 0.25L);
  }
  CHECK(log_power_level_gap(X(1e-10L), X(0)) == 0);
  CHECK_THROWS_AS(log_power_level_gap(X(0.5L), X(1)), DomainError);
}
