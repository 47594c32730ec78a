#include <doctest.h>

#include <numbers>

#include "weakperf/gauges.hpp"
#include "../support/oracles.hpp"

using namespace weakperf;
using X = long double;
using G = GaugeFunction<X>;

namespace {

const X e = std::numbers::e_v<X>;

// h^{-1}(t) for h = C t (log 1/t)^-beta by bisection on (0, 1/e).
X inverse_by_bisection(const G& h, X t) {
  return oracle::bisect([&](X x) { return std::log(h.closed_form(x)) - std::log(t); }, 1e-4000L, 1 / e - 1e-18L,
                        2000);
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(evaluate(G::power(2), 0.1L) == doctest::Approx(0.01).epsilon(1e-15));
  const auto h2 = G::log_power(1);
  CHECK(evaluate(h2, h2.cap()) == doctest::Approx(double(1 / e)).epsilon(1e-15));
  const auto g2 = G::log_log_gauge(1, 4 * std::exp(-e));
  const X t = 2 / std::exp(X(4));
  CHECK(evaluate(g2, t) == doctest::Approx(double(std::exp(-4 / std::log(4 + std::log(X(2)))))).epsilon(1e-15));
  const auto g1 = G::log_gauge(1, 1, 0.5L);
  CHECK(evaluate(g1, 0.1L) == doctest::Approx(double(1 / std::log(X(20)))).epsilon(1e-15));
  CHECK(evaluate(G::plain_power(0.5L), 0.25L) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(evaluate(G::power(2), -1.0L), DomainError);
  CHECK(evaluate(G::power(2), 0.0L) == 0);
  CHECK_THROWS_AS(evaluate(G::log_power(1), 0.5L), DomainError);
  CHECK_THROWS_AS(G::power(0.5L), DomainError);
  CHECK_THROWS_AS(G::log_power(0), DomainError);
  CHECK_THROWS_AS(G::log_gauge(1, 1, 3), DomainError);
  CHECK_THROWS_AS(G::log_log_gauge(1, 0.5L), DomainError);
}

TEST_CASE("inverse upper bound") {
  const auto h = G::log_power(1);
  const auto b = inverse_upper_bound(h, std::exp(-2.0L));
  CHECK(b.value == doctest::Approx(0.270671).epsilon(1e-6));
  CHECK(inverse_by_bisection(h, std::exp(-2.0L)) <= b.value);
  const auto h2 = G::log_power(2, 0.5L);
  const auto b2 = inverse_upper_bound(h2, std::exp(-4.0L));
  CHECK(b2.value == doctest::Approx(double(2 * std::exp(-4.0L) * 16)).epsilon(1e-15));
  CHECK(b2.value == doctest::Approx(0.586).epsilon(1e-3));
  CHECK(inverse_by_bisection(h2, std::exp(-4.0L)) <= b2.value);
  CHECK_THROWS_AS(inverse_upper_bound(h, 1.0L), DomainError);
  CHECK_THROWS_AS(inverse_upper_bound(G::power(2), 0.1L), DomainError);
}

TEST_CASE("property: inverse bound dominates the bisection inverse") {
  oracle::Gen gen(23);
  for (const auto& h : {G::log_power(1), G::log_power(2, 0.5L), G::log_power(3, 2)}) {
    const X threshold = inverse_upper_bound(h, 1e-30L).threshold;
    for (int i = 0; i < 100; ++i) {
      const X t = gen.log_uniform(1e-300L, threshold);
      CHECK(inverse_by_bisection(h, t) <= inverse_upper_bound(h, t).value * (1 + 1e-15L));
    }
  }
}

TEST_CASE("monotone extension") {
  const auto g = monotone_extension(G::log_gauge(1, 1, 0.5L));
  CHECK(evaluate(g, 5.0L) >= evaluate(g, 0.5L));
  CHECK(evaluate(g, 0.5L) == g.closed_form(0.5L));
  CHECK(evaluate(g, 0.5L * (1 - 1e-15L)) == doctest::Approx(double(evaluate(g, 0.5L))).epsilon(1e-14));
  CHECK(evaluate(g, 0.25L) == G::log_gauge(1, 1, 0.5L).closed_form(0.25L));
}

TEST_CASE("property: strict monotonicity on a geometric grid below the cap") {
  const std::vector<G> gauges{G::power(2, 1, 1), G::log_power(1), G::log_power(3, 0.5L),
                              G::log_gauge(1, 1, 0.5L), G::log_log_gauge(0.7L, 4 * std::exp(-e)),
                              G::plain_power(0.3L, 1, 1)};
  for (const auto& g : gauges) {
    CAPTURE(g.literal());
    X prev = evaluate(g, g.cap() * std::ldexp(X(1), -41));
    for (int k = 40; k >= 1; --k) {
      const X v = evaluate(g, g.cap() * std::ldexp(X(1), -k));
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("property: h2(t)/t decreases toward 0") {
  for (X beta : {0.5L, 1.0L, 3.0L}) {
    const auto h = G::log_power(beta);
    X prev = std::numeric_limits<X>::infinity();
    for (int k = 1; k <= 200; ++k) {
      const X t = h.cap() * std::ldexp(X(1), -k);
      const X ratio = evaluate(h, t) / t;
      CHECK(ratio < prev);
      prev = ratio;
    }
    CHECK(prev < 0.2L);
  }
}

TEST_CASE("property: content gauges vanish at 0") {
  const auto g1 = G::log_gauge(0.5L, 1, 0.5L);
  const auto g2 = G::log_log_gauge(0.5L, 4 * std::exp(-e));
  CHECK(evaluate_at_log_inverse(g1, X(1e8)) < 1e-3L);
  CHECK(evaluate_at_log_inverse(g2, X(1e8)) < 1e-3L);
  CHECK(evaluate(g1, X(1e-4000L)) < evaluate(g1, X(1e-100L)));
}

TEST_CASE("evaluation past underflow agrees with direct evaluation") {
  for (const auto& g : {G::power(2), G::log_power(2), G::log_gauge(1, 3, 0.5L), G::log_log_gauge(1, 0.25L)}) {
    CAPTURE(g.literal());
    const X L = 50;
    CHECK(evaluate_at_log_inverse(g, L) == doctest::Approx(double(evaluate(g, std::exp(-L)))).epsilon(1e-15));
  }
}

TEST_CASE("literals round trip") {
  const std::vector<G> gauges{G::power(2, 0.3L), G::log_power(3, 0.5L), G::log_gauge(1.25L, 0.7L, 0.25L),
                              G::log_log_gauge(0.7L, 4 * std::exp(-e)), monotone_extension(G::plain_power(0.5L))};
  for (const auto& g : gauges) {
    const auto back = parse_gauge<X>(g.literal());
    CHECK(back.literal() == g.literal());
    CHECK(back.kind() == g.kind());
    CHECK(back.exponent() == g.exponent());
    CHECK(back.coefficient() == g.coefficient());
    CHECK(back.cap() == g.cap());
    CHECK(back.extended() == g.extended());
  }
  CHECK_THROWS_AS(parse_gauge<X>("h1"), ConfigError);
  CHECK_THROWS_AS(parse_gauge<X>("h9:alpha=2"), ConfigError);
  CHECK_THROWS_AS(parse_gauge<X>("h1:alpha=two"), ConfigError);
  CHECK_THROWS_AS(parse_gauge<X>("h1:alpha=2,zeta=1"), ConfigError);
  CHECK_THROWS_AS(parse_gauge<X>("h1:alpha=0.5"), ConfigError);
}

TEST_CASE("identity threshold") {
  const auto h = G::power(2, 4);
  const X t = below_identity_threshold(h);
  CHECK(t == doctest::Approx(0.25));
  CHECK(evaluate(h, t * 0.99L) <= t * 0.99L);
}
