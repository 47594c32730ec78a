#include <doctest.h>

#include <memory>
#include <numbers>

#include "weakperf/content.hpp"
#include "../support/oracles.hpp"

using namespace weakperf;
using X = long double;
using G = GaugeFunction<X>;
using Pts = CantorPointSet<X>;
using Tree = DiscTree<Pts>;

namespace {

std::shared_ptr<const Tree> make_tree(const CantorLengths<X>& lengths, const G& h, X radius, int depth) {
  auto pts = std::make_shared<const Pts>(CantorIntervalSet<X>(lengths), false);
  return std::make_shared<const Tree>(build_disc_tree<Pts>(pts, 0, radius, h, 0.25L, depth));
}

std::shared_ptr<const Tree> u1_tree(int depth) {
  return make_tree(build_u1_lengths<X>(0.1L, 2, depth + 2), G::power(2, 0.9L), 0.05L, depth);
}

}  // namespace

TEST_CASE("level covers bound the interval content") {
  const CantorIntervalSet<X> set(build_u1_lengths<X>(0.1L, 2, 8));
  const auto g = G::plain_power(0.5L);
  const auto up = content_upper(set, g, 4096);
  for (int j = 0; j <= 8; ++j) CHECK(up.value <= content_upper_bound_levels(set, X(0.5L), j) * (1 + 1e-15L));
  CHECK(up.candidates_tried >= 10);
  CHECK(!up.cover.description.empty());
}

TEST_CASE("property: content upper bound is antitone in the budget") {
  const CantorIntervalSet<X> set(build_u1_lengths<X>(0.1L, 1.7L, 9));
  for (const auto& g : {G::plain_power(0.3L), G::plain_power(0.8L), G::log_gauge(1, 1, 0.5L)}) {
    X prev = std::numeric_limits<X>::infinity();
    for (std::size_t budget = 1; budget <= 20; ++budget) {
      const X v = content_upper(set, g, budget).value;
      CHECK(v <= prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(content_upper(set, G::plain_power(0.3L), 0), DomainError);
}

TEST_CASE("single point has content 0") {
  const PlanarSetSample<X> one({Point<X>(0.3L, 0.2L)}, 0.01L, 1);
  const auto up = content_upper(one, G::plain_power(0.5L), 10);
  CHECK(up.value == 0);
  CHECK(up.degenerate);
}

TEST_CASE("sample covers contain every sample point") {
  oracle::Gen gen(83);
  std::vector<Point<X>> pts;
  for (int i = 0; i < 40; ++i) pts.emplace_back(gen.uniform(0, 1), gen.uniform(0, 0.1L));
  const PlanarSetSample<X> s(pts, 0.01L);
  const auto up = content_upper(s, G::plain_power(0.5L), 1000);
  X total = 0;
  for (const auto& d : up.cover.discs) total += evaluate(monotone_extension(G::plain_power(0.5L)), 2 * d.radius);
  CHECK(total == doctest::Approx(double(up.value)).epsilon(1e-12));
  for (const auto& p : pts) {
    bool covered = false;
    for (const auto& d : up.cover.discs) covered = covered || length(Point<X>(p - d.center)) + 0.01L <= d.radius * (1 + 1e-12L);
    CHECK(covered);
  }
}

TEST_CASE("family search matches exhaustive subset enumeration") {
  oracle::Gen gen(89);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Disc<X>> targets, family;
    for (int i = 0; i < 6; ++i) targets.push_back(make_disc(make_point(gen.uniform(0, 1), gen.uniform(0, 1)), X(0.02L)));
    for (int i = 0; i < 12; ++i) {
      family.push_back(make_disc(make_point(gen.uniform(0, 1), gen.uniform(0, 1)), gen.uniform(0.05L, 0.8L)));
    }
    for (const auto& t : targets) family.push_back(make_disc(t.center, X(0.03L)));
    const auto g = G::plain_power(0.6L);
    const auto got = content_upper_over_family(targets, family, g);
    X best = std::numeric_limits<X>::infinity();
    for (std::uint32_t mask = 1; mask < (1u << family.size()); ++mask) {
      X cost = 0;
      for (std::size_t f = 0; f < family.size(); ++f) {
        if (mask >> f & 1u) cost += evaluate(g, 2 * family[f].radius);
      }
      if (cost >= best) continue;
      bool all = true;
      for (const auto& t : targets) {
        bool hit = false;
        for (std::size_t f = 0; f < family.size() && !hit; ++f) {
          hit = (mask >> f & 1u) && length(Point<X>(t.center - family[f].center)) + t.radius <= family[f].radius;
        }
        all = all && hit;
      }
      if (all) best = cost;
    }
    CHECK(got.value == doctest::Approx(double(best)).epsilon(1e-15));
  }
}

TEST_CASE("tree certificate on the u1 tree") {
  const auto tree = u1_tree(8);
  const auto est = content_forward_certificate(tree, 300, 5);
  CHECK(est.family == ContentFamily::u1);
  CHECK(est.exponent == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(est.certified);
  CHECK(est.lower <= est.upper);
  REQUIRE(est.content_gauge);
  CHECK(est.lower == doctest::Approx(double(evaluate(*est.content_gauge, 2 * X(0.05L)) / 18)).epsilon(1e-15));
}

TEST_CASE("alpha = 4 predicts exponent 1/2") {
  const auto tree = make_tree(build_u1_lengths<X>(0.1L, 4, 6), G::power(4, 0.9L), 0.05L, 3);
  const auto est = content_forward_certificate(tree, 50, 1);
  CHECK(est.exponent == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("u2 tree certificate") {
  const auto tree = make_tree(build_u2_lengths<X>(std::exp(-10.0L), 3, 10), G::log_power(3, 0.5L),
                              std::exp(-10.0L) / 2, 8);
  const auto est = content_forward_certificate(tree, 300, 7);
  CHECK(est.family == ContentFamily::u2);
  CHECK(est.scale >= 1);
  CHECK(est.exponent == doctest::Approx(double(std::log(X(2)) / (3 * est.scale))).epsilon(1e-15));
  CHECK(est.certified);
  CHECK(est.lower <= est.upper);
}

TEST_CASE("disc-mass validation") {
  const auto tree = u1_tree(8);
  MassDistribution<Pts> mu(tree);
  const X C2 = power_tree_scale<X>(0.9L, 2, 0.25L);
  const auto g = monotone_extension(G::log_gauge(1, C2, std::min(4 * X(0.05L), 1 / C2)));
  const auto good = validate_disc_mass_inequality(mu, g, X(18), 500, 3);
  CHECK(good.passed);
  CHECK(good.worst_ratio <= 18);
  const auto doubled = monotone_extension(G::log_gauge(2, C2, std::min(4 * X(0.05L), 1 / C2)));
  const auto bad = validate_disc_mass_inequality(mu, doubled, X(18), 500, 3);
  CHECK(bad.violations >= 1);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.witness);
  CHECK(bad.witness_mass > 0);
  CHECK_THROWS_AS(validate_disc_mass_inequality(MassDistribution<Pts>(u1_tree(2)), g, X(18), 10, 1), DomainError);
}

TEST_CASE("validation is reproducible from its seed") {
  const auto tree = u1_tree(6);
  MassDistribution<Pts> mu(tree);
  const auto g = monotone_extension(G::log_gauge(2, 1, 0.2L));
  const auto a = validate_disc_mass_inequality(mu, g, X(18), 200, 42);
  const auto b = validate_disc_mass_inequality(mu, g, X(18), 200, 42);
  CHECK(a.worst_ratio == b.worst_ratio);
  CHECK(a.violations == b.violations);
}

TEST_CASE("mass lower bound") {
  const auto tree = u1_tree(6);
  MassDistribution<Pts> mu(tree);
  const auto g = monotone_extension(G::log_gauge(1, 1, 0.2L));
  CHECK_THROWS_AS(mass_lower_bound(mu, g, nullptr), DomainError);
  const auto report = validate_disc_mass_inequality(mu, g, X(18), 200, 1);
  REQUIRE(report.passed);
  CHECK(mass_lower_bound(mu, g, &report) == doctest::Approx(double(evaluate(g, X(0.1L)) / 18)).epsilon(1e-15));
  CHECK_THROWS_AS(mass_lower_bound(mu, g, &report, X(10)), DomainError);
  // constant gauge: every disc costs the same, the bound is that constant over 18
  const auto flat = monotone_extension(G::plain_power(1, 3, 1e-1000L));
  const auto flat_report = validate_disc_mass_inequality(mu, flat, X(18), 100, 1);
  REQUIRE(flat_report.passed);
  CHECK(mass_lower_bound(mu, flat, &flat_report) / (3e-1000L / 18) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("converse probe") {
  const auto u1 = content_converse_probe<X>(ContentFamily::u1, 1, 1, 0.9L);
  CHECK(u1.exponent == 2);
  CHECK(u1.r1 > 0);
  // the right side tends to 1/alpha
  const X c = std::log(X(0.5L));
  const X L = u1.deepest_log_inv_r;
  CHECK((L + c) / (2 * L + c) == doctest::Approx(0.5).epsilon(1e-2));
  const auto one = content_converse_probe<X>(ContentFamily::u1, 1, 1, 1);
  CHECK(one.exponent == 2);
  const auto u2 = content_converse_probe<X>(ContentFamily::u2, 1, 1, 0.5L);
  CHECK(u2.exponent > 0);
  CHECK(u2.r1 > 0);
  CHECK(std::log(X(0.5L)) > converse_gap_u2(u2.deepest_log_inv_r, u2.exponent));
  CHECK_THROWS_AS(content_converse_probe<X>(ContentFamily::u2, 1, 1, 1e-300L, 0), DomainError);
  CHECK_THROWS_AS(content_converse_probe<X>(ContentFamily::u1, 1, 1, 0), DomainError);
}
