#include <doctest.h>

#include <memory>
#include <numbers>

#include "weakperf/cantor.hpp"
#include "../support/oracles.hpp"

using namespace weakperf;
using X = long double;
using G = GaugeFunction<X>;
using Pts = CantorPointSet<X>;

namespace {

std::shared_ptr<const Pts> u1_points(X l0, X alpha, int depth) {
  return std::make_shared<const Pts>(CantorIntervalSet<X>(build_u1_lengths<X>(l0, alpha, depth)), false);
}

std::shared_ptr<const DiscTree<Pts>> small_tree(int depth) {
  return std::make_shared<const DiscTree<Pts>>(
      build_disc_tree<Pts>(u1_points(0.1L, 2, 8), 0, 0.05L, G::power(2, 0.9L), 0.25L, depth));
}

}  // namespace

TEST_CASE("u1 lengths") {
  const auto l = build_u1_lengths<X>(0.1L, 2, 2);
  REQUIRE(l.value.size() == 3);
  CHECK(l.value[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(l.value[1] == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(l.value[2] == doctest::Approx(0.0001).epsilon(1e-15));
  CHECK(build_u1_lengths<X>(0.1L, 2, 0).value.size() == 1);
  CHECK_THROWS_AS(build_u1_lengths<X>(0.1L, 1, 3), DomainError);
  CHECK_THROWS_AS(build_u1_lengths<X>(0.9L, 1.05L, 3), ConstructionError);
}

TEST_CASE("property: log log of u1 lengths is affine with slope log alpha") {
  for (X alpha : {1.5L, 2.0L, 3.0L}) {
    const auto l = build_u1_lengths<X>(0.1L, alpha, 30);
    for (int j = 1; j <= 30; ++j) {
      CHECK(std::log(l.log_inv[j]) - std::log(l.log_inv[j - 1]) == doctest::Approx(double(std::log(alpha))).epsilon(1e-14));
    }
    CHECK(l.log_inv[30] > 1e4L);
  }
}

TEST_CASE("u2 lengths solve the implicit equation") {
  const X l0 = std::exp(-10.0L);
  const auto l = build_u2_lengths<X>(l0, 1, 12);
  // level 1 by bisection on y = 10 + log y over y = log 1/x
  const X y1 = oracle::bisect([](X y) { return y - 10 - std::log(y); }, 10 + std::log(X(2)), 100);
  CHECK(l.log_inv[1] == doctest::Approx(double(y1)).epsilon(1e-15));
  for (int j = 1; j <= 12; ++j) {
    const X x = l.value[j];
    const X residual = std::abs(x - l.value[j - 1] * std::pow(std::log(1 / x), X(-1))) / x;
    CHECK(residual < 1e-12L);
    CHECK(l.value[j] < l.value[j - 1] / 2);
  }
  for (X beta : {0.5L, 3.0L, 10.0L}) {
    const auto m = build_u2_lengths<X>(std::exp(-10.0L), beta, 20);
    for (int j = 1; j <= 20; ++j) {
      const X y = m.log_inv[j], Y = m.log_inv[j - 1];
      CHECK(std::abs(y - Y - beta * std::log(y)) / y < 1e-15L);
    }
  }
}

TEST_CASE("u2 level without a solution is a construction error") {
  // l0 near 1: log(1/l) small, the map y -> Y + beta log y has no root above Y + log 2
  CHECK_THROWS_AS(build_u2_lengths<X>(0.9L, 0.01L, 2), ConstructionError);
}

TEST_CASE("interval addressing") {
  const CantorIntervalSet<X> set(build_u1_lengths<X>(0.1L, 2, 4));
  const auto lefts = oracle::cantor_endpoints({0.1L, 0.01L, 1e-4L, 1e-8L, 1e-16L}, 3);
  for (std::uint64_t k = 0; k < 8; ++k) {
    const auto iv = set.interval(3, k);
    CHECK(iv.left == doctest::Approx(double(lefts[2 * k])).epsilon(1e-15));
  }
  CHECK_THROWS_AS(set.interval(3, 8), DomainError);
}

TEST_CASE("point displacements keep relative precision past coordinate resolution") {
  const auto pts = u1_points(0.1L, 2, 6);  // leaf length 1e-64
  const X leaf = pts->resolution() * 2;
  CHECK(pts->displacement(0, 1).x() == leaf);
  // the two leaves of one deepest pair
  CHECK(pts->displacement(0, 2).x() == doctest::Approx(double(1e-32L - 1e-64L + 0)).epsilon(1e-15));
  CHECK(pts->displacement(2, 0).x() == -pts->displacement(0, 2).x());
  const auto small = u1_points(0.1L, 2, 3);
  const auto ends = oracle::cantor_endpoints({0.1L, 0.01L, 1e-4L, 1e-8L}, 3);
  for (std::size_t i = 0; i < small->size(); ++i) {
    for (std::size_t j = 0; j < small->size(); ++j) {
      CHECK(small->displacement(i, j).x() == doctest::Approx(double(ends[j] - ends[i])).epsilon(1e-14));
    }
  }
}

TEST_CASE("double precision refuses levels below its range") {
  const CantorIntervalSet<double> set(build_u1_lengths<double>(0.1, 2, 10));
  CHECK_THROWS_AS(CantorPointSet<double>(set, false), ConstructionError);
}

TEST_CASE("disc tree of depth 3 has pairwise disjoint discs per level") {
  const auto tree = small_tree(3);
  CHECK(check_tree_structure(*tree).ok());
  for (int k = 1; k <= 3; ++k) {
    const auto first = DiscTree<Pts>::first_at_depth(k);
    const auto last = DiscTree<Pts>::first_at_depth(k + 1);
    for (auto i = first; i < last; ++i) {
      for (auto j = i + 1; j < last; ++j) {
        const X d = length(tree->relative_center(i, j));
        CHECK(d > tree->node(i).radius + tree->node(j).radius);
      }
    }
  }
}

TEST_CASE("disc tree edge cases") {
  const auto pts = u1_points(0.1L, 2, 6);
  const auto root_only = build_disc_tree<Pts>(pts, 0, 0.05L, G::power(2, 0.9L), 0.25L, 0);
  CHECK(root_only.size() == 1);
  CHECK(root_only.root().radius == 0.05L);
  CHECK_THROWS_AS(build_disc_tree<Pts>(pts, 0, 0.05L, G::power(2, 0.9L), 0.5L, 3), DomainError);
  CHECK_THROWS_AS(build_disc_tree<Pts>(pts, 0, 0.05L, G::power(2, 0.9L), 0.75L, 3), DomainError);
}

TEST_CASE("empty annulus stops the tree with its witness") {
  std::vector<Point<X>> pts{Point<X>::Zero()};
  for (int k = 0; k < 64; ++k) {
    const X th = 2 * std::numbers::pi_v<X> * k / 64;
    pts.emplace_back(std::cos(th), std::sin(th));
  }
  auto set = std::make_shared<const PlanarSetSample<X>>(pts, 0.05L, 2);
  try {
    build_disc_tree<PlanarSetSample<X>>(set, 0, 1.0L, G::power(1, 0.5L), 0.25L, 2);
    FAIL("expected a missing witness");
  } catch (const WitnessNotFound& e) {
    CHECK(e.level() == 0);
    CHECK(e.center_index() == 0);
    CHECK(e.inner() == doctest::Approx(0.25));
    CHECK(e.outer() == doctest::Approx(0.5));
  }
}

TEST_CASE("tree radii follow the iterated closed form") {
  const auto tree = std::make_shared<const DiscTree<Pts>>(
      build_disc_tree<Pts>(u1_points(0.1L, 2, 12), 0, 0.05L, G::power(2, 0.9L), 0.25L, 6));
  for (int k = 0; k <= 6; ++k) {
    const X closed = power_tree_radius<X>(0.9L, 2, 0.25L, 0.05L, k);
    CHECK(tree->radius_at_depth(k) == doctest::Approx(double(closed)).epsilon(1e-12));
  }
}

TEST_CASE("mass of discs") {
  const auto tree = small_tree(4);
  MassDistribution<Pts> mu(tree);
  const auto whole = mass_of_disc(mu, AnchoredDisc<X>{0, Point<X>::Zero(), 1});
  CHECK(whole.lo == 1);
  CHECK(whole.hi == 1);
  const auto node = DiscTree<Pts>::first_at_depth(2) + 1;
  const auto exact = mass_of_disc(mu, AnchoredDisc<X>{node, Point<X>::Zero(), tree->node(node).radius});
  CHECK(exact.lo <= 0.25L);
  CHECK(exact.hi >= 0.25L);
  const auto inflated =
      mass_of_disc(mu, AnchoredDisc<X>{node, Point<X>::Zero(), tree->node(node).radius * (1 + 1e-6L)});
  CHECK(inflated.lo == 0.25L);
  CHECK(inflated.hi == 0.25L);
  const auto far = mass_of_disc(mu, AnchoredDisc<X>{0, Point<X>(10, 10), 1});
  CHECK(far.lo == 0);
  CHECK(far.hi == 0);
  CHECK_THROWS_AS(mass_of_disc(mu, AnchoredDisc<X>{0, Point<X>::Zero(), 0}), DomainError);
}

TEST_CASE("property: additivity over every node") {
  const auto tree = small_tree(6);
  MassDistribution<Pts> mu(tree);
  for (std::size_t i = 0; i < tree->size(); ++i) {
    const auto m = mass_of_disc(mu, AnchoredDisc<X>{i, Point<X>::Zero(), tree->node(i).radius * (1 + 1e-6L)});
    CHECK(m.lo == mu.mass(i));
    CHECK(m.hi == mu.mass(i));
    if (!tree->is_leaf(i)) CHECK(mu.mass(2 * i + 1) + mu.mass(2 * i + 2) == mu.mass(i));
  }
}

TEST_CASE("property: certified mass brackets the exhaustive leaf count") {
  const auto tree = small_tree(6);
  MassDistribution<Pts> mu(tree);
  const auto first = DiscTree<Pts>::first_at_depth(6);
  const X leaf_mass = std::ldexp(X(1), -6);
  oracle::Gen gen(29);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t anchor = first + gen.index(64);
    const X rho = gen.log_uniform(tree->radius_at_depth(6) / 4, 0.2L);
    const Point<X> off(gen.uniform(-rho, rho), gen.uniform(-rho, rho));
    const auto m = mass_of_disc(mu, AnchoredDisc<X>{anchor, off, rho});
    X inside = 0, meets = 0;
    for (std::size_t i = first; i < tree->size(); ++i) {
      const X d = length(Point<X>(tree->relative_center(anchor, i) - off));
      const X rad = tree->node(i).radius;
      const X margin = 1e-12L * (rho + d + rad);
      if (d + rad <= rho - margin) inside += leaf_mass;
      if (d - rad <= rho + margin) meets += leaf_mass;
    }
    CHECK(m.lo <= m.hi);
    CHECK(inside <= m.lo);
    CHECK(m.hi <= meets);
  }
}

TEST_CASE("level cover costs") {
  const CantorIntervalSet<X> set(build_u1_lengths<X>(0.1L, 2, 10));
  CHECK(content_upper_bound_levels(set, X(1), 2) == doctest::Approx(0.0004).epsilon(1e-14));
  const X deep = content_upper_bound_levels(set, X(0.01L), 10);
  CHECK(deep == doctest::Approx(double(1024 * std::pow(X(10), -0.01L * 1024))).epsilon(1e-14));
  CHECK(deep == doctest::Approx(5.9e-8).epsilon(0.01));
  CHECK(content_upper_bound_levels(set, X(0.3L), 0) == doctest::Approx(double(std::pow(0.1L, 0.3L))).epsilon(1e-15));
  CHECK_THROWS_AS(content_upper_bound_levels(set, X(1), 11), DomainError);
}

TEST_CASE("property: level costs eventually decrease to 0 for every positive exponent") {
  const CantorIntervalSet<X> set(build_u1_lengths<X>(0.1L, 2, 40));
  for (X gamma : {1.0L, 0.1L, 0.01L, 0.001L}) {
    int j = 0;
    while (j < 39 && content_upper_bound_levels(set, gamma, j + 1) >= content_upper_bound_levels(set, gamma, j)) ++j;
    // once decreasing the costs keep decreasing until they underflow
    for (int k = j; k < 40 && content_upper_bound_levels(set, gamma, k + 1) > 0; ++k) {
      CHECK(content_upper_bound_levels(set, gamma, k + 1) < content_upper_bound_levels(set, gamma, k));
    }
    CHECK(content_upper_bound_levels(set, gamma, 40) < 1e-100L);
  }
}
