#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "weakperf/cantor.hpp"
#include "weakperf/errors.hpp"
#include "weakperf/gauges.hpp"
#include "weakperf/geometry.hpp"

namespace weakperf {

template <typename Scalar>
struct Cover {
  std::vector<Disc<Scalar>> discs;  // empty when too many to list
  std::size_t disc_count = 0;
  std::string description;
};

template <typename Scalar>
struct ContentUpper {
  Scalar value = std::numeric_limits<Scalar>::infinity();
  Cover<Scalar> cover;
  std::size_t candidates_tried = 0;
  bool degenerate = false;  // single point: the infimum is 0
};

inline constexpr std::size_t kListedDiscLimit = 4096;

namespace detail {

template <typename Scalar>
void offer(ContentUpper<Scalar>& best, Scalar value, const std::function<Cover<Scalar>()>& make) {
  ++best.candidates_tried;
  if (value < best.value) {
    best.value = value;
    best.cover = make();
  }
}

// Smallest disc containing two discs.
template <typename Scalar>
Disc<Scalar> enclosing_disc(const Disc<Scalar>& a, const Disc<Scalar>& b) {
  const Scalar d = length(Point<Scalar>(b.center - a.center));
  if (d + b.radius <= a.radius) return a;
  if (d + a.radius <= b.radius) return b;
  const Scalar R = (d + a.radius + b.radius) / 2;
  const Point<Scalar> c = a.center + (b.center - a.center) * ((R - a.radius) / d);
  return {c, R, true};
}

template <typename Scalar>
bool disc_covers(const Disc<Scalar>& outer, const Disc<Scalar>& inner) {
  return length(Point<Scalar>(inner.center - outer.center)) + inner.radius <= outer.radius;
}

}  // namespace detail

/// diam = 2 rad in every conversion.
template <typename Scalar>
Scalar disc_cost(const GaugeFunction<Scalar>& g, const Disc<Scalar>& d) {
  return evaluate(g, 2 * d.radius);
}

/// Best cover among a deterministic candidate sequence: the single disc, the
/// level covers j = 0..depth, then greedy merging of deepest-level intervals.
/// Only the first `budget` candidates are evaluated, so the value is antitone
/// in the budget. The gauge is used with its monotone extension.
template <typename Scalar>
ContentUpper<Scalar> content_upper(const CantorIntervalSet<Scalar>& set, const GaugeFunction<Scalar>& gauge,
                                   std::size_t budget) {
  if (budget < 1) throw DomainError("budget must be at least 1");
  const auto g = monotone_extension(gauge);
  ContentUpper<Scalar> best;
  const Scalar l0 = set.length(0);
  detail::offer<Scalar>(best, evaluate(g, l0), [&] {
    return Cover<Scalar>{{make_disc(make_point(l0 / 2, Scalar(0)), l0 / 2)}, 1, "single disc"};
  });
  for (int j = 0; j <= set.depth() && best.candidates_tried < budget; ++j) {
    const Scalar value = std::ldexp(evaluate_at_log_inverse(g, set.log_inv_length(j)), j);
    detail::offer<Scalar>(best, value, [&] {
      Cover<Scalar> c;
      c.disc_count = std::size_t(1) << j;
      c.description = "level " + std::to_string(j) + " intervals";
      if (c.disc_count <= kListedDiscLimit && set.lengths().representable(j)) {
        for (std::uint64_t k = 0; k < set.interval_count(j); ++k) {
          const auto iv = set.interval(j, k);
          c.discs.push_back(make_disc(make_point(iv.left + iv.length / 2, Scalar(0)), iv.length / 2));
        }
      }
      return c;
    });
  }
  if (best.candidates_tried >= budget) return best;

  // greedy merging of adjacent clusters of leaves, largest saving first
  int J = set.depth();
  while (J > 0 && ((std::size_t(1) << J) > kListedDiscLimit || !set.lengths().representable(J))) --J;
  CantorIntervalSet<Scalar> truncated(CantorLengths<Scalar>{
      std::vector<Scalar>(set.lengths().value.begin(), set.lengths().value.begin() + J + 1),
      std::vector<Scalar>(set.lengths().log_inv.begin(), set.lengths().log_inv.begin() + J + 1)});
  const CantorPointSet<Scalar> pts(truncated, false);
  struct Cluster {
    std::size_t first, last;  // leaf range
    Scalar cost;
  };
  const auto extent = [&](std::size_t a, std::size_t b) { return pts.displacement(2 * a, 2 * b + 1).x(); };
  std::vector<Cluster> clusters;
  for (std::size_t k = 0; k < (std::size_t(1) << J); ++k) clusters.push_back({k, k, evaluate(g, extent(k, k))});
  while (clusters.size() > 1) {
    Scalar best_saving = 0;
    std::size_t at = clusters.size();
    for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
      const Scalar merged = evaluate(g, extent(clusters[i].first, clusters[i + 1].last));
      const Scalar saving = clusters[i].cost + clusters[i + 1].cost - merged;
      if (saving > best_saving) {
        best_saving = saving;
        at = i;
      }
    }
    if (at == clusters.size()) break;
    clusters[at] = {clusters[at].first, clusters[at + 1].last,
                    evaluate(g, extent(clusters[at].first, clusters[at + 1].last))};
    clusters.erase(clusters.begin() + at + 1);
  }
  CompensatedSum<Scalar> total;
  for (const auto& c : clusters) total.add(c.cost);
  detail::offer<Scalar>(best, total.value(), [&] {
    Cover<Scalar> c;
    c.disc_count = clusters.size();
    c.description = "greedy merge of level " + std::to_string(J) + " intervals";
    for (const auto& cl : clusters) {
      const Scalar left = pts.point(2 * cl.first).x();
      const Scalar diam = extent(cl.first, cl.last);
      c.discs.push_back(make_disc(make_point(left + diam / 2, Scalar(0)), diam / 2));
    }
    return c;
  });
  return best;
}

/// Sample version: the single disc, one resolution disc per point, then
/// greedy pairwise merging into enclosing discs (up to 256 points). Covers
/// the resolution-inflated sample, so they cover the underlying set.
template <typename Scalar>
ContentUpper<Scalar> content_upper(const PlanarSetSample<Scalar>& set, const GaugeFunction<Scalar>& gauge,
                                   std::size_t budget) {
  if (budget < 1) throw DomainError("budget must be at least 1");
  const auto g = monotone_extension(gauge);
  ContentUpper<Scalar> best;
  if (set.size() == 1) {
    best.value = 0;
    best.degenerate = true;
    best.candidates_tried = 1;
    best.cover = {{}, 0, "single point: infimum 0 over shrinking discs"};
    return best;
  }
  const auto& pts = set.points();
  Point<Scalar> centroid = Point<Scalar>::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= Scalar(pts.size());
  Scalar reach = 0;
  for (const auto& p : pts) reach = std::max(reach, length(Point<Scalar>(p - centroid)));
  const Disc<Scalar> whole = make_disc(centroid, reach + set.resolution());
  detail::offer<Scalar>(best, disc_cost(g, whole), [&] { return Cover<Scalar>{{whole}, 1, "single disc"}; });
  if (best.candidates_tried >= budget) return best;

  std::vector<Disc<Scalar>> discs;
  for (const auto& p : pts) discs.push_back(make_disc(p, set.resolution()));
  detail::offer<Scalar>(best, Scalar(pts.size()) * evaluate(g, 2 * set.resolution()),
                        [&] { return Cover<Scalar>{discs, discs.size(), "resolution discs"}; });
  if (best.candidates_tried >= budget || pts.size() > 256) return best;

  while (discs.size() > 1) {
    Scalar best_saving = 0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < discs.size(); ++i) {
      for (std::size_t j = i + 1; j < discs.size(); ++j) {
        const Scalar saving = disc_cost(g, discs[i]) + disc_cost(g, discs[j]) -
                              disc_cost(g, detail::enclosing_disc(discs[i], discs[j]));
        if (saving > best_saving) {
          best_saving = saving;
          bi = i;
          bj = j;
        }
      }
    }
    if (!(best_saving > 0)) break;
    discs[bi] = detail::enclosing_disc(discs[bi], discs[bj]);
    discs.erase(discs.begin() + bj);
  }
  CompensatedSum<Scalar> total;
  for (const auto& d : discs) total.add(disc_cost(g, d));
  detail::offer<Scalar>(best, total.value(),
                        [&] { return Cover<Scalar>{discs, discs.size(), "greedy merge of resolution discs"}; });
  return best;
}

template <typename Scalar>
struct FamilyCover {
  Scalar value = std::numeric_limits<Scalar>::infinity();
  std::vector<std::size_t> chosen;  // indices into the family
};

/// Exact minimum of sum g(diam) over subfamilies covering every target disc,
/// by branch and bound.
template <typename Scalar>
FamilyCover<Scalar> content_upper_over_family(const std::vector<Disc<Scalar>>& targets,
                                              const std::vector<Disc<Scalar>>& family,
                                              const GaugeFunction<Scalar>& gauge) {
  if (targets.size() > 16 || family.size() > 24) throw DomainError("family search limited to 16 targets, 24 discs");
  const auto g = monotone_extension(gauge);
  std::vector<Scalar> cost;
  std::vector<std::uint32_t> covers(family.size(), 0);
  for (std::size_t f = 0; f < family.size(); ++f) {
    cost.push_back(disc_cost(g, family[f]));
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (detail::disc_covers(family[f], targets[t])) covers[f] |= 1u << t;
    }
  }
  const std::uint32_t all = targets.size() == 32 ? ~0u : (1u << targets.size()) - 1;
  FamilyCover<Scalar> best;
  std::vector<std::size_t> stack;
  std::function<void(std::uint32_t, Scalar)> search = [&](std::uint32_t done, Scalar spent) {
    if (spent >= best.value) return;
    if (done == all) {
      best.value = spent;
      best.chosen = stack;
      return;
    }
    const int t = std::countr_one(done);
    for (std::size_t f = 0; f < family.size(); ++f) {
      if (!((covers[f] >> t) & 1u)) continue;
      stack.push_back(f);
      search(done | covers[f], spent + cost[f]);
      stack.pop_back();
    }
  };
  search(0, 0);
  std::sort(best.chosen.begin(), best.chosen.end());
  return best;
}

/// Upper bound from the tree itself: the 2^k discs at depth k cover the
/// support of mu, for each k.
template <PointSet Set>
ContentUpper<typename Set::scalar_type> tree_content_upper(const DiscTree<Set>& tree,
                                                           const GaugeFunction<typename Set::scalar_type>& gauge) {
  using Scalar = typename Set::scalar_type;
  const auto g = monotone_extension(gauge);
  ContentUpper<Scalar> best;
  for (int k = 0; k <= tree.depth(); ++k) {
    const Scalar value = std::ldexp(evaluate(g, 2 * tree.radius_at_depth(k)), k);
    detail::offer<Scalar>(best, value, [&] {
      return Cover<Scalar>{{}, std::size_t(1) << k, "tree discs at depth " + std::to_string(k)};
    });
  }
  return best;
}

template <typename Scalar>
struct DiscMassReport {
  std::string gauge;
  Scalar factor = 18;
  Scalar root_radius = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t violations = 0;
  // max over trials of mu_hi(A) * g(2r) / g(2 rho): the smallest factor that passes
  Scalar worst_ratio = 0;
  bool passed = false;
  std::optional<AnchoredDisc<Scalar>> witness;
  Scalar witness_mass = 0;
};

namespace detail {

inline double unit_draw(std::mt19937_64& rng) { return std::ldexp(double(rng() >> 11), -53); }

}  // namespace detail

/// Random closed discs A = B(x, rho), rho log-uniform in [deepest radius,
/// 2 root radius], x within rho of the center of a random leaf, so every disc
/// carries mass. Checks mu_hi(A) <= factor g(2 rho) / g(2 r).
/// Trial i draws from mt19937_64 seeded with seed_seq{seed, i}.
template <PointSet Set>
DiscMassReport<typename Set::scalar_type> validate_disc_mass_inequality(
    const MassDistribution<Set>& mu, const GaugeFunction<typename Set::scalar_type>& gauge,
    typename Set::scalar_type factor, std::size_t trials, std::uint64_t seed) {
  using Scalar = typename Set::scalar_type;
  const auto& tree = mu.tree();
  if (tree.depth() < 3) throw DomainError("validation needs tree depth >= 3");
  if (!(factor >= 1)) throw DomainError("factor must be at least 1");
  const auto g = monotone_extension(gauge);
  DiscMassReport<Scalar> report;
  report.gauge = gauge.literal();
  report.factor = factor;
  report.root_radius = tree.root().radius;
  report.trials = trials;
  report.seed = seed;
  const Scalar r = tree.root().radius;
  const Scalar g_root = evaluate(g, 2 * r);
  const Scalar log_lo = std::log(tree.radius_at_depth(tree.depth()));
  const Scalar log_hi = std::log(2 * r);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::seed_seq seq{std::uint64_t(seed), std::uint64_t(trial)};
    std::mt19937_64 rng(seq);
    const Scalar rho = std::exp(log_lo + Scalar(detail::unit_draw(rng)) * (log_hi - log_lo));
    const std::size_t count = std::size_t(1) << tree.depth();
    const std::size_t pick = std::min(count - 1, std::size_t(detail::unit_draw(rng) * double(count)));
    const std::size_t anchor = DiscTree<Set>::first_at_depth(tree.depth()) + pick;
    const Scalar theta = 2 * pi_v<Scalar> * Scalar(detail::unit_draw(rng));
    const Scalar reach = Scalar(detail::unit_draw(rng)) * rho;
    const AnchoredDisc<Scalar> q{anchor, Point<Scalar>(reach * std::cos(theta), reach * std::sin(theta)), rho};
    const auto m = mass_of_disc(mu, q);
    const Scalar ratio = m.hi * g_root / evaluate(g, 2 * rho);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
    if (ratio > factor) {
      if (report.violations == 0) {
        report.witness = q;
        report.witness_mass = m.hi;
      }
      ++report.violations;
    }
  }
  report.passed = trials > 0 && report.violations == 0;
  return report;
}

/// (1/factor) g(2r) for the root radius r; needs a passing validation of the
/// same gauge with a factor no larger than this one.
template <PointSet Set>
typename Set::scalar_type mass_lower_bound(const MassDistribution<Set>& mu,
                                           const GaugeFunction<typename Set::scalar_type>& gauge,
                                           const DiscMassReport<typename Set::scalar_type>* validation,
                                           typename Set::scalar_type factor = 18) {
  if (validation == nullptr) throw DomainError("disc-mass inequality not validated");
  if (!validation->passed) throw DomainError("disc-mass validation did not pass");
  if (validation->gauge != gauge.literal()) throw DomainError("validation was run with a different gauge");
  if (validation->root_radius != mu.tree().root().radius) throw DomainError("validation was run on another tree");
  if (!(factor >= validation->factor)) throw DomainError("factor below the validated one");
  return evaluate(monotone_extension(gauge), 2 * mu.tree().root().radius) / factor;
}

enum class ContentFamily { u1, u2 };

template <typename Scalar>
struct ContentEstimate {
  ContentFamily family = ContentFamily::u1;
  std::string gauge;
  std::optional<GaugeFunction<Scalar>> content_gauge;
  std::string convention;
  Scalar exponent = 0;  // gamma (U1) or eta (U2)
  Scalar scale = 0;     // C2 (U1) or C1 (U2)
  Scalar upper = 0;
  std::string upper_cover;
  Scalar lower = 0;
  bool certified = false;
  DiscMassReport<Scalar> validation;
};

/// log(1/t) / log log(2/t), the scale along which U2 radii advance by ~beta.
template <typename Scalar>
Scalar u2_scale(Scalar t) {
  return std::log(1 / t) / std::log(std::log(2 / t));
}

/// Lower bound on the content of the tree's limit set with the gauge the
/// construction predicts. U1 (h = C0 t^alpha): gamma = log 2 / log alpha and
/// scale C2 of the iterated radii. U2 (h = C0 t (log 1/t)^-beta): C1 is the
/// tightest constant in beta k / C1 <= S(s_k) - S(r) <= C1 beta k over the
/// tree's radii, and eta = log 2 / (C1 beta).
template <PointSet Set>
ContentEstimate<typename Set::scalar_type> content_forward_certificate(
    std::shared_ptr<const DiscTree<Set>> tree, std::size_t trials = 1000, std::uint64_t seed = 20240611,
    typename Set::scalar_type factor = 18) {
  using Scalar = typename Set::scalar_type;
  const auto& h = tree->gauge();
  const Scalar r = tree->root().radius;
  ContentEstimate<Scalar> est;
  std::optional<GaugeFunction<Scalar>> g;
  if (h.kind() == GaugeKind::power && h.exponent() > 1) {
    est.family = ContentFamily::u1;
    const Scalar alpha = h.exponent();
    est.exponent = std::log(Scalar(2)) / std::log(alpha);
    est.scale = power_tree_scale(h.coefficient(), alpha, tree->c_tilde());
    if (!(est.scale * r < 1)) throw DomainError("C2 r must be below 1");
    g = GaugeFunction<Scalar>::log_gauge(est.exponent, est.scale, std::min(4 * r, 1 / est.scale));
    est.convention = "g(t) = (log(2/(C2 t)))^-gamma; statement form (log(1/(C t)))^-gamma with C = C2/2";
  } else if (h.kind() == GaugeKind::log_power) {
    est.family = ContentFamily::u2;
    const Scalar beta = h.exponent();
    Scalar c1 = 1;
    for (int k = 1; k <= tree->depth(); ++k) {
      const Scalar D = u2_scale(tree->radius_at_depth(k)) - u2_scale(r);
      const Scalar bk = beta * Scalar(k);
      c1 = std::max({c1, D / bk, bk / D});
    }
    est.scale = c1;
    est.exponent = std::log(Scalar(2)) / (c1 * beta);
    g = GaugeFunction<Scalar>::log_log_gauge(est.exponent, 4 * std::exp(-std::numbers::e_v<Scalar>));
    est.convention = "g(t) = exp(-eta log(2/t) / log log(4/t)), frozen above 4 e^-e";
  } else {
    throw DomainError("forward certificate needs a tree built from h1 (alpha > 1) or h2");
  }
  const auto gauge = monotone_extension(*g);
  est.gauge = gauge.literal();
  est.content_gauge = gauge;
  MassDistribution<Set> mu(tree);
  est.validation = validate_disc_mass_inequality(mu, gauge, factor, trials, seed);
  const auto up = tree_content_upper(*tree, gauge);
  est.upper = up.value;
  est.upper_cover = up.cover.description;
  if (est.validation.passed) {
    est.lower = mass_lower_bound(mu, gauge, &est.validation, factor);
    est.certified = true;
  }
  return est;
}

template <typename Scalar>
struct ConverseResult {
  Scalar exponent = 0;  // alpha (U1) or beta (U2)
  Scalar r1 = 0;
  Scalar deepest_log_inv_r = 0;  // log(1/r) at the smallest grid radius
  std::size_t grid_points = 0;
  std::vector<Scalar> rejected;
};

/// U1 claim at L = log 1/r: A > ((L + log(1/(2C))) / (alpha L + log(1/(2C))))^gamma.
template <typename Scalar>
bool converse_claim_u1(Scalar L, Scalar alpha, Scalar gamma, Scalar C, Scalar A) {
  const Scalar c = std::log(1 / (2 * C));
  const Scalar num = L + c;
  const Scalar den = alpha * L + c;
  if (!(num > 0 && den > 0)) return false;
  return A > std::pow(num / den, gamma);
}

/// U2 claim: log(A)/eta > S(r) - S(r (log 1/r)^-beta) with
/// S(t) = log(2/t) / log log(4/t).
template <typename Scalar>
Scalar converse_gap_u2(Scalar L, Scalar beta) {
  const Scalar ll = std::log(L);
  const Scalar l2 = L + std::log(Scalar(2));
  const Scalar l4 = L + std::log(Scalar(4));
  return l2 / std::log(l4) - (l2 + beta * ll) / std::log(l4 + beta * ll);
}

/// Scans exponents (alpha = 2, 4, 8, ... or beta = 1, 2, 4, ...) for one
/// whose claim holds on the whole geometric grid r = r_top 2^-i down to
/// log(1/r) = L_max, and returns the largest grid r1 below which it holds.
template <typename Scalar>
ConverseResult<Scalar> content_converse_probe(ContentFamily family, Scalar gauge_exponent, Scalar C, Scalar A,
                                                int doublings = 12, Scalar L_max = 0) {
  if (!(A > 0 && A <= 1)) throw DomainError("A must lie in (0, 1]");
  if (!(gauge_exponent > 0)) throw DomainError("gauge exponent must be positive");
  if (family == ContentFamily::u1 && !(C > 0)) throw DomainError("C must be positive");
  const Scalar log2 = std::log(Scalar(2));
  Scalar L_top;
  if (family == ContentFamily::u1) {
    L_top = std::log(4 * C);  // r_top = 1/(4C), so 2 C r < 1
    if (L_max == 0) L_max = std::log(Scalar(1e300));
  } else {
    L_top = 3;
    if (L_max == 0) L_max = std::log(Scalar(1e40));
  }
  if (!(L_max > L_top)) throw DomainError("grid is empty");
  ConverseResult<Scalar> result;
  Scalar exponent = family == ContentFamily::u1 ? 2 : 1;
  for (int step = 0; step <= doublings; ++step, exponent *= 2) {
    std::vector<bool> holds;
    for (Scalar L = L_top; L <= L_max; L += log2) {
      if (family == ContentFamily::u1) {
        holds.push_back(converse_claim_u1(L, exponent, gauge_exponent, C, A));
      } else {
        holds.push_back(std::log(A) / gauge_exponent > converse_gap_u2(L, exponent));
      }
    }
    result.grid_points = holds.size();
    if (holds.empty() || !holds.back()) {
      result.rejected.push_back(exponent);
      continue;
    }
    std::size_t i0 = holds.size() - 1;
    while (i0 > 0 && holds[i0 - 1]) --i0;
    result.exponent = exponent;
    result.r1 = std::exp(-(L_top + Scalar(i0) * log2));
    result.deepest_log_inv_r = L_top + Scalar(holds.size() - 1) * log2;
    return result;
  }
  throw DomainError("no exponent found within " + std::to_string(doublings) + " doublings; last tried " +
                    std::to_string(static_cast<double>(exponent / 2)));
}

}  // namespace weakperf
