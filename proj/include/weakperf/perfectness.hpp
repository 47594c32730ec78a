#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weakperf/cantor.hpp"
#include "weakperf/errors.hpp"
#include "weakperf/gauges.hpp"
#include "weakperf/geometry.hpp"

namespace weakperf {

enum class ConditionFamily { uniform, u1, u2 };

std::string_view to_string(ConditionFamily family);

/// Probe centers and radii. Radii run r0 * 2^-m, m >= 1, while they stay
/// above floor_factor * resolution.
struct ProbeGrid {
  std::size_t max_centers = 512;
  double floor_factor = 10;
};

/// All indices when n <= max, else a golden-ratio (Kronecker) subsample.
std::vector<std::size_t> select_centers(std::size_t n, std::size_t max_centers);

template <typename Scalar>
std::vector<Scalar> probe_radii(Scalar r0, Scalar resolution, const ProbeGrid& grid) {
  if (!(r0 > 0)) throw DomainError("r0 must be positive");
  const Scalar floor = Scalar(grid.floor_factor) * resolution;
  std::vector<Scalar> radii;
  for (Scalar r = r0 / 2; r > floor; r /= 2) radii.push_back(r);
  if (radii.empty()) throw DomainError("grid finer than sample resolution");
  return radii;
}

template <typename Scalar>
struct Probe {
  std::size_t center = 0;
  Scalar radius = 0;
  Scalar inner = 0;
  bool hit = false;
  bool margin_only = false;
  // log-scale interiority of the best sample point: min(log d/inner, log outer/d)
  Scalar margin = 0;
};

template <typename Scalar>
struct PerfectnessCertificate {
  ConditionFamily condition = ConditionFamily::uniform;
  std::string gauge;
  Scalar coefficient = 0;
  Scalar exponent = 0;
  Scalar r0 = 0;
  std::vector<Probe<Scalar>> probes;
  Scalar worst_margin = std::numeric_limits<Scalar>::infinity();
  bool pass = true;
  bool resolution_caveat = false;
  std::optional<Probe<Scalar>> counterexample;
};

namespace detail {

template <typename Scalar>
Scalar log_margin(Scalar d, Scalar inner, Scalar outer) {
  return std::min(std::log(d / inner), std::log(outer / d));
}

// Best log-scale interiority over profile points; -inf if the profile is empty.
template <typename Scalar>
Scalar best_margin(const std::vector<Scalar>& d, Scalar inner, Scalar outer) {
  const Scalar target = std::sqrt(inner) * std::sqrt(outer);
  auto it = std::lower_bound(d.begin(), d.end(), target);
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  if (it != d.end()) best = std::max(best, log_margin(*it, inner, outer));
  if (it != d.begin()) best = std::max(best, log_margin(*std::prev(it), inner, outer));
  return best;
}

template <typename Scalar>
ConditionFamily family_of(const GaugeFunction<Scalar>& h) {
  if (h.kind() == GaugeKind::power) return h.exponent() == 1 ? ConditionFamily::uniform : ConditionFamily::u1;
  if (h.kind() == GaugeKind::log_power) return ConditionFamily::u2;
  throw DomainError("perfectness gauges are h1 or h2");
}

}  // namespace detail

/// Checks {h(r) <= |z - a| <= r} against the sample for every probe center a
/// and radius r. A pass is a sampled certificate; resolution_caveat is set
/// when some probe only hit within the resolution inflation.
template <PointSet Set>
PerfectnessCertificate<typename Set::scalar_type> test_h_perfectness(
    const Set& set, const GaugeFunction<typename Set::scalar_type>& h, typename Set::scalar_type r0,
    const ProbeGrid& grid = {}) {
  using Scalar = typename Set::scalar_type;
  PerfectnessCertificate<Scalar> cert;
  cert.condition = detail::family_of(h);
  cert.gauge = h.literal();
  cert.coefficient = h.coefficient();
  cert.exponent = h.exponent();
  cert.r0 = r0;
  const auto radii = probe_radii(r0, set.resolution(), grid);
  const auto centers = select_centers(set.size(), grid.max_centers);
  const Scalar res = set.resolution();
  for (std::size_t c : centers) {
    const auto profile = distance_profile(set, c);
    for (Scalar r : radii) {
      Probe<Scalar> p;
      p.center = c;
      p.radius = r;
      p.inner = evaluate(h, r);
      const AnnulusHit hit = annulus_hits_profile(profile, p.inner, r, res);
      p.hit = hit.hit;
      p.margin_only = hit.margin_only;
      p.margin = detail::best_margin(profile.distance, p.inner, r);
      cert.worst_margin = std::min(cert.worst_margin, p.margin);
      cert.resolution_caveat = cert.resolution_caveat || p.margin_only;
      if (!p.hit && cert.pass) {
        cert.pass = false;
        cert.counterexample = p;
      }
      cert.probes.push_back(p);
    }
  }
  return cert;
}

template <typename Scalar>
struct GapPair {
  Scalar inner;  // last sample distance before the gap
  Scalar outer;  // first sample distance after it, clipped to r0
  bool clipped;
};

template <typename Scalar>
struct FitResult {
  ConditionFamily family = ConditionFamily::u1;
  Scalar coefficient = 0;
  Scalar exponent = 0;
  Scalar r0 = 0;
  bool vacuous = false;  // no significant gaps: uniformly perfect at the sampled scales
  std::size_t gap_count = 0;
  std::size_t scales_used = 0;
  std::string note;

  GaugeFunction<Scalar> gauge() const {
    if (family == ConditionFamily::u2 && exponent > 0) return GaugeFunction<Scalar>::log_power(exponent, coefficient);
    return GaugeFunction<Scalar>::power(std::max(Scalar(1), exponent), coefficient);
  }
};

/// Empty annuli (s, R) seen from each probe center, restricted to the probed
/// range: s < r0 and R above the probe floor.
template <PointSet Set>
std::vector<GapPair<typename Set::scalar_type>> collect_gaps(const Set& set, typename Set::scalar_type r0,
                                                             const ProbeGrid& grid = {}) {
  using Scalar = typename Set::scalar_type;
  const Scalar floor = Scalar(grid.floor_factor) * set.resolution();
  std::vector<GapPair<Scalar>> gaps;
  for (std::size_t c : select_centers(set.size(), grid.max_centers)) {
    const auto profile = distance_profile(set, c);
    const auto& d = profile.distance;
    if (d.empty() || d.front() > floor) {
      throw DomainError("isolated sample point " + std::to_string(c) + ": no admissible gauge");
    }
    for (std::size_t i = 0; i < d.size() && d[i] < r0; ++i) {
      const Scalar outer = i + 1 < d.size() ? d[i + 1] : std::numeric_limits<Scalar>::infinity();
      if (outer <= floor) continue;
      gaps.push_back({d[i], std::min(outer, r0), outer > r0});
    }
  }
  return gaps;
}

namespace detail {

template <typename Scalar>
Scalar slope_of(const std::vector<std::pair<Scalar, Scalar>>& xy) {
  Scalar mx = 0, my = 0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= xy.size();
  my /= xy.size();
  Scalar sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0)) throw DomainError("degenerate regression: fewer than 2 distinct scales");
  return sxy / sxx;
}

}  // namespace detail

/// Fits (C, exponent) of the U1 or U2 family from the sample's gaps.
/// U1 regresses log s on log R (slope alpha). U2 regresses log(R/s) on
/// log log(1/s) (slope beta); the inner edge is used because it is the level
/// length the construction ties to the exponent. Each dyadic band of R
/// contributes its widest significant gap (R/s >= 2). C is the largest value
/// with C * h_unit(R) <= s on every gap, so the fitted gauge always passes
/// test_h_perfectness on the same centers and radii.
template <PointSet Set>
FitResult<typename Set::scalar_type> fit_condition_parameters(const Set& set, ConditionFamily family,
                                                              typename Set::scalar_type r0,
                                                              const ProbeGrid& grid = {}) {
  using Scalar = typename Set::scalar_type;
  if (family == ConditionFamily::uniform) throw DomainError("fit family must be U1 or U2");
  if (family == ConditionFamily::u2 && !(r0 < 1 / std::numbers::e_v<Scalar>)) {
    throw DomainError("U2 fit needs r0 < 1/e");
  }
  const auto gaps = collect_gaps(set, r0, grid);
  FitResult<Scalar> fit;
  fit.family = family;
  fit.r0 = r0;
  fit.gap_count = gaps.size();

  std::map<long, std::pair<Scalar, Scalar>> widest;  // dyadic band of R -> (R/s, s)
  for (const auto& g : gaps) {
    if (g.clipped) continue;
    const Scalar ratio = g.outer / g.inner;
    if (!(ratio >= 2)) continue;
    const long band = std::lround(std::floor(std::log2(g.outer)));
    auto it = widest.find(band);
    if (it == widest.end() || ratio > it->second.first) widest[band] = {ratio, g.inner};
  }
  fit.scales_used = widest.size();
  if (widest.empty()) {
    fit.vacuous = true;
    fit.exponent = family == ConditionFamily::u1 ? 1 : 0;
    fit.note = family == ConditionFamily::u1 ? "uniformly perfect, U1 vacuous" : "uniformly perfect, U2 vacuous";
  } else {
    std::vector<std::pair<Scalar, Scalar>> xy;
    for (const auto& [band, rs] : widest) {
      const auto [ratio, s] = rs;
      const Scalar R = ratio * s;
      if (family == ConditionFamily::u1) {
        xy.emplace_back(std::log(R), std::log(s));
      } else {
        xy.emplace_back(std::log(-std::log(s)), std::log(ratio));
      }
    }
    if (xy.size() < 2) throw DomainError("degenerate regression: fewer than 2 distinct scales");
    fit.exponent = detail::slope_of(xy);
    if (family == ConditionFamily::u1 && fit.exponent < 1) {
      fit.exponent = 1;
      fit.note = "fitted slope below 1, clamped";
    }
    if (family == ConditionFamily::u2 && fit.exponent < 0) {
      fit.exponent = 0;
      fit.note = "fitted slope below 0, clamped";
    }
  }

  const auto unit = [&](Scalar R) {
    if (family == ConditionFamily::u2 && fit.exponent > 0) return R * std::pow(-std::log(R), -fit.exponent);
    return std::pow(R, std::max(Scalar(1), fit.exponent));
  };
  Scalar c = std::numeric_limits<Scalar>::infinity();
  for (const auto& g : gaps) c = std::min(c, g.inner / unit(g.outer));
  if (!std::isfinite(c)) c = 1;  // no gaps below r0 at all
  fit.coefficient = c * (1 - 16 * std::numeric_limits<Scalar>::epsilon());
  return fit;
}

template <typename Scalar>
FitResult<Scalar> fit_condition_parameters(const CantorIntervalSet<Scalar>& intervals, ConditionFamily family,
                                           Scalar r0, const ProbeGrid& grid = {}) {
  return fit_condition_parameters(CantorPointSet<Scalar>(intervals, true), family, r0, grid);
}

}  // namespace weakperf
