#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "weakperf/errors.hpp"
#include "weakperf/geometry.hpp"
#include "weakperf/precision.hpp"

namespace weakperf {

template <typename Scalar>
struct KernelValue {
  Scalar value = 0;
  Scalar tail_bound = 0;
  int terms = 0;  // N: indices 1 <= |n| <= N were summed
};

/// Radial position exponent t = log|z| / log r.
template <typename Scalar>
Scalar radial_exponent(Scalar r, Scalar abs_z) {
  return std::log(abs_z) / std::log(r);
}

/// Bound on sum_{|n| > N} of the series terms (before the 1/(pi x) factor).
/// With q = max(x, r^2/x) both one-sided tails are at most
/// q^(N+1) ((N+1) - N q) / ((1-q)^2 (1 - r^(2(N+1)))).
template <typename Scalar>
Scalar bergman_tail(Scalar r, Scalar x, int N) {
  const Scalar q = std::max(x, r * r / x);
  const Scalar qn = std::pow(q, Scalar(N + 1));
  const Scalar head = qn * (Scalar(N + 1) - Scalar(N) * q) / ((1 - q) * (1 - q));
  return 2 * head / (1 - std::pow(r, Scalar(2 * (N + 1))));
}

/// On-diagonal Bergman kernel of {r < |z| < 1}:
/// K = 1/(2 pi x log(1/r)) + (1/(pi x)) sum_{n != 0} n x^n / (1 - r^(2n)),
/// x = |z|^2, summed pairwise over +-n with compensation and truncated at
/// the first N whose tail bound is below tol.
template <typename Scalar>
KernelValue<Scalar> bergman_annulus(Scalar r, Scalar abs_z, Scalar tol) {
  if (!(r > 0 && r <= Scalar(0.9))) throw DomainError("inner ratio must lie in (0, 0.9]");
  if (!(abs_z > r && abs_z < 1)) throw DomainError("z must satisfy r < |z| < 1");
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  const Scalar x = abs_z * abs_z;
  const Scalar prefactor = 1 / (pi_v<Scalar> * x);
  const Scalar u = r * r / x;
  const Scalar r2 = r * r;

  constexpr int kMaxTerms = 10000000;
  int N = 0;
  while (prefactor * bergman_tail(r, x, N) >= tol) {
    if (++N > kMaxTerms) throw DomainError("series truncation exceeds the term budget");
  }

  CompensatedSum<Scalar> sum;
  sum.add(1 / (2 * std::log(1 / r)));
  Scalar xn = 1, un = 1, r2n = 1;
  for (int n = 1; n <= N; ++n) {
    xn *= x;
    un *= u;
    r2n *= r2;
    const Scalar denom = 1 - r2n;
    sum.add(Scalar(n) * xn / denom);
    sum.add(Scalar(n) * un / denom);
  }
  return {prefactor * sum.value(), prefactor * bergman_tail(r, x, N), N};
}

template <typename Scalar>
KernelValue<Scalar> bergman_annulus(Scalar r, const Point<Scalar>& z, Scalar tol) {
  return bergman_annulus(r, length(z), tol);
}

/// 1/(2 pi r^(2t) log(1/r)) + (8/(3 pi)) / (1 - 2^(-2t))^2.
template <typename Scalar>
Scalar bergman_upper_bound(Scalar r, Scalar t) {
  if (!(r > 0 && r <= Scalar(0.5))) throw DomainError("r must lie in (0, 1/2]");
  if (!(t > 0 && t <= Scalar(0.5))) throw DomainError("t must lie in (0, 1/2]");
  const Scalar pi = pi_v<Scalar>;
  const Scalar shrink = 1 - std::pow(Scalar(2), -2 * t);
  return 1 / (2 * pi * std::pow(r, 2 * t) * std::log(1 / r)) + (8 / (3 * pi)) / (shrink * shrink);
}

/// Kernel under z -> (z - a)/rho: multiply by |T'|^2 = scale^2.
template <typename Scalar>
Scalar bergman_transport(Scalar kernel_value, Scalar scale) {
  if (!(scale > 0)) throw DomainError("scale must be positive");
  return kernel_value * scale * scale;
}

enum class DomainKind { symmetric_annulus, centered_annulus, punctured_disk, sampled };

/// Domains with a closed-form Poincare density. symmetric_annulus is
/// {1/R < |z| < R}; centered_annulus is {r e^-m < |z| < r e^m}; the punctured
/// disk is the unit disk minus the origin. `sampled` stands for any other
/// domain and has no exact density.
template <typename Scalar>
struct PoincareDomain {
  DomainKind kind = DomainKind::punctured_disk;
  Scalar R = 0;
  Scalar r = 0;
  Scalar m = 0;

  static PoincareDomain symmetric_annulus(Scalar R) {
    if (!(R > 1)) throw DomainError("symmetric annulus needs R > 1");
    return {DomainKind::symmetric_annulus, R, 0, 0};
  }
  static PoincareDomain centered_annulus(Scalar r, Scalar m) {
    if (!(r > 0 && m > 0)) throw DomainError("centered annulus needs r > 0, m > 0");
    return {DomainKind::centered_annulus, 0, r, m};
  }
  static PoincareDomain punctured_disk() { return {DomainKind::punctured_disk, 0, 0, 0}; }
  static PoincareDomain sampled() { return {DomainKind::sampled, 0, 0, 0}; }
};

namespace detail {

template <typename Scalar>
Scalar symmetric_annulus_density(Scalar R, Scalar abs_z) {
  if (!(abs_z > 1 / R && abs_z < R)) throw DomainError("z must lie strictly inside the annulus");
  const Scalar logR = std::log(R);
  const Scalar pi = pi_v<Scalar>;
  return pi / (2 * logR) / (abs_z * std::cos(pi * std::log(abs_z) / (2 * logR)));
}

}  // namespace detail

/// Exact density of the complete curvature -1 metric.
template <typename Scalar>
Scalar poincare_density(const PoincareDomain<Scalar>& domain, const Point<Scalar>& z) {
  const Scalar a = length(z);
  switch (domain.kind) {
    case DomainKind::symmetric_annulus:
      return detail::symmetric_annulus_density(domain.R, a);
    case DomainKind::centered_annulus: {
      const Scalar lo = domain.r * std::exp(-domain.m);
      const Scalar hi = domain.r * std::exp(domain.m);
      if (!(a > lo && a < hi)) throw DomainError("z must lie strictly inside the annulus");
      // on the core circle this is pi / (2 r m)
      if (a == domain.r) return pi_v<Scalar> / (2 * domain.r * domain.m);
      return detail::symmetric_annulus_density(std::exp(domain.m), a / domain.r) / domain.r;
    }
    case DomainKind::punctured_disk:
      if (!(a > 0 && a < 1)) throw DomainError("z must satisfy 0 < |z| < 1");
      return 1 / (a * std::log(1 / a));
    case DomainKind::sampled:
      break;
  }
  throw UnsupportedDomain("no closed-form Poincare density for a sampled domain");
}

/// Distance to the analytic boundary.
template <typename Scalar>
Scalar boundary_distance(const PoincareDomain<Scalar>& domain, const Point<Scalar>& z) {
  const Scalar a = length(z);
  switch (domain.kind) {
    case DomainKind::symmetric_annulus:
      return std::min(a - 1 / domain.R, domain.R - a);
    case DomainKind::centered_annulus:
      return std::min(a - domain.r * std::exp(-domain.m), domain.r * std::exp(domain.m) - a);
    case DomainKind::punctured_disk:
      return std::min(a, 1 - a);
    case DomainKind::sampled:
      break;
  }
  throw UnsupportedDomain("no analytic boundary for a sampled domain");
}

/// inf |log(|z - a| / |b - a|)| over nearest boundary points a (within
/// relative tolerance of the nearest distance) and boundary points b != a.
template <typename Scalar>
Scalar beta_omega(const Point<Scalar>& z, const PlanarSetSample<Scalar>& boundary,
                  Scalar nearest_tolerance = Scalar(1e-9)) {
  const Scalar delta = boundary.nearest_distance(z);
  const auto& pts = boundary.points();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  bool any = false;
  for (const auto& a : pts) {
    const Scalar za = length(z - a);
    if (za > delta * (1 + nearest_tolerance)) continue;
    for (const auto& b : pts) {
      const Scalar ba = length(b - a);
      if (ba == 0) continue;
      any = true;
      best = std::min(best, std::abs(std::log(za / ba)));
    }
  }
  if (!any) throw DomainError("degenerate boundary sample");
  return best;
}

template <typename Scalar>
struct BandRow {
  Point<Scalar> z;
  Scalar density;
  Scalar delta;
  Scalar beta;
  Scalar ratio;  // density * delta * (beta + C)
};

template <typename Scalar>
struct BandReport {
  std::vector<BandRow<Scalar>> rows;
  Scalar min_ratio = std::numeric_limits<Scalar>::infinity();
  Scalar max_ratio = -std::numeric_limits<Scalar>::infinity();
  Scalar band_lo = 0;
  Scalar band_hi = 0;
  bool pass = true;
};

/// rho(z) delta(z) (beta(z) + C) along z_seq. rho and delta are exact for the
/// domain; beta comes from the boundary sample. pass iff every ratio lies in
/// [band_lo, band_hi].
template <typename Scalar>
BandReport<Scalar> check_bp_estimate(const PoincareDomain<Scalar>& domain, const std::vector<Point<Scalar>>& z_seq,
                                     const PlanarSetSample<Scalar>& boundary, Scalar c_probe, Scalar band_lo,
                                     Scalar band_hi) {
  if (domain.kind == DomainKind::sampled) throw UnsupportedDomain("no exact Poincare density for this domain");
  BandReport<Scalar> report;
  report.band_lo = band_lo;
  report.band_hi = band_hi;
  for (const auto& z : z_seq) {
    BandRow<Scalar> row{z, poincare_density(domain, z), boundary_distance(domain, z), beta_omega(z, boundary), 0};
    row.ratio = row.density * row.delta * (row.beta + c_probe);
    report.min_ratio = std::min(report.min_ratio, row.ratio);
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    report.pass = report.pass && row.ratio >= band_lo && row.ratio <= band_hi;
    report.rows.push_back(row);
  }
  return report;
}

/// {0} plus n equally spaced unit-circle points: the punctured disk boundary.
template <typename Scalar>
PlanarSetSample<Scalar> punctured_disk_boundary(std::size_t n) {
  std::vector<Point<Scalar>> pts{Point<Scalar>::Zero()};
  for (std::size_t k = 0; k < n; ++k) {
    const Scalar th = 2 * pi_v<Scalar> * Scalar(k) / Scalar(n);
    pts.emplace_back(std::cos(th), std::sin(th));
  }
  return PlanarSetSample<Scalar>(std::move(pts), pi_v<Scalar> / Scalar(n), 2);
}

/// Both circles of {lo < |z| < hi}, n points each.
template <typename Scalar>
PlanarSetSample<Scalar> annulus_boundary(Scalar lo, Scalar hi, std::size_t n) {
  std::vector<Point<Scalar>> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const Scalar th = 2 * pi_v<Scalar> * Scalar(k) / Scalar(n);
    pts.emplace_back(lo * std::cos(th), lo * std::sin(th));
    pts.emplace_back(hi * std::cos(th), hi * std::sin(th));
  }
  return PlanarSetSample<Scalar>(std::move(pts), hi * pi_v<Scalar> / Scalar(n), 2 * hi);
}

}  // namespace weakperf
