#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "weakperf/errors.hpp"
#include "weakperf/gauges.hpp"
#include "weakperf/precision.hpp"

namespace weakperf {

template <typename Scalar>
struct BoundValue {
  Scalar value = 0;
  bool clamped = false;  // raw value fell outside [0, 1]
};

template <typename Scalar>
BoundValue<Scalar> clamp_unit(Scalar raw) {
  if (raw > 1) return {1, true};
  if (raw < 0) return {0, true};
  return {raw, false};
}

/// Harmonic measure of the outer circle in {inner < |z - a| < outer},
/// evaluated at |z - a| = s: log(s/inner) / log(outer/inner).
template <typename Scalar>
Scalar annulus_comparison_phi(Scalar inner, Scalar outer, Scalar s) {
  if (!(inner > 0 && inner < outer)) throw DomainError("annulus needs 0 < inner < outer");
  if (!(s >= inner && s <= outer)) throw DomainError("s must lie in [inner, outer]");
  return std::log(s / inner) / std::log(outer / inner);
}

enum class CapacityKind { power_law, log_corrected };

/// Lower bound for Cap(K_t): C t^p with p = 1/(2 - alpha), or
/// C t (log 1/t)^-beta.
template <typename Scalar>
struct CapacityProfile {
  CapacityKind kind = CapacityKind::power_law;
  Scalar coefficient = 1;
  Scalar exponent = 1;  // p for power_law, beta for log_corrected
  Scalar valid_r0 = 1;

  static CapacityProfile power_law(Scalar coefficient, Scalar alpha, Scalar valid_r0) {
    if (!(alpha >= 1 && alpha < 2)) throw DomainError("power-law capacity needs alpha in [1, 2)");
    if (!(coefficient > 0 && valid_r0 > 0)) throw DomainError("capacity profile needs positive C and r0");
    return {CapacityKind::power_law, coefficient, 1 / (2 - alpha), valid_r0};
  }
  static CapacityProfile log_corrected(Scalar coefficient, Scalar beta, Scalar valid_r0) {
    if (!(beta > 0)) throw DomainError("log-corrected capacity needs beta > 0");
    if (!(coefficient > 0 && valid_r0 > 0 && valid_r0 < 1)) throw DomainError("capacity profile needs C > 0, 0 < r0 < 1");
    return {CapacityKind::log_corrected, coefficient, beta, valid_r0};
  }

  Scalar operator()(Scalar t) const {
    if (!(t > 0 && t <= valid_r0)) throw DomainError("capacity profile used outside (0, r0]");
    if (kind == CapacityKind::power_law) return coefficient * std::pow(t, exponent);
    return coefficient * t * std::pow(std::log(1 / t), -exponent);
  }

  /// log((t / kappa) / (2 Cap(t))) as a function of L = log(1/t).
  Scalar log_term(Scalar L, Scalar kappa) const {
    const Scalar c = std::log(1 / (2 * kappa * coefficient));
    if (kind == CapacityKind::power_law) return (exponent - 1) * L + c;
    return exponent * std::log(L) + c;
  }
};

/// Upper limit of the integral as used for LHMD bounds at radius r.
template <typename Scalar>
Scalar chen_upper_limit(Scalar kappa, Scalar r) {
  return kappa * r / 2;
}

/// integral_{z_dist}^{upper} dt / (t log((t/kappa) / (2 Cap(t)))), by
/// Gauss-Kronrod in u = log t.
template <typename Scalar>
Scalar chen_integral(Scalar z_dist, Scalar upper, Scalar kappa, const CapacityProfile<Scalar>& cap) {
  if (!(kappa > 0 && kappa < Scalar(1) / 16)) throw DomainError("kappa must lie in (0, 1/16)");
  if (!(z_dist > 0 && z_dist <= upper)) throw DomainError("need 0 < z_dist <= upper limit");
  if (!(upper <= cap.valid_r0)) throw DomainError("capacity profile not valid up to the integration limit");
  const Scalar L_lo = std::log(1 / upper);
  const Scalar L_hi = std::log(1 / z_dist);
  // the log term is monotone in L for both profiles, so the endpoints decide
  if (!(cap.log_term(L_lo, kappa) > 0 && cap.log_term(L_hi, kappa) > 0)) {
    throw DomainError("bound inapplicable: integrand nonpositive on the range");
  }
  if (z_dist == upper) return 0;
  // dt / t = -dL
  auto f = [&](Scalar L) { return 1 / cap.log_term(L, kappa); };
  Scalar error = 0;
  const Scalar tol = std::is_same_v<Scalar, double> ? Scalar(1e-12) : Scalar(1e-14);
  return boost::math::quadrature::gauss_kronrod<Scalar, 31>::integrate(f, L_lo, L_hi, 20, tol, &error);
}

/// exp(-C_kappa * integral), clamped to [0, 1].
template <typename Scalar>
BoundValue<Scalar> chen_upper_bound(Scalar z_dist, Scalar upper, Scalar kappa, const CapacityProfile<Scalar>& cap,
                                    Scalar c_kappa = 1) {
  if (!(c_kappa > 0)) throw DomainError("C_kappa must be positive");
  return clamp_unit(std::exp(-c_kappa * chen_integral(z_dist, upper, kappa, cap)));
}

/// Antiderivative of the power-law integrand:
/// (1/(p-1)) [log((p-1) L_z + c) - log((p-1) L_up + c)], c = log(1/(2 kappa C)).
template <typename Scalar>
Scalar chen_integral_power_law_closed_form(Scalar z_dist, Scalar upper, Scalar kappa,
                                           const CapacityProfile<Scalar>& cap) {
  if (cap.kind != CapacityKind::power_law) throw DomainError("closed form needs a power-law profile");
  const Scalar p1 = cap.exponent - 1;
  const Scalar c = std::log(1 / (2 * kappa * cap.coefficient));
  const Scalar Lz = std::log(1 / z_dist);
  const Scalar Lu = std::log(1 / upper);
  if (p1 == 0) return (Lz - Lu) / c;
  return (std::log(p1 * Lz + c) - std::log(p1 * Lu + c)) / p1;
}

/// C3 (log(1/z) / log(1/r))^-gamma.
template <typename Scalar>
BoundValue<Scalar> lhmd1_bound(Scalar z_dist, Scalar r, Scalar gamma, Scalar c3) {
  if (!(r < 1)) throw DomainError("r must be below 1");
  if (!(z_dist > 0 && z_dist <= r)) throw DomainError("need 0 < z_dist <= r");
  return clamp_unit(c3 * std::pow(std::log(1 / z_dist) / std::log(1 / r), -gamma));
}

/// log(1/t) / log log(1/t).
template <typename Scalar>
Scalar loglog_scale(Scalar t) {
  const Scalar L = std::log(1 / t);
  return L / std::log(L);
}

/// C3 exp(-eta (F(z) - F(r))), F(t) = log(1/t) / log log(1/t).
template <typename Scalar>
BoundValue<Scalar> lhmd2_bound(Scalar z_dist, Scalar r, Scalar eta, Scalar c3) {
  if (!(r < std::exp(-std::numbers::e_v<Scalar>))) throw DomainError("r must be below e^-e");
  if (!(z_dist > 0 && z_dist <= r)) throw DomainError("need 0 < z_dist <= r");
  return clamp_unit(c3 * std::exp(-eta * (loglog_scale(z_dist) - loglog_scale(r))));
}

/// Constants of the LHMD bound implied by the integral for every
/// r in (0, r1] and z_dist < kappa r / 2.
template <typename Scalar>
struct LhmdConstants {
  Scalar exponent = 0;  // gamma for power_law, eta for log_corrected
  Scalar c3 = 1;
  Scalar kappa = 0;
  Scalar r1 = 0;
  Scalar c_kappa = 1;
};

/// Power law: for L >= L_min = log(2/(kappa r1)) the log term is at most
/// L ((p-1) + c/L_min) when c >= 0, giving gamma = C_k L_min / ((p-1) L_min + c)
/// (C_k/(p-1) when c < 0), and the shift from log(2/(kappa r)) to log(1/r)
/// costs at most C3 = (log(2/(kappa r1)) / log(1/r1))^gamma.
/// Log corrected: the same with log L against dF/dL <= 1/log L, giving
/// eta = C_k log L_min / (beta log L_min + c) and
/// C3 = exp(eta (F(kappa r1/2) - F(r1))), which needs r1 <= e^-(e^2).
template <typename Scalar>
LhmdConstants<Scalar> lhmd_constants(const CapacityProfile<Scalar>& cap, Scalar kappa, Scalar r1,
                                     Scalar c_kappa = 1) {
  if (!(kappa > 0 && kappa < Scalar(1) / 16)) throw DomainError("kappa must lie in (0, 1/16)");
  if (!(r1 > 0 && r1 < 1)) throw DomainError("r1 must lie in (0, 1)");
  LhmdConstants<Scalar> k{0, 1, kappa, r1, c_kappa};
  const Scalar c = std::log(1 / (2 * kappa * cap.coefficient));
  const Scalar L_min = std::log(2 / (kappa * r1));
  if (!(cap.log_term(L_min, kappa) > 0)) throw DomainError("bound inapplicable at r1");
  if (cap.kind == CapacityKind::power_law) {
    const Scalar p1 = cap.exponent - 1;
    if (c >= 0) {
      k.exponent = c_kappa * L_min / (p1 * L_min + c);
    } else {
      if (!(p1 > 0)) throw DomainError("bound inapplicable: p = 1 with c < 0");
      k.exponent = c_kappa / p1;
    }
    k.c3 = std::pow(L_min / std::log(1 / r1), k.exponent);
  } else {
    if (!(r1 <= std::exp(-std::exp(Scalar(2))))) throw DomainError("log-corrected constants need r1 <= e^-(e^2)");
    const Scalar beta = cap.exponent;
    const Scalar ll = std::log(L_min);
    k.exponent = c >= 0 ? c_kappa * ll / (beta * ll + c) : c_kappa / beta;
    k.c3 = std::exp(k.exponent * (loglog_scale(kappa * r1 / 2) - loglog_scale(r1)));
  }
  return k;
}

template <typename Scalar>
struct DeltaProbe {
  Scalar phi = 0;
  bool pass = false;
};

/// Annulus model of the (Delta) condition: phi at s = h(outer_r) in the
/// annulus (inner_scale, outer_r); pass iff phi <= 1 - epsilon.
template <typename Scalar>
DeltaProbe<Scalar> delta_condition_probe(const GaugeFunction<Scalar>& h, Scalar inner_scale, Scalar outer_r,
                                         Scalar epsilon) {
  const Scalar s = evaluate(h, outer_r);
  if (!(s < outer_r)) throw DomainError("h(r) must be below r");
  if (!(inner_scale > 0 && inner_scale <= s)) throw DomainError("inner scale must lie in (0, h(r)]");
  if (!(epsilon >= 0 && epsilon < 1)) throw DomainError("epsilon must lie in [0, 1)");
  const Scalar phi = annulus_comparison_phi(inner_scale, outer_r, s);
  return {phi, phi <= 1 - epsilon};
}

/// (log r - beta log log(1/r)) / log(log(1/r) + beta log log(1/r))
///   - log r / log log(1/r).
template <typename Scalar>
Scalar log_power_level_gap(Scalar r, Scalar beta) {
  if (!(r > 0 && r < std::exp(-std::numbers::e_v<Scalar>))) throw DomainError("r must lie in (0, e^-e)");
  if (!(beta >= 0)) throw DomainError("beta must be nonnegative");
  const Scalar L = std::log(1 / r);
  const Scalar ll = std::log(L);
  if (beta == 0) return 0;
  return (-L - beta * ll) / std::log(L + beta * ll) + L / ll;
}

}  // namespace weakperf
