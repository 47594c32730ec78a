#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "weakperf/errors.hpp"
#include "weakperf/precision.hpp"

namespace weakperf {

enum class GaugeKind {
  power,          // C t^alpha                         (h1)
  log_power,      // C t (log 1/t)^-beta               (h2)
  log_gauge,      // C (log 2/(C2 t))^-gamma           (g1)
  log_log_gauge,  // C exp(-eta log(2/t) / loglog(4/t)) (g2)
  plain_power,    // C t^gamma
};

std::string_view to_string(GaugeKind kind);

/// One of the five gauge families with its exact closed form on (0, cap).
/// Above the cap the gauge is undefined unless it has been extended with
/// monotone_extension, which freezes the value at the cap.
template <typename Scalar>
class GaugeFunction {
 public:
  static GaugeFunction power(Scalar alpha, Scalar coefficient = 1,
                             Scalar cap = std::numeric_limits<Scalar>::infinity()) {
    if (!(alpha >= 1)) throw DomainError("power gauge needs alpha >= 1");
    return GaugeFunction(GaugeKind::power, alpha, coefficient, 1, cap);
  }

  static GaugeFunction log_power(Scalar beta, Scalar coefficient = 1, Scalar cap = 1 / std::numbers::e_v<Scalar>) {
    if (!(beta > 0)) throw DomainError("log-power gauge needs beta > 0");
    // -log t must stay above 1 on the closed-form range.
    return GaugeFunction(GaugeKind::log_power, beta, coefficient, 1, std::min(cap, 1 / std::numbers::e_v<Scalar>));
  }

  // Scale convention: g(t) = (log(2 / (scale * t)))^-gamma. The statement form
  // (log(1 / (C t)))^-gamma is the same gauge with scale = 2 C.
  static GaugeFunction log_gauge(Scalar gamma, Scalar scale, Scalar cap, Scalar coefficient = 1) {
    if (!(gamma > 0)) throw DomainError("log gauge needs gamma > 0");
    if (!(scale > 0)) throw DomainError("log gauge needs a positive scale");
    if (!(cap > 0) || !(cap < 2 / scale)) throw DomainError("log gauge cap must lie in (0, 2/scale)");
    return GaugeFunction(GaugeKind::log_gauge, gamma, coefficient, scale, cap);
  }

  static GaugeFunction log_log_gauge(Scalar eta, Scalar cap, Scalar coefficient = 1) {
    if (!(eta > 0)) throw DomainError("log-log gauge needs eta > 0");
    // log(2/t)/loglog(4/t) is decreasing once loglog(4/t) >= 1.
    const Scalar limit = 4 * std::exp(-std::numbers::e_v<Scalar>);
    if (!(cap > 0) || cap > limit) throw DomainError("log-log gauge cap must lie in (0, 4 e^-e]");
    return GaugeFunction(GaugeKind::log_log_gauge, eta, coefficient, 1, cap);
  }

  static GaugeFunction plain_power(Scalar gamma, Scalar coefficient = 1,
                                   Scalar cap = std::numeric_limits<Scalar>::infinity()) {
    if (!(gamma > 0)) throw DomainError("plain power gauge needs gamma > 0");
    return GaugeFunction(GaugeKind::plain_power, gamma, coefficient, 1, cap);
  }

  GaugeKind kind() const { return kind_; }
  Scalar exponent() const { return exponent_; }
  Scalar coefficient() const { return coefficient_; }
  Scalar scale() const { return scale_; }
  Scalar cap() const { return cap_; }
  bool extended() const { return extended_; }

  GaugeFunction with_coefficient(Scalar c) const {
    GaugeFunction g = *this;
    g.coefficient_ = c;
    g.check();
    return g;
  }

  /// Closed form, valid for 0 < t < cap (and at t = cap by continuity).
  Scalar closed_form(Scalar t) const {
    const Scalar log_t = std::log(t);
    switch (kind_) {
      case GaugeKind::power:
      case GaugeKind::plain_power:
        return coefficient_ * std::exp(exponent_ * log_t);
      case GaugeKind::log_power:
        return coefficient_ * t * std::pow(-log_t, -exponent_);
      case GaugeKind::log_gauge:
        return coefficient_ * std::pow(std::log(2 / scale_) - log_t, -exponent_);
      case GaugeKind::log_log_gauge: {
        const Scalar log2t = std::log(Scalar(2)) - log_t;
        const Scalar log4t = std::log(Scalar(4)) - log_t;
        return coefficient_ * std::exp(-exponent_ * log2t / std::log(log4t));
      }
    }
    return 0;
  }

  std::string literal() const {
    std::ostringstream s;
    s << std::setprecision(std::numeric_limits<Scalar>::max_digits10);
    switch (kind_) {
      case GaugeKind::power:
        s << "h1:alpha=" << exponent_ << ",C=" << coefficient_;
        break;
      case GaugeKind::log_power:
        s << "h2:beta=" << exponent_ << ",C=" << coefficient_;
        break;
      case GaugeKind::log_gauge:
        s << "g1:gamma=" << exponent_ << ",C2=" << scale_;
        break;
      case GaugeKind::log_log_gauge:
        s << "g2:eta=" << exponent_;
        break;
      case GaugeKind::plain_power:
        s << "pow:gamma=" << exponent_ << ",C=" << coefficient_;
        break;
    }
    if (std::isfinite(cap_)) s << ",cap=" << cap_;
    if (extended_) s << ",extended";
    return s.str();
  }

 private:
  template <typename S>
  friend GaugeFunction<S> monotone_extension(GaugeFunction<S> g);

  GaugeFunction(GaugeKind kind, Scalar exponent, Scalar coefficient, Scalar scale, Scalar cap)
      : kind_(kind), exponent_(exponent), coefficient_(coefficient), scale_(scale), cap_(cap) {
    check();
  }

  void check() const {
    if (!(coefficient_ > 0) || !is_finite(coefficient_)) throw DomainError("gauge coefficient must be positive");
    if (!(cap_ > 0)) throw DomainError("gauge cap must be positive");
  }

  GaugeKind kind_;
  Scalar exponent_;
  Scalar coefficient_;
  Scalar scale_;
  Scalar cap_;
  bool extended_ = false;
};

/// Gauge defined on all of (0, inf): the closed form below the cap, the
/// value at the cap above it.
template <typename Scalar>
GaugeFunction<Scalar> monotone_extension(GaugeFunction<Scalar> g) {
  g.extended_ = true;
  return g;
}

template <typename Scalar>
Scalar evaluate(const GaugeFunction<Scalar>& g, Scalar t) {
  if (!(t > 0)) {
    if (t == 0) return 0;  // h(0) = 0 by continuity
    throw DomainError("gauge argument must be positive");
  }
  if (t <= g.cap()) return g.closed_form(t);
  if (!g.extended()) {
    throw DomainError("gauge argument at or above the closed-form cap; use monotone_extension");
  }
  return g.closed_form(g.cap());
}

/// g(t) for t = exp(-L), usable when t itself underflows.
template <typename Scalar>
Scalar evaluate_at_log_inverse(const GaugeFunction<Scalar>& g, Scalar L) {
  if (!(L > -std::log(g.cap()))) return evaluate(g, std::exp(-L));
  const Scalar c = g.coefficient();
  const Scalar e = g.exponent();
  switch (g.kind()) {
    case GaugeKind::power:
    case GaugeKind::plain_power:
      return c * std::exp(-e * L);
    case GaugeKind::log_power:
      return c * std::exp(-L) * std::pow(L, -e);
    case GaugeKind::log_gauge:
      return c * std::pow(std::log(2 / g.scale()) + L, -e);
    case GaugeKind::log_log_gauge:
      return c * std::exp(-e * (std::log(Scalar(2)) + L) / std::log(std::log(Scalar(4)) + L));
  }
  return 0;
}

/// Threshold below which Power(alpha > 1) satisfies h(t) <= t.
template <typename Scalar>
Scalar below_identity_threshold(const GaugeFunction<Scalar>& g) {
  if (g.kind() == GaugeKind::power && g.exponent() > 1) {
    return std::pow(g.coefficient(), -1 / (g.exponent() - 1));
  }
  if (g.kind() == GaugeKind::log_power) {
    // C (log 1/t)^-beta <= 1  iff  t <= exp(-C^{1/beta})
    return std::exp(-std::pow(g.coefficient(), 1 / g.exponent()));
  }
  throw DomainError("identity threshold only defined for h1 (alpha > 1) and h2");
}

template <typename Scalar>
struct InverseBound {
  Scalar value;
  Scalar threshold;
};

/// Upper bound (1/C) t (log 1/t)^beta for the inverse of h2 = C t (log 1/t)^-beta.
/// Valid for t <= threshold = min(exp(-C^{1/beta}), h(cap)).
template <typename Scalar>
InverseBound<Scalar> inverse_upper_bound(const GaugeFunction<Scalar>& h, Scalar t) {
  if (h.kind() != GaugeKind::log_power) throw DomainError("inverse bound needs an h2 gauge");
  if (!(t > 0) || !(t < 1)) throw DomainError("inverse bound needs 0 < t < 1");
  const Scalar threshold = std::min(below_identity_threshold(h), h.closed_form(h.cap()));
  if (t > threshold) throw DomainError("inverse bound: t above its validity threshold");
  const Scalar value = t * std::pow(-std::log(t), h.exponent()) / h.coefficient();
  return {value, threshold};
}

namespace detail {

inline std::map<std::string, std::string> parse_params(std::string_view body, const std::string& literal) {
  std::map<std::string, std::string> params;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto comma = body.find(',', pos);
    const auto item = body.substr(pos, comma == std::string_view::npos ? body.size() - pos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      if (item == "extended") {
        params["extended"] = "1";
      } else {
        throw ConfigError("gauge literal '" + literal + "': expected key=value, got '" + std::string(item) + "'");
      }
    } else {
      params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return params;
}

}  // namespace detail

/// Parses `h1:alpha=2,C=1`, `h2:beta=3,C=0.5`, `g1:gamma=1,C2=1,cap=0.25`,
/// `g2:eta=0.7,cap=0.25`, `pow:gamma=0.5`. A trailing `,extended` applies
/// monotone_extension.
template <typename Scalar>
GaugeFunction<Scalar> parse_gauge(std::string_view literal) {
  const std::string lit(literal);
  const auto colon = literal.find(':');
  if (colon == std::string_view::npos) throw ConfigError("gauge literal '" + lit + "' lacks a kind prefix");
  const auto tag = literal.substr(0, colon);
  auto params = detail::parse_params(literal.substr(colon + 1), lit);
  const auto take = [&](const std::string& key, std::optional<Scalar> fallback) -> Scalar {
    auto it = params.find(key);
    if (it == params.end()) {
      if (fallback) return *fallback;
      throw ConfigError("gauge literal '" + lit + "' is missing '" + key + "'");
    }
    std::size_t used = 0;
    long double v = 0;
    try {
      v = std::stold(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it->second.size()) throw ConfigError("gauge literal '" + lit + "': bad number for '" + key + "'");
    params.erase(it);
    return static_cast<Scalar>(v);
  };
  const bool extend = params.erase("extended") > 0;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::optional<GaugeFunction<Scalar>> g;
  try {
    if (tag == "h1") {
      const Scalar alpha = take("alpha", std::nullopt);
      const Scalar c = take("C", Scalar(1));
      g = GaugeFunction<Scalar>::power(alpha, c, take("cap", inf));
    } else if (tag == "h2") {
      const Scalar beta = take("beta", std::nullopt);
      const Scalar c = take("C", Scalar(1));
      g = GaugeFunction<Scalar>::log_power(beta, c, take("cap", 1 / std::numbers::e_v<Scalar>));
    } else if (tag == "g1") {
      const Scalar gamma = take("gamma", std::nullopt);
      const Scalar scale = take("C2", Scalar(1));
      g = GaugeFunction<Scalar>::log_gauge(gamma, scale, take("cap", std::nullopt));
    } else if (tag == "g2") {
      const Scalar eta = take("eta", std::nullopt);
      g = GaugeFunction<Scalar>::log_log_gauge(eta, take("cap", std::nullopt));
    } else if (tag == "pow") {
      const Scalar gamma = take("gamma", std::nullopt);
      const Scalar c = take("C", Scalar(1));
      g = GaugeFunction<Scalar>::plain_power(gamma, c, take("cap", inf));
    } else {
      throw ConfigError("unknown gauge kind '" + std::string(tag) + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError("gauge literal '" + lit + "': " + e.what());
  }
  if (!params.empty()) throw ConfigError("gauge literal '" + lit + "': unknown key '" + params.begin()->first + "'");
  return extend ? monotone_extension(*g) : *g;
}

}  // namespace weakperf
