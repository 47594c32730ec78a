#include <cmath>
#include <numbers>
#include <set>

#include "weakperf/gauges.hpp"
#include "weakperf/perfectness.hpp"

namespace weakperf {

std::string_view to_string(GaugeKind kind) {
  switch (kind) {
    case GaugeKind::power:
      return "h1";
    case GaugeKind::log_power:
      return "h2";
    case GaugeKind::log_gauge:
      return "g1";
    case GaugeKind::log_log_gauge:
      return "g2";
    case GaugeKind::plain_power:
      return "pow";
  }
  return "?";
}

std::string_view to_string(ConditionFamily family) {
  switch (family) {
    case ConditionFamily::uniform:
      return "uniform";
    case ConditionFamily::u1:
      return "U1";
    case ConditionFamily::u2:
      return "U2";
  }
  return "?";
}

std::vector<std::size_t> select_centers(std::size_t n, std::size_t max_centers) {
  std::vector<std::size_t> out;
  if (n <= max_centers) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  // Kronecker sequence frac(k / phi); skip repeats until enough distinct
  std::set<std::size_t> picked;
  const double step = 1 / std::numbers::phi;
  double x = 0.5;
  while (picked.size() < max_centers) {
    picked.insert(std::min(n - 1, static_cast<std::size_t>(x * double(n))));
    x += step;
    x -= std::floor(x);
  }
  return {picked.begin(), picked.end()};
}

}  // namespace weakperf
