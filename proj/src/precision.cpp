#include "weakperf/precision.hpp"

#include <cstdlib>
#include <string>

#include "weakperf/errors.hpp"

namespace weakperf {

PrecisionMode precision_from_env() {
  const char* v = std::getenv("WEAKPERF_PRECISION");
  if (v == nullptr || *v == '\0') return PrecisionMode::extended_precision;
  const std::string s(v);
  if (s == "double") return PrecisionMode::double_precision;
  if (s == "extended") return PrecisionMode::extended_precision;
  throw ConfigError("WEAKPERF_PRECISION must be 'double' or 'extended', got '" + s + "'");
}

std::string_view to_string(PrecisionMode mode) {
  return mode == PrecisionMode::double_precision ? "double" : "extended";
}

}  // namespace weakperf
