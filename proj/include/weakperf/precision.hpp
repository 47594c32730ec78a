#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>

namespace weakperf {

// 80-bit x87 on x86-64; the exponent range reaches ~1e-4931, which is what
// deep Cantor levels need.
using extended = long double;

enum class PrecisionMode { double_precision, extended_precision };

/// Reads WEAKPERF_PRECISION ("double" or "extended"); unset means extended.
/// Throws ConfigError on any other value.
PrecisionMode precision_from_env();

std::string_view to_string(PrecisionMode mode);

template <typename Scalar>
constexpr std::string_view precision_tag() {
  if constexpr (std::is_same_v<Scalar, double>) {
    return "double";
  } else {
    return "extended";
  }
}

template <typename Scalar>
constexpr Scalar pi_v = std::numbers::pi_v<Scalar>;

// Lengths and radii must stay above this; below it the level would lose
// its relative precision to subnormals.
template <typename Scalar>
constexpr Scalar smallest_safe_length() {
  if constexpr (std::is_same_v<Scalar, double>) {
    return 1e-300;
  } else {
    return std::numeric_limits<Scalar>::min() * Scalar(1e30);
  }
}

template <typename Scalar>
bool is_finite(Scalar x) {
  return std::isfinite(x);
}

// Neumaier compensated accumulator.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + carry_; }

 private:
  Scalar sum_ = 0;
  Scalar carry_ = 0;
};

}  // namespace weakperf
