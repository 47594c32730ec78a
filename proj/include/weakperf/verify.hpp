#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace weakperf {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
  double seconds = 0;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  std::size_t trials = 1000;
  // multiplies the content gauge exponent; 2 is the negative control
  double gamma_scale = 1;
  bool parallel = false;
};

/// Checks 1..11, each run in extended precision.
std::vector<int> all_check_ids();
std::string check_name(int id);
CheckResult run_check(int id, const VerifyOptions& options);

/// Runs the listed checks (concurrently when options.parallel); results are
/// ordered by id.
std::vector<CheckResult> run_checks(const std::vector<int>& ids, const VerifyOptions& options);

}  // namespace weakperf
