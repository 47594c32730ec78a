// Acceptance gate: one line per criterion, nonzero exit when any selected
// criterion fails.

#include <chrono>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "weakperf/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1..11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  std::vector<int> ids = only ? std::vector<int>{only} : weakperf::all_check_ids();
  weakperf::VerifyOptions options;
  bool all_pass = true;
  for (int id : ids) {
    auto result = weakperf::run_check(id, options);
    if (id == 11) {
      // the whole suite, as the verify-theorems command runs it
      options.parallel = true;
      const auto start = std::chrono::steady_clock::now();
      weakperf::run_checks(weakperf::all_check_ids(), options);
      const double suite = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      options.parallel = false;
      result.detail += "; full suite " + std::to_string(suite) + " s (limit 60 s)";
      result.pass = result.pass && suite < 60;
    }
    all_pass = all_pass && result.pass;
    std::cout << "criterion " << id << ": " << (result.pass ? "PASS" : "FAIL") << "  " << result.name << "  "
              << result.detail << std::endl;
  }
  return all_pass ? 0 : 1;
}
