#pragma once

#include <ostream>

namespace weakperf {

/// Exit codes: 0 pass, 2 check failure, 3 config error, 4 numeric-domain error.
enum ExitCode : int { exit_pass = 0, exit_check_failed = 2, exit_config = 3, exit_domain = 4 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace weakperf
