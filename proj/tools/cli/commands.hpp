#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dualgal::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_solver = 3,
};

/// Entry point shared by the executable and the tests. args excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// %.17g, so every double written to a table round-trips.
std::string format_double(double v);

}  // namespace dualgal::cli
