#pragma once

// Command-line driver. Subcommands: kvalues, prop51, bounds, decay, delta,
// lambda-rect, prop-a, flow-eval, conjugacy. Exit codes: 0 success, 1 a
// checked assertion failed (or a precision cap was hit), 2 usage or input
// validation error. A --config JSON file supplies defaults; explicit flags
// override it. Declared output files are written atomically.

#include <iosfwd>
#include <string>
#include <vector>

namespace odoflow {

// args excludes the program name. Diagnostics and results go to `out`.
int run_command(const std::vector<std::string>& args, std::ostream& out);

}  // namespace odoflow
