#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "chattox/error.hpp"

namespace chattox::cli {

/// Exit codes: 0 success, 2 config error, 3 missing input, 4 backend failure, 5 data error.
int exit_code_for(ErrorCode code);

/// Runs one subcommand. Errors are written to `err` as a single JSON record.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace chattox::cli
