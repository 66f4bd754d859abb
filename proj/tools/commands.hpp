#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stegseg/error.hpp"

namespace stegseg::cli {

enum ExitCode : int {
  kOk = 0,
  kCapacity = 2,
  kWrongPassword = 3,
  kIntegrity = 4,
  kMissingSegments = 5,
  kIoOrFormat = 6,
  kUsage = 64,
};

int exit_code_for(Errc code) noexcept;

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stegseg::cli
