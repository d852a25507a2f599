#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsn::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kValidationFailed = 4,
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "TSNSIM_OUT_DIR";

/// Runs the tool with `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace tsn::cli
