#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fwdaffine {

constexpr int kSchemaVersion = 1;

enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

// Entry point shared by the executable and the tests. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fwdaffine
