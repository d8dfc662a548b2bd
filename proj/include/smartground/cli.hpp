#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smartground::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInputError = 2, kBudget = 3, kInternal = 4 };

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace smartground::cli
