#pragma once

#include "pcarisk/bounds.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pcarisk::cli {

enum ExitCode : int { kOk = 0, kInvariantViolation = 1, kUsage = 2 };

// Parses argv, runs the verb, writes the human summary to `out` and
// diagnostics to `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// key=value lines; '#' starts a comment. Keys: C1 C2 C3 C_display c c1 c_lower.
void read_constants_file(const std::string& path, BoundConstants& k);
// Flat key=value config turned into "--key value" tokens ("--key" alone for true).
std::vector<std::string> config_file_tokens(const std::string& path);

}  // namespace pcarisk::cli
