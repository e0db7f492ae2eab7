#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kk {

/// Exit codes: 0 success, 1 usage or domain error, 2 theorem violation found.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

/// Runs one `kk` command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kk
