#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace critp::cli {

/// Exit codes: 0 success, 1 a check failed, 2 usage or validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace critp::cli
