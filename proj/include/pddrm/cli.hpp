#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pddrm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerifyFailed = 2;
inline constexpr int kExitConfig = 3;

/// Runs one `pddrm` invocation. `args` excludes the program name, e.g.
/// {"run", "--problem", "forward", ...}. Returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pddrm
