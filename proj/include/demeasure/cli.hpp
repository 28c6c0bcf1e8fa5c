#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace demeasure::cli {

/// Exit codes; a stable contract for scripts.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kPassError = 2,
  kVerifyFailed = 3,
  kResourceCap = 4,
};

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of `bytes`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace demeasure::cli
