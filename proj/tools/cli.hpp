#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eips::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "EIPS_OUTPUT_DIR";

/// Exit codes: 0 success, 1 failed checks or runtime error, 2 rejected input
/// (trivial PQI, no stabilizing lambda, unknown case study, bad arguments).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eips::cli
