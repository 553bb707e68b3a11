#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netmisfit {

inline constexpr int kExitWellSpecified = 0;
inline constexpr int kExitMisspecified = 1;
inline constexpr int kExitDegenerate = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitInternal = 70;

/// Runs the command line (without the program name). JSON goes to `out`,
/// human-readable messages to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netmisfit
