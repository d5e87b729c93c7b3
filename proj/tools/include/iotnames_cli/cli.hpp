#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iotnames::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitRuntime = 2;

/// Runs one command line. `args` excludes the program name. Result files go
/// under --output-dir; `out` receives stdout-style output and `err` progress
/// and diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace iotnames::cli
