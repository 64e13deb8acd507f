#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exvocab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "EXVOCAB_CONFIG";

// Runs one invocation. `args` excludes the program name. Progress goes to
// `out`, diagnostics to `err`. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace exvocab::cli
