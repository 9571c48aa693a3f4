#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace avcert::cli {

enum ExitCode : int {
  kOk = 0,
  kSafetyViolation = 1,
  kUsage = 2,
  kInvalid = 3,
  kIoOrParse = 4,
  kGateRefused = 5,
};

/// Default output directory, overridable through this environment variable.
inline constexpr const char* kOutEnv = "AVCERT_OUT";

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "<subcommand path> <option>" for every option lacking a description.
std::vector<std::string> undocumented_options();

/// Every option of every subcommand. `command` is the full command path
/// ("avcert pipeline advance"), `help` the option description.
struct HelpEntry {
  std::string command;
  std::string option;
  std::string help;
};
std::vector<HelpEntry> help_entries();

}  // namespace avcert::cli
