#pragma once

// Scenario execution for the command-line front end.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chiprobe/config.hpp"
#include "chiprobe/error.hpp"

namespace chiprobe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitComputation = 2;
inline constexpr int kExitIo = 3;

struct RunOutcome {
  int exit_code = kExitOk;
  std::string summary;  // one line, printed by the front end
  std::vector<std::filesystem::path> artifacts;
  std::size_t points_total = 0;
  std::size_t points_failed = 0;
};

/// Runs the configured command, writes its CSV datasets into config.output
/// and always finishes with manifest.txt there (if the directory can be
/// created). Never throws.
RunOutcome execute(const RunConfig& config);

/// Exit code for an error category.
int exit_code_for(ErrorCode code);

const char* library_version();

}  // namespace chiprobe
