#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hydrob/config.hpp"

namespace hydrob {

/// Exit codes shared by the command-line driver and `execute`.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitBlowup = 2,
  kExitMonitor = 3,
  kExitIo = 4,
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the INI text into a RunConfig, filling defaults. Syntax errors carry
/// the offending line; unknown sections or keys and malformed values are
/// reported together. No range validation.
RunConfig parse_config(std::string_view text);

/// parse_config followed by validate(); throws ConfigError listing every issue.
RunConfig load_config(std::string_view text, Mode mode);

/// INI text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

std::string format_double(double v);  // 17 significant digits

struct ExecuteResult {
  int exit_code = kExitOk;
  std::string message;
  std::string summary;  // summary.json contents
};

/// Runs `mode` and writes manifest.json, the mode's CSV files and
/// summary.json into `out_dir` (created if needed). Identical inputs give
/// byte-identical files. Validation failures return kExitConfig without
/// touching the directory.
ExecuteResult execute(const RunConfig& config, Mode mode, const std::filesystem::path& out_dir);

std::string_view version();

}  // namespace hydrob
