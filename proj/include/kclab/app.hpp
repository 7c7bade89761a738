#pragma once

// Command implementations behind the kclab executable. Each returns the
// process exit code: 0 ok, 1 verdict mismatch, 2 config or usage error,
// 3 numerical fault.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kclab {

enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitConfig = 2, kExitNumerical = 3 };

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, double>> tolerances;
  std::optional<std::string> out_dir;
  int threads = 1;
};

/// Parses "name=value"; throws ConfigError.
std::pair<std::string, double> parse_tolerance_override(const std::string& text);

int run_command(const std::string& config_path, const CommandOptions& opts, std::ostream& log);
int sweep_command(const std::string& config_path, const std::string& param, const std::string& grid,
                  const CommandOptions& opts, std::ostream& log);
int oracle_command(const std::string& config_path, const CommandOptions& opts, std::ostream& log);
int search_command(const std::string& config_path, const CommandOptions& opts, std::ostream& log);

}  // namespace kclab
