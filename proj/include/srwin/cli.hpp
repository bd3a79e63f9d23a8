#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "srwin/sim.hpp"

namespace srwin::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitUsage = 2,
  kExitSimulation = 3,
  kExitIo = 4,
};

/// A malformed or out-of-range setting; key() names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using Settings = std::map<std::string, std::string>;

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Unknown keys and lines without '=' raise ConfigError.
Settings parse_config_text(std::string_view text);

/// Builds an experiment from layered settings (later layers win). B defaults
/// to W when absent. Rejects p outside [0, 1), W < 1 and B not dividing W.
sim::ExperimentConfig build_config(const Settings& settings);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view field);

/// Entry point behind the srwin executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace srwin::cli
