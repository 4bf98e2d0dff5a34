#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "layerspec/cli/config.hpp"
#include "layerspec/error.hpp"

namespace layerspec::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum class Command { describe, check, totals, certify, spectrum, counterexample, catalog };
const char* to_string(Command c) noexcept;
/// Throws Error(config) for unknown names.
Command parse_command(const std::string& name);

/// 0 success, 2 hypothesis violation, 3 numerical failure, 4 configuration.
int exit_code(ErrorKind kind) noexcept;

struct CsvTable {
  std::string name;  // file is <command>_<name>.csv
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunOutput {
  nlohmann::json report;   // deterministic for a given config and version
  nlohmann::json timings;  // wall-clock seconds, kept out of the report
  std::vector<CsvTable> tables;
  std::vector<std::string> summary;  // lines for stdout
};

/// Runs a command in memory. Throws layerspec::Error.
RunOutput execute(Command command, const RunConfig& config, bool force);

struct RunOptions {
  std::string out_dir;  // empty: output.dir from the config
  bool force = false;
};

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> files;
  std::string message;
};

/// execute() plus file output. Errors become an exit code and an error report
/// (<command>.json with status "error"); nothing is thrown for Error kinds.
RunResult run(Command command, const RunConfig& config, const RunOptions& options);

/// {"value": v, "exact": true}; non-finite values are written as strings.
nlohmann::json exact(double v);
/// {"value": v, "error": e}.
nlohmann::json measured(double v, double e);

}  // namespace layerspec::cli
