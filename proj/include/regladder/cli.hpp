#pragma once

// Experiment orchestration shared by the `regladder` executable and the
// tests: config parsing and validation, dispatch to the module operations,
// and JSON/CSV report emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace regladder::cli {

inline constexpr const char* kVersion = "1.0.0";

enum class Command { norm, ladder, embed, wavelet, sim2d, dmj, sim3d, report };

std::optional<Command> parse_command(std::string_view name);
std::string to_string(Command c);
const std::vector<Command>& all_commands();

/// Raised for schema violations; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config: key '" + key + "' " + what), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class ParamType { number, integer, string, number_list, extended, object };

struct ParamSpec {
  std::string key;
  ParamType type;
  std::string help;
};

/// Parameters accepted under `params` for a command.
const std::vector<ParamSpec>& param_schema(Command c);

struct RunConfig {
  Command command = Command::report;
  std::filesystem::path input;   // binary grid file
  std::filesystem::path atoms;   // atom CSV file
  std::filesystem::path out_dir; // empty: no artifact files
  std::uint64_t seed = 0;
  int threads = 0;               // 0 keeps the OpenMP default
  nlohmann::json params = nlohmann::json::object();

  /// Parses and validates a config document of the form
  /// {"command", "input", "atoms", "out", "seed", "threads", "params"}.
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig from_file(const std::filesystem::path& path);

  /// Checks parameter names and types against the schema and that
  /// referenced files exist. Throws ConfigError.
  void validate() const;
};

struct Check {
  std::string name;
  std::string anchor;
  double lhs = 0;
  double rhs = 0;
  bool asserted = true;  // false: reported as a flag only
  double rel_tol = 1e-12;

  bool pass() const;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void write_csv(const std::filesystem::path& path) const;
};

struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::string timestamp;
  nlohmann::json values = nlohmann::json::object();
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::set<std::string> ops;  // module operations invoked

  bool ok() const;  // every asserted check passes
  const Table* table(std::string_view name) const;
  nlohmann::json to_json(bool with_timestamp = true) const;
};

/// Executes the command. When `config.out_dir` is set, writes report.json,
/// one CSV per table, and command-specific artifacts into it. Module
/// precondition failures propagate as PreconditionError.
Report run(const RunConfig& config);

struct MatrixRow {
  std::string anchor;
  std::string module;
  std::string op;
  Command command;
  std::string test;
};

/// Coverage matrix: every result the toolkit checks, the operation that
/// implements it, the command that reaches it and the test exercising it.
const std::vector<MatrixRow>& theorem_matrix();
std::string theorem_matrix_text();

/// Sets the log level from REGLADDER_LOG (off, error, warn, info, debug).
void init_logging();

}  // namespace regladder::cli
