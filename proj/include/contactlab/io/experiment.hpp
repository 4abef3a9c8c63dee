#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contactlab/numerics/box.hpp"
#include "json.hpp"

namespace contactlab {

using Json = nlohmann::ordered_json;

enum class Command { twobody, resonance, contact_spectrum, critical, gp_groundstate, gp_evolve, sweep, bs_kernel, cross_term };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

struct ExperimentConfig {
  Command command = Command::twobody;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  Json parameters = Json::object();  // every key present once resolved

  Json to_json() const;
};

// Fills defaults and rejects unknown keys (ValidationError unknown_key, with
// the dotted path). When `command` is given, a "command" entry in the document
// must agree with it.
ExperimentConfig resolve_config(const Json& doc, std::optional<Command> command = std::nullopt);
Json load_config_file(const std::filesystem::path& path);

struct Table {
  std::string name;  // written as <name>.csv
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct NamedField {
  std::string name;  // written as <name>.fld
  std::shared_ptr<const WaveField> field;
};

struct RunReport {
  Json config_echo;
  std::string status = "ok";  // ok | numerical_failure
  Json results = Json::object();
  Json provenance = Json::object();
  std::vector<std::string> warnings;
  Json error;  // null unless status is numerical_failure
  std::vector<Table> tables;
  std::vector<NamedField> fields;
  double wall_seconds = 0.0;  // goes to timing.json so report.json stays reproducible
};

// Validation problems throw before any work; numerical failures are caught
// and returned as a partial report with status numerical_failure.
RunReport run_experiment(const ExperimentConfig& cfg);

// report.json, one CSV per table, one .fld per field, timing.json.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

// Two-space indented JSON with doubles in %.17g; key order as stored.
std::string dump_json(const Json& j);
std::string format_number(double v);

// contactlab <command> --config <path> [--out <dir>] [--seed N]
// Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 1 anything else.
int run_cli(int argc, const char* const* argv);

}  // namespace contactlab
