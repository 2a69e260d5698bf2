#pragma once

// Config-driven experiment runner. A JSON config names a command and the
// channels it needs; run() writes CSV files plus manifest.json into the
// output directory and returns the manifest.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qrelay {

enum class Command { polarize, sets, capacity, relay_sim, superactivate, sweep };

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string& name);

// Channel description as written in the config, e.g. {"kind": "bec", "epsilon": 0.5}.
struct ChannelSpec {
  std::string kind;
  nlohmann::json params;  // the full object, kind included
};

struct ExperimentConfig {
  Command command = Command::polarize;
  std::optional<ChannelSpec> channel;        // classical, polarize
  std::optional<ChannelSpec> amp_channel;    // classical
  std::optional<ChannelSpec> phase_channel;  // classical
  std::optional<ChannelSpec> pauli_channel;  // quantum Pauli-type; induces amp/phase
  std::optional<ChannelSpec> main_channel;   // quantum qubit channel
  int k = 10;
  double beta = 0.45;
  double p_e2 = 0.3;
  double p = 0.5;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::size_t alphabet_cap = 4096;
  bool approximate_merge = false;
  std::size_t quantize_bins = 256;
  std::string rho_ac = "alternating";  // alternating | literal | product

  nlohmann::json echo() const;
};

// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<Command> command;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

// Validates everything and throws one ConfigError listing every violation.
ExperimentConfig parse_config(const nlohmann::json& j, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

struct OutputFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string version;
  nlohmann::json config;
  double wall_seconds = 0.0;
  std::string output_dir;
  std::vector<OutputFile> outputs;
  // Ordered (name, value) pairs for the report table.
  std::vector<std::pair<std::string, std::string>> summary;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

std::string software_version();
std::string sha256_hex(const std::string& bytes);

RunManifest run(const ExperimentConfig& config);
RunManifest load_manifest(const std::filesystem::path& path);

// Plain-text table of the summary plus data file paths. Throws Error when the
// manifest lists no outputs or a listed file is missing.
std::string render_report(const RunManifest& manifest);

}  // namespace qrelay
