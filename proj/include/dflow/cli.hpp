#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace dflow::cli {

enum ExitCode : int { kOk = 0, kError = 1, kNotConverged = 2 };

struct CliConfig {
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path output_dir = ".";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads;
  bool quiet = false;
};

int cmd_flow(const CliConfig& cfg);
int cmd_campaign(const CliConfig& cfg);
int cmd_spectrum(const CliConfig& cfg);
int cmd_truncation(const CliConfig& cfg);
int cmd_lindblad_sample(const CliConfig& cfg);

// Dispatches to a command. Library errors become exit code 1 with a one-line JSON object
// {"error": {"kind": ..., "message": ...}} on stderr.
int run(const CliConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace dflow::cli
