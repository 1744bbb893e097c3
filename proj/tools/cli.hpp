#pragma once

// Subcommands of the mfd tool, callable without going through argv.
//
// A RunConfig is {command, seed, format, params}. Parameters are merged as
// built-in defaults <- --config file <- explicit flags. The resolved config
// (without thread count and output dir, which never change results) is
// written as run_config.json; its FNV-1a hash stamps every output file.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfd::cli {

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::string format = "csv";
  nlohmann::json params = nlohmann::json::object();
  int threads = 1;
  std::filesystem::path out = ".";

  /// The part of the config that determines the outputs.
  nlohmann::json replayable() const;
  std::string hash() const;
};

/// Built-in parameters of a subcommand; throws for an unknown command.
nlohmann::json default_params(const std::string& command);

/// Defaults merged with `overrides` (JSON merge-patch); unknown keys rejected.
RunConfig make_config(const std::string& command, const nlohmann::json& overrides = nlohmann::json::object());

struct CommandReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Runs a subcommand, writing into cfg.out (created if missing).
CommandReport run_command(const RunConfig& cfg);

/// argv front end; returns the process exit code.
int run_main(int argc, char** argv);

}  // namespace mfd::cli
