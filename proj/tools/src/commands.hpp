#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "csv.hpp"
#include "params.hpp"

namespace qdlab::cli {

class RunContext {
 public:
  RunContext(const Params& params, std::uint64_t seed, std::filesystem::path out_dir)
      : params(params), seed(seed), out_dir_(std::move(out_dir)) {}

  /// Opens <out>/<name> and records it as an output of the run.
  CsvWriter csv(const std::string& name, const std::vector<std::string>& comments,
                std::vector<std::string> columns);

  const Params& params;
  const std::uint64_t seed;
  json summary = json::object();
  std::vector<std::string> outputs;

 private:
  std::filesystem::path out_dir_;
};

struct Command {
  std::vector<std::string> path;  ///< e.g. {"ea", "cluster-bound"}
  std::string description;
  std::vector<ParamSpec> params;
  std::function<void(RunContext&)> run;

  std::string name() const;
};

const std::vector<Command>& all_commands();
const Command* find_command(const std::string& name);

struct RunRequest {
  const Command* command = nullptr;
  json config_params;                          ///< "params" object from a config file (or null)
  std::map<std::string, std::string> flags;    ///< raw command-line values
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
};

/// Resolves parameters, runs the command, writes the CSV outputs and
/// manifest.json. Returns the manifest.
json execute(const RunRequest& request);

}  // namespace qdlab::cli
