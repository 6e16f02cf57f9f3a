#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qdlab/errors.hpp"
#include "qdlab/parallel.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitResourceLimit = 3;

using qdlab::cli::json;

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  qdlab::require(static_cast<bool>(in), "cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw qdlab::InvalidArgument("config " + path + ": " + e.what());
  }
  qdlab::require(doc.is_object(), "config " + path + ": top level must be an object");
  return doc;
}

int fail(int code, const std::string& message) {
  std::cerr << "qdlab: error: " << message << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qdlab: sparse Jacobi spectra, spin-glass bounds and disordered spin dynamics"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", QDLAB_VERSION);

  std::string config_path;
  std::string out_dir = ".";
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config: {\"command\", \"seed\", \"params\"}; a manifest works too");
  app.add_option("--out", out_dir, "output directory for CSV files and manifest.json")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (default: QDLAB_THREADS, else logical cores)");
  auto* seed_opt = app.add_option("--seed", seed, "global seed");

  std::map<const qdlab::cli::Command*, std::map<std::string, std::string>> flags;
  std::map<const qdlab::cli::Command*, CLI::App*> leaves;
  std::map<std::string, CLI::App*> groups;
  for (const auto& command : qdlab::cli::all_commands()) {
    CLI::App* parent = &app;
    if (command.path.size() == 2) {
      auto& group = groups[command.path[0]];
      if (group == nullptr) {
        group = app.add_subcommand(command.path[0]);
        group->require_subcommand(1);
      }
      parent = group;
    }
    auto* leaf = parent->add_subcommand(command.path.back(), command.description);
    auto& values = flags[&command];
    for (const auto& spec : command.params) {
      leaf->add_option_function<std::string>(
          "--" + spec.name, [&values, name = spec.name](const std::string& v) { values[name] = v; },
          spec.help + " [default: " + spec.default_value.dump() + "]");
    }
    leaves[&command] = leaf;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitInvalidConfig, e.what());
  }

  const qdlab::cli::Command* selected = nullptr;
  for (const auto& [command, leaf] : leaves) {
    if (leaf->parsed()) selected = command;
  }
  if (selected == nullptr) return fail(kExitInvalidConfig, "no subcommand selected");

  try {
    qdlab::cli::RunRequest request;
    request.command = selected;
    request.flags = flags[selected];
    request.out_dir = out_dir;
    if (!config_path.empty()) {
      const json doc = load_config(config_path);
      if (doc.contains("command")) {
        qdlab::require(doc.at("command").is_string() && doc.at("command").get<std::string>() == selected->name(),
                       "config is for command " + doc.at("command").dump() + ", not '" + selected->name() + "'");
      }
      if (doc.contains("seed")) {
        qdlab::require(doc.at("seed").is_number_unsigned(), "config: seed must be a non-negative integer");
        request.seed = doc.at("seed").get<std::uint64_t>();
      }
      if (doc.contains("params")) request.config_params = doc.at("params");
    }
    if (seed_opt->count() > 0) request.seed = seed;
    if (threads > 0) qdlab::set_worker_count(threads);
    qdlab::cli::execute(request);
  } catch (const qdlab::InvalidArgument& e) {
    return fail(kExitInvalidConfig, e.what());
  } catch (const qdlab::ResourceLimit& e) {
    return fail(kExitResourceLimit, e.what());
  } catch (const json::exception& e) {
    return fail(kExitInvalidConfig, e.what());
  } catch (const std::exception& e) {
    return fail(kExitFailure, e.what());
  }
  return kExitOk;
}
