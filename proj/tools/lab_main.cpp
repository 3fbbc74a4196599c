// lab: run one named experiment and write its artifacts.
//
//   lab <experiment> [--config file] [--set key=value]... --out dir
//       [--seed u64] [--threads n]
//   lab list
//
// Exit codes: 0 all checks passed, 2 some check failed, 3 inconclusive,
// 64 usage error (including unknown experiment), 65 bad configuration.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "occlab/errors.hpp"
#include "occlab/experiments.hpp"
#include "occlab/io.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitConfig = 65;

int run(int argc, char** argv) {
  CLI::App app{"occupation-measure laboratory"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CLI::App* list_cmd = app.add_subcommand("list", "list experiments and their defaults");

  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::uint64_t seed = 1;
  int threads = 1;

  std::vector<CLI::App*> run_cmds;
  for (const occlab::ExperimentInfo& info : occlab::experiment_registry()) {
    CLI::App* cmd = app.add_subcommand(info.name, info.summary);
    cmd->add_option("--config", config_file, "config file (key = value lines or flat JSON)");
    cmd->add_option("--set", overrides, "override, key=value")->take_all();
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--threads", threads, "worker threads (<=1 serial)");
    run_cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // Surface the registry on an unknown experiment name; CLI11 reports it
    // as an extras error on the top-level app.
    if (app.get_subcommands().empty() && argc > 1 && argv[1][0] != '-') {
      std::cerr << "unknown experiment: " << argv[1] << "\n\n"
                << occlab::list_experiments_text();
      return kExitUsage;
    }
    app.exit(e);
    return kExitUsage;
  }

  if (list_cmd->parsed()) {
    std::cout << occlab::list_experiments_text();
    return 0;
  }

  occlab::RunContext ctx;
  for (CLI::App* cmd : run_cmds) {
    if (cmd->parsed()) ctx.experiment = cmd->get_name();
  }
  ctx.seed = seed;
  ctx.threads = threads;
  ctx.out_dir = out_dir;

  try {
    if (!config_file.empty()) ctx.config = occlab::load_config_file(config_file);
    for (const std::string& kv : overrides) occlab::apply_override(ctx.config, kv);
    const occlab::RunStatus status = occlab::run_experiment(ctx);
    std::cout << ctx.experiment << ": "
              << (status == occlab::RunStatus::kPass   ? "pass"
                  : status == occlab::RunStatus::kFail ? "fail"
                                                       : "inconclusive")
              << "\n";
    return static_cast<int>(status);
  } catch (const occlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const occlab::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
