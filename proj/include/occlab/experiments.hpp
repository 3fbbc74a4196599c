#pragma once

// Named experiments behind the lab CLI: a fixed registry with per-experiment
// defaults, dispatch, and report/table assembly.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "occlab/io.hpp"
#include "occlab/sampling_laws.hpp"

namespace occlab {

struct ExperimentInfo {
  std::string name;
  std::string summary;
  Config defaults;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo* find_experiment(const std::string& name);
std::string list_experiments_text();

enum class RunStatus : int { kPass = 0, kFail = 2, kInconclusive = 3 };

// In-memory result of one experiment: verdicts drive the exit status, the
// summary and tables become report.json and tables/*.csv.
struct ExperimentOutcome {
  std::vector<CheckVerdict> verdicts;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::pair<std::string, CsvTable>> tables;
  Config effective;  // defaults overlaid with the caller's overrides

  RunStatus status() const;
};

// Merges overrides onto the registry defaults (rejecting unknown keys) and
// runs the named experiment. Throws ConfigError for bad parameters; the
// caller resolves the name against the registry first.
ExperimentOutcome run_experiment_core(const std::string& name, const Config& overrides,
                                      std::uint64_t seed, int threads);

// run_experiment_core plus artifacts: writes report.json, tables/*.csv and
// manifest.json under ctx.out_dir.
RunStatus run_experiment(const RunContext& ctx);

}  // namespace occlab
