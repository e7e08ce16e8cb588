#pragma once

// Batch front end: scenario configs in, JSON/CSV reports out. Reports are
// self-describing (the resolved config with defaults is embedded) and
// deterministic for a fixed seed; no timestamps are written.

#include "lab/certify.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lab {

struct TaskSpec {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
};

struct Scenario {
  PresetSpec preset;
  std::vector<TaskSpec> tasks;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  static Scenario from_json(const nlohmann::json& j);
  nlohmann::json resolved() const;
};

// task kinds understood by run_scenario
const std::vector<std::string>& known_task_kinds();

struct RunOptions {
  bool parallel = false;
  int threads = 0;  // 0 -> LAB_THREADS env or hardware concurrency
  std::string output_dir_override;
};

// exit status: 0 all tasks ran, 1 malformed config, 2 some task errored
// (errors are embedded in the task reports)
int run_scenario(const Scenario& scenario, const RunOptions& options = {});
int run_scenario_file(const std::filesystem::path& config_path, const RunOptions& options = {});

// re-emits plottable CSV data from a task report; exit 1 on kind mismatch
int emit_plot_data(const std::filesystem::path& report_path, const std::string& kind,
                   const std::filesystem::path& out_csv);

// named scenario pack (acceptance-criteria runs ship as "accept/...")
const std::map<std::string, nlohmann::json>& builtin_scenarios();
std::optional<nlohmann::json> find_builtin_scenario(const std::string& name);

}  // namespace lab
