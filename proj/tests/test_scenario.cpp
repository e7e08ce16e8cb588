#include <doctest.h>

#include "lab/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

nlohmann::json tiny_scenario(std::uint64_t seed, const std::string& out) {
  return nlohmann::json{
      {"preset", {{"name", "flat"}}},
      {"seed", seed},
      {"output_dir", out},
      {"tasks",
       nlohmann::json::array(
           {{{"kind", "stable_norm"}, {"params", {{"h", {2, 1}}, {"n_max", 8}}}},
            {{"kind", "timesep"},
             {"params",
              {{"pairs", {{{0, 0}, {2, 1}}}}, {"segments", 4}, {"restarts", 2}}}}})}};
}

}  // namespace

TEST_CASE("run_scenario: reports written, exit 0, deterministic") {
  const fs::path dir = fs::temp_directory_path() / "lorlab_scenario_test";
  fs::remove_all(dir);
  const auto cfg = tiny_scenario(42, (dir / "a").string());
  REQUIRE(run_scenario(Scenario::from_json(cfg), {}) == 0);
  CHECK(fs::exists(dir / "a" / "summary.json"));
  CHECK(fs::exists(dir / "a" / "task_0_stable_norm.json"));
  CHECK(fs::exists(dir / "a" / "task_0_plateau.csv"));
  CHECK(fs::exists(dir / "a" / "task_1_timesep.json"));

  // identical seed reruns byte-identically
  const auto cfg2 = tiny_scenario(42, (dir / "b").string());
  REQUIRE(run_scenario(Scenario::from_json(cfg2), {}) == 0);
  CHECK(slurp(dir / "a" / "task_0_stable_norm.json") ==
        slurp(dir / "b" / "task_0_stable_norm.json"));
  CHECK(slurp(dir / "a" / "task_1_timesep.json") == slurp(dir / "b" / "task_1_timesep.json"));

  // a different seed changes the optimizer trace
  const auto cfg3 = tiny_scenario(43, (dir / "c").string());
  REQUIRE(run_scenario(Scenario::from_json(cfg3), {}) == 0);
  CHECK(slurp(dir / "a" / "task_1_timesep.json") != slurp(dir / "c" / "task_1_timesep.json"));

  // the summary embeds the fully resolved scenario
  const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(summary["scenario"]["preset"]["name"] == "flat");
  CHECK(summary["status"] == "ok");
}

TEST_CASE("run_scenario_file: malformed configs exit 1 naming the field") {
  const fs::path dir = fs::temp_directory_path() / "lorlab_scenario_bad";
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "bad_preset.json");
    os << R"({"preset": {"name": "klein"}, "tasks": []})";
  }
  CHECK(run_scenario_file(dir / "bad_preset.json") == 1);
  {
    std::ofstream os(dir / "bad_kind.json");
    os << R"({"preset": {"name": "flat"}, "tasks": [{"kind": "fly"}]})";
  }
  CHECK(run_scenario_file(dir / "bad_kind.json") == 1);
  {
    std::ofstream os(dir / "not_json.json");
    os << "{nope";
  }
  CHECK(run_scenario_file(dir / "not_json.json") == 1);
  CHECK(run_scenario_file(dir / "missing.json") == 1);
}

TEST_CASE("run_scenario: task errors embed and exit 2") {
  const fs::path dir = fs::temp_directory_path() / "lorlab_scenario_err";
  fs::remove_all(dir);
  nlohmann::json cfg{
      {"preset", {{"name", "e1_counterexample"}}},
      {"seed", 1},
      {"output_dir", (dir / "out").string()},
      // fill_constant-style failure path: sctp alpha with irrational pairing
      {"tasks", nlohmann::json::array({{{"kind", "sctp"},
                                        {"params", {{"alpha", {1.4142135623730951, 0, 0}}}}}})}};
  CHECK(run_scenario(Scenario::from_json(cfg), {}) == 2);
  const auto rep = nlohmann::json::parse(slurp(dir / "out" / "task_0_sctp.json"));
  CHECK(rep["status"] == "error");
  CHECK(rep.contains("error"));
}

TEST_CASE("emit_plot_data: plateau and kind mismatch") {
  const fs::path dir = fs::temp_directory_path() / "lorlab_scenario_plot";
  fs::remove_all(dir);
  const auto cfg = tiny_scenario(7, (dir / "out").string());
  REQUIRE(run_scenario(Scenario::from_json(cfg), {}) == 0);
  const fs::path rep = dir / "out" / "task_0_stable_norm.json";
  CHECK(emit_plot_data(rep, "plateau", dir / "plateau.csv") == 0);
  const std::string csv = slurp(dir / "plateau.csv");
  CHECK(csv.rfind("n,dist_over_n\n", 0) == 0);
  CHECK(emit_plot_data(rep, "cone_section", dir / "bad.csv") == 1);
  CHECK(emit_plot_data(rep, "nonsense", dir / "bad.csv") == 1);
}

TEST_CASE("builtin scenario pack resolves") {
  CHECK(find_builtin_scenario("accept/flat-cone").has_value());
  CHECK_FALSE(find_builtin_scenario("accept/nope").has_value());
  for (const auto& [name, j] : builtin_scenarios()) {
    CAPTURE(name);
    CHECK_NOTHROW(Scenario::from_json(j));
  }
}
