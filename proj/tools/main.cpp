// Command-line harness: single closed-loop runs with optional trace capture,
// and batch sweeps over scenarios x planners x seeds.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cormcts/harness.hpp"
#include "cormcts/scenario.hpp"

namespace {

bool deterministic_env() {
  const char* v = std::getenv("CORMCTS_DETERMINISTIC");
  return v != nullptr && std::string(v) == "1";
}

// "a..b" -> [a, a+1, ..., b]; a bare "n" means the single seed n.
std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto pos = text.find("..");
  if (pos == std::string::npos) {
    return {static_cast<std::uint64_t>(std::stoull(text))};
  }
  const std::uint64_t lo = std::stoull(text.substr(0, pos));
  const std::uint64_t hi = std::stoull(text.substr(pos + 2));
  if (hi < lo) throw std::runtime_error("seed range is empty: " + text);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

std::vector<cormcts::PlannerKind> parse_planners(const std::vector<std::string>& names) {
  std::vector<cormcts::PlannerKind> planners;
  for (const auto& entry : names) {
    std::size_t start = 0;
    while (start <= entry.size()) {
      const auto comma = entry.find(',', start);
      const std::string token =
          entry.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!token.empty()) {
        const auto kind = cormcts::planner_from_string(token);
        if (!kind) throw std::runtime_error("unknown planner: " + token);
        planners.push_back(*kind);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return planners;
}

std::vector<std::string> scenario_files(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("no .json scenarios in " + dir);
  return paths;
}

int run_command(const std::string& scenario_path, const std::string& planner_name,
                const cormcts::RunOverrides& overrides, const std::string& trace_out) {
  const auto planner = cormcts::planner_from_string(planner_name);
  if (!planner) {
    std::cerr << "error: unknown planner '" << planner_name << "'\n";
    return 1;
  }
  const auto config = cormcts::load_scenario(scenario_path);
  const auto trace = cormcts::run_scenario(config, *planner, overrides);
  if (!trace_out.empty()) cormcts::write_trace(trace, config, trace_out);

  std::cout << "scenario=" << config.id << " planner=" << cormcts::to_string(*planner)
            << " seed=" << trace.seed << " outcome=" << cormcts::to_string(trace.outcome)
            << " ticks=" << trace.ticks.size() << " planner_ms_median=" << trace.planner_ms_median
            << "\n";
  return trace.outcome == cormcts::MissionStatus::Success ? 0 : 2;
}

int batch_command(const std::string& dir, const std::vector<std::string>& planner_names,
                  const std::string& seed_range, const cormcts::RunOverrides& overrides,
                  const std::string& report_out) {
  const auto paths = scenario_files(dir);
  const auto planners = parse_planners(planner_names);
  if (planners.empty()) throw std::runtime_error("no planners given");
  const auto seeds = parse_seed_range(seed_range);

  const auto report = cormcts::run_batch(paths, planners, seeds, overrides);

  std::ofstream json_out(report_out);
  if (!json_out) throw std::runtime_error("cannot write " + report_out);
  json_out << report.to_json().dump(2) << "\n";

  std::filesystem::path csv_path(report_out);
  csv_path.replace_extension(".csv");
  std::ofstream csv_out(csv_path);
  if (!csv_out) throw std::runtime_error("cannot write " + csv_path.string());
  csv_out << report.runtimes_csv();

  int successes = 0;
  for (const auto& cell : report.cells) {
    if (cell.outcome == cormcts::MissionStatus::Success) ++successes;
  }
  std::cout << "runs=" << report.cells.size() << " successes=" << successes << " report="
            << report_out << " runtimes=" << csv_path.string() << "\n";
  return successes == static_cast<int>(report.cells.size()) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anytime tactical maneuver planning: tree-search and fixed-horizon planners"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string planner_name;
  std::string trace_out;
  std::string decision_rule;
  double budget_ms = 0.0;
  int max_nodes = 0;
  bool no_pruning = false;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* run = app.add_subcommand("run", "Run one scenario closed-loop");
  run->add_option("--scenario", scenario_path, "Scenario JSON path")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--planner", planner_name, "cormcts or fixed")->required();
  run->add_option("--budget-ms", budget_ms, "Wall-clock budget per planning call, in ms");
  run->add_option("--max-nodes", max_nodes, "Tree size cap per planning call");
  run->add_flag("--no-pruning", no_pruning, "Disable infeasible/zero-value branch pruning");
  auto* seed_opt = run->add_option("--seed", seed, "Base RNG seed for the run");
  run->add_option("--trace-out", trace_out, "Write a JSONL trace to this path");
  run->add_option("--decision-rule", decision_rule, "accumulated or mean")
      ->check(CLI::IsMember({"accumulated", "mean"}));

  std::string scenarios_dir;
  std::vector<std::string> planner_list;
  std::string seed_range = "0..19";
  std::string report_out = "report.json";

  auto* batch = app.add_subcommand("batch", "Sweep scenarios x planners x seeds");
  batch->add_option("--scenarios", scenarios_dir, "Directory of scenario JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  batch->add_option("--planners", planner_list, "Comma-separated planner names")->required();
  batch->add_option("--seeds", seed_range, "Seed range a..b (inclusive)");
  batch->add_option("--report-out", report_out, "Aggregate report JSON path");
  batch->add_flag("--no-pruning", no_pruning, "Disable pruning for cormcts runs");
  batch->add_option("--budget-ms", budget_ms, "Wall-clock budget per planning call, in ms");
  batch->add_option("--max-nodes", max_nodes, "Tree size cap per planning call");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints the message; 0 for --help/--version
    return code == 0 ? 0 : 1;
  }
  seed_given = seed_opt->count() > 0;

  cormcts::RunOverrides overrides;
  if (budget_ms > 0.0) overrides.budget_ms = budget_ms;
  if (max_nodes > 0) overrides.max_nodes = max_nodes;
  if (no_pruning) overrides.pruning_enabled = false;
  if (seed_given) overrides.seed = seed;
  if (decision_rule == "accumulated") overrides.decision_rule = cormcts::DecisionRule::Accumulated;
  if (decision_rule == "mean") overrides.decision_rule = cormcts::DecisionRule::Mean;
  overrides.deterministic = deterministic_env();

  try {
    if (run->parsed()) {
      return run_command(scenario_path, planner_name, overrides, trace_out);
    }
    return batch_command(scenarios_dir, planner_list, seed_range, overrides, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
