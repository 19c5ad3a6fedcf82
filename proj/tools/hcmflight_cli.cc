// Copyright 2026 The hcmflight Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: train, eval, viz, report, selftest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "checks/acceptance_criteria.h"
#include "hcmflight/config.h"
#include "hcmflight/metrics.h"
#include "hcmflight/trainer.h"
#include "hcmflight/visitation.h"

namespace fs = std::filesystem;
using namespace hcmflight;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

int run_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out) {
  RunConfig config = load_config(config_path);
  if (seed) config.seed = *seed;
  if (!out.empty()) config.out_dir = out;
  config.validate();
  const TrainArtifacts a = train(config);
  std::cout << "batches: " << a.batches << "\nmetrics: " << a.metrics_path
            << "\ncheckpoints: " << a.checkpoints.size()
            << "\ngrid snapshots: " << a.grid_snapshots.size() << "\n";
  return 0;
}

int run_eval(const std::string& checkpoint, int episodes,
             std::optional<std::uint64_t> seed, const std::string& config_path,
             const std::string& out) {
  if (!fs::exists(checkpoint)) {
    throw std::runtime_error("checkpoint not found: " + checkpoint);
  }
  std::optional<RunConfig> override;
  if (!config_path.empty()) override = load_config(config_path);
  const EvaluationReport report =
      evaluate_checkpoint(checkpoint, episodes, seed, override, out);
  std::cout << report.to_csv();
  std::cout << "failed: " << report.failed() << "/" << report.flights.size() << "\n";
  if (!out.empty()) {
    std::ofstream(fs::path(out) / "report.csv") << report.to_csv();
  }
  return 0;
}

int run_viz(const std::string& grid_path, const std::string& out) {
  std::ifstream in(grid_path);
  if (!in) throw std::runtime_error("cannot read grid: " + grid_path);
  std::ostringstream text;
  text << in.rdbuf();
  const VisitationGrid grid = VisitationGrid::from_csv(text.str());
  write_pgm(out, render_grid(grid));
  fs::path csv = out;
  csv.replace_extension(".csv");
  std::ofstream(csv) << normalized_csv(grid);
  std::cout << "wrote " << out << " and " << csv.string() << "\n";
  return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<std::vector<MetricsRow>> runs;
  for (const auto& path : inputs) runs.push_back(read_metrics_csv(path));
  const std::string table = aggregate_metrics(runs);
  if (out.empty()) {
    std::cout << table;
  } else {
    std::ofstream(out) << table;
  }
  return 0;
}

int run_selftest() {
  const fs::path scratch = fs::temp_directory_path() / "hcmflight-selftest";
  fs::create_directories(scratch);
  bool ok = true;
  for (const auto& r : acceptance::run_all(false, scratch.string())) {
    std::cout << acceptance::format(r) << "\n";
    ok = ok && r.passed;
  }
  fs::remove_all(scratch);
  return ok ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curiosity-driven quadrotor flight training"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint, grid_path, viz_out, report_out;
  std::uint64_t seed = 0;
  int episodes = 1;
  std::vector<std::string> report_inputs;

  auto* train_cmd = app.add_subcommand("train", "Train a policy from a config file");
  train_cmd->add_option("--config", config_path, "Config file")->required();
  auto* seed_opt = train_cmd->add_option("--seed", seed, "Override the config seed");
  train_cmd->add_option("--out", out_dir, "Override the output directory");

  std::string eval_config, eval_out;
  std::uint64_t eval_seed = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint deterministically");
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--episodes", episodes, "Number of flights")
      ->required()
      ->check(CLI::PositiveNumber);
  auto* eval_seed_opt = eval_cmd->add_option("--seed", eval_seed, "Environment seed");
  eval_cmd->add_option("--config", eval_config, "Config overriding the stored one");
  eval_cmd->add_option("--out", eval_out, "Directory for trajectories and report");

  auto* viz_cmd = app.add_subcommand("viz", "Render a visitation grid");
  viz_cmd->add_option("--grid", grid_path, "Grid CSV")->required();
  viz_cmd->add_option("--out", viz_out, "Output graymap (.pgm)")->required();

  auto* report_cmd = app.add_subcommand("report", "Aggregate metrics across runs");
  report_cmd->add_option("metrics", report_inputs, "Metrics CSV files")->required();
  report_cmd->add_option("--out", report_out, "Output CSV (default stdout)");

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the oracle and property checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_cmd) {
      return run_train(config_path,
                       *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt,
                       out_dir);
    }
    if (*eval_cmd) {
      return run_eval(checkpoint, episodes,
                      *eval_seed_opt ? std::optional<std::uint64_t>(eval_seed)
                                     : std::nullopt,
                      eval_config, eval_out);
    }
    if (*viz_cmd) return run_viz(grid_path, viz_out);
    if (*report_cmd) return run_report(report_inputs, report_out);
    if (*selftest_cmd) return run_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
