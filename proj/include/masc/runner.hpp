#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "masc/agents/config.hpp"
#include "masc/baselines.hpp"
#include "masc/env_spec.hpp"
#include "masc/metrics.hpp"

namespace masc {

// Every cell is evaluated on this many deterministic episodes.
inline constexpr int kEvalEpisodes = 100;

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "MASC_OUTPUT_ROOT";

// One experiment: the cartesian product of the list-valued fields gives the
// cells, and each cell runs once per seed.
//
// INI layout:
//   [experiment]  demand, architecture, algorithm, reward, seeds, horizon,
//                 iterations, convergence_window, convergence_tol,
//                 min_iterations, hidden, output, strict_actions,
//                 eoq_order_cost, initial_price, jobs
//   [ppo]         overrides of PpoConfig fields by name
//   [sac]         overrides of SacConfig fields by name
//   [heuristic]   base_stock_target, constant_order, price
// Lists are comma separated. Unknown sections or keys are errors.
struct ExperimentConfig {
  std::vector<std::string> demands{"low"};
  std::vector<std::string> architectures{"homo"};
  // sac, ppo, random, basestock or constant
  std::vector<std::string> algorithms{"sac"};
  std::vector<std::string> rewards{"baseline"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int horizon = 30;
  int iterations = 500;
  int convergence_window = 20;
  double convergence_tol = 0.01;
  int min_iterations = 0;
  std::vector<int> hidden{256, 256};
  // Empty: take the output root from the environment, else "runs".
  std::string output;
  bool strict_actions = false;
  double eoq_order_cost = 1.0;
  double initial_price = 3.0;
  int jobs = 1;
  std::map<std::string, std::string> ppo;
  std::map<std::string, std::string> sac;
  double base_stock_target = 15.0;
  double constant_order = 10.0;
  double heuristic_price = 3.0;

  bool operator==(const ExperimentConfig&) const = default;

  // Throws ConfigError on empty or duplicate seeds, bad names, horizon < 1,
  // iterations < 1 or malformed overrides.
  void validate() const;
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void serialize_experiment_config(std::ostream& out, const ExperimentConfig& config);

bool is_learning_algorithm(const std::string& algorithm);

// One point of the experiment matrix.
struct Cell {
  std::string demand;
  std::string architecture;
  std::string algorithm;
  std::string reward;

  GroupKey key() const { return {architecture, algorithm, reward, demand}; }
  std::string name() const;
};

std::vector<Cell> expand_cells(const ExperimentConfig& config);

// Fully resolved inputs of one cell.
EnvSpec make_env_spec(const ExperimentConfig& config, const Cell& cell);
AgentConfig make_agent_config(const ExperimentConfig& config, const Cell& cell);
HeuristicPolicy make_heuristic(const ExperimentConfig& config, const Cell& cell,
                               std::uint64_t seed);

struct RunRecord {
  Cell cell;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;
  int iterations = 0;
  bool converged = false;
  int converged_at = -1;
  bool failed = false;
  std::string note;
  double wall_seconds = 0.0;
};

struct RunArtifacts {
  std::filesystem::path root;
  std::filesystem::path config_snapshot;
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
};

// Output root: explicit value, else $MASC_OUTPUT_ROOT, else "runs".
std::filesystem::path resolve_output_root(const std::string& configured);

// Trains and evaluates every (cell, seed). `config_text` is written verbatim
// as the config snapshot. Failures of one run are recorded and do not stop
// the others. Throws std::runtime_error when the output root is unwritable.
RunArtifacts run(const ExperimentConfig& config, const std::string& config_text);

// Executes a single (cell, seed) into `dir`.
RunRecord run_one(const ExperimentConfig& config, const Cell& cell, std::uint64_t seed,
                  const std::filesystem::path& dir);

struct InventoryDelta {
  std::string architecture;
  std::string algorithm;
  std::string demand_regime;
  double baseline_retailer = 0.0;
  double colla_retailer = 0.0;
  double baseline_factory = 0.0;
  double colla_factory = 0.0;
};

struct Report {
  std::vector<SummaryRow> rows;
  std::vector<InventoryDelta> deltas;
  // EOQ per echelon and demand regime, as (label, real, rounded).
  struct Eoq {
    std::string label;
    double value = 0.0;
    double rounded = 0.0;
  };
  std::vector<Eoq> eoq;
};

// Rebuilds the comparison from the artifacts under `root`.
Report build_report(const std::filesystem::path& root, double eoq_order_cost = 1.0);
std::vector<InventoryDelta> inventory_deltas(const std::vector<SummaryRow>& rows);
void write_report(std::ostream& out, const Report& report);

}  // namespace masc
