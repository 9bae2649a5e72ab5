#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "masc/agents/trainer.hpp"
#include "masc/runner.hpp"

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw masc::ConfigError("cannot read config " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-echelon supply chain simulator with multi-agent RL trainers"};
  app.require_subcommand(1);

  std::string config_path, seeds, out_dir, demand, arch, algo, reward;
  int iters = 0, jobs = 0;
  bool strict = false;
  auto* run_cmd = app.add_subcommand("run", "Train and evaluate every cell of an experiment");
  run_cmd->add_option("--config", config_path, "Experiment INI file")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seeds, "Comma-separated seeds");
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--demand", demand, "high or low (comma list allowed)");
  run_cmd->add_option("--arch", arch, "homo or hetero (comma list allowed)");
  run_cmd->add_option("--algo", algo, "sac, ppo, random, basestock, constant");
  run_cmd->add_option("--reward", reward, "baseline, pearso, peafso, colla");
  run_cmd->add_option("--iters", iters, "Iteration cap")->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--strict-actions", strict, "Reject out-of-range actions");

  std::string report_dir;
  double order_cost = 1.0;
  auto* report_cmd = app.add_subcommand("report", "Summarize the artifacts of a finished run");
  report_cmd->add_option("--out", report_dir, "Run output directory");
  report_cmd->add_option("--eoq-order-cost", order_cost, "Order cost used for EOQ")
      ->check(CLI::PositiveNumber);

  std::string checkpoint, eval_arch = "homo", eval_demand = "low", eval_reward = "baseline",
                          eval_out;
  int steps = 500;
  std::uint64_t eval_seed = 1;
  auto* eval_cmd = app.add_subcommand("eval", "Roll a saved policy without episode termination");
  eval_cmd->add_option("--checkpoint", checkpoint, "Directory holding checkpoint files")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--arch", eval_arch, "homo or hetero");
  eval_cmd->add_option("--demand", eval_demand, "high or low");
  eval_cmd->add_option("--reward", eval_reward, "Reward mode used to label rewards");
  eval_cmd->add_option("--steps", steps, "Number of steps")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval_seed, "Demand seed");
  eval_cmd->add_option("--out", eval_out, "Trace CSV path (default: stdout)");
  eval_cmd->add_flag("--strict-actions", strict, "Reject out-of-range actions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      masc::ExperimentConfig config;
      std::string text;
      if (!config_path.empty()) {
        text = read_all(config_path);
        std::istringstream in(text);
        config = masc::parse_experiment_config(in);
      }
      bool overridden = false;
      auto override_list = [&](const std::string& flag, std::vector<std::string>& field) {
        if (!flag.empty()) {
          field = split(flag);
          overridden = true;
        }
      };
      override_list(demand, config.demands);
      override_list(arch, config.architectures);
      override_list(algo, config.algorithms);
      override_list(reward, config.rewards);
      if (!seeds.empty()) {
        config.seeds.clear();
        for (const auto& s : split(seeds)) config.seeds.push_back(std::stoull(s));
        overridden = true;
      }
      if (iters > 0) config.iterations = iters, overridden = true;
      if (jobs > 0) config.jobs = jobs, overridden = true;
      if (strict) config.strict_actions = true, overridden = true;
      if (!out_dir.empty()) config.output = out_dir;
      config.validate();
      if (config_path.empty() || overridden) {
        std::ostringstream effective;
        masc::serialize_experiment_config(effective, config);
        if (config_path.empty()) text = effective.str();
        if (overridden && !config_path.empty()) {
          const auto root = masc::resolve_output_root(config.output);
          std::filesystem::create_directories(root);
          std::ofstream(root / "effective_config.ini") << effective.str();
        }
      }
      const auto art = masc::run(config, text);
      const auto report = masc::build_report(art.root, config.eoq_order_cost);
      masc::write_report(std::cout, report);
      int failed = 0;
      for (const auto& r : art.runs) failed += r.failed ? 1 : 0;
      std::cout << "\n" << art.runs.size() - failed << " of " << art.runs.size()
                << " runs completed; artifacts in " << art.root.string() << "\n";
      return 0;
    }
    if (*report_cmd) {
      const auto root = masc::resolve_output_root(report_dir);
      const auto report = masc::build_report(root, order_cost);
      if (report.rows.empty()) {
        std::cerr << "no runs found under " << root.string() << "\n";
        return 1;
      }
      masc::write_report(std::cout, report);
      return 0;
    }
    if (*eval_cmd) {
      masc::ExperimentConfig config;
      config.horizon = 30;
      config.strict_actions = strict;
      const masc::Cell cell{eval_demand, eval_arch, "sac", eval_reward};
      const masc::EnvSpec env = masc::make_env_spec(config, cell);
      const auto agent = masc::TrainedAgent::load(checkpoint, masc::parse_architecture(eval_arch));
      masc::Rng rng(masc::stream_seed(eval_seed, masc::SeedStream::Evaluation));
      masc::DemandSampler demand_sampler(env.demand,
                                         masc::stream_seed(eval_seed, masc::SeedStream::Evaluation));
      const auto trace = masc::record_episode(
          env, [&](const masc::ChainState& s) { return agent.act(s, false, rng); }, demand_sampler,
          steps);
      if (eval_out.empty()) {
        masc::write_trace_csv(std::cout, trace);
      } else {
        std::ofstream out(eval_out);
        if (!out) throw std::runtime_error("cannot write " + eval_out);
        masc::write_trace_csv(out, trace);
      }
      return 0;
    }
  } catch (const masc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
