#include "masc/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "masc/agents/trainer.hpp"

namespace masc {

namespace fs = std::filesystem;
using json = nlohmann::json;

fs::path resolve_output_root(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
  return "runs";
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

template <typename Fn>
fs::path write_with(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path;
}

void write_meta(const RunRecord& r) {
  json j;
  j["architecture"] = r.cell.architecture;
  j["algorithm"] = r.cell.algorithm;
  j["reward"] = r.cell.reward;
  j["demand"] = r.cell.demand;
  j["seed"] = r.seed;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["converged_at"] = r.converged_at;
  j["failed"] = r.failed;
  j["note"] = r.note;
  j["wall_seconds"] = r.wall_seconds;
  json files = json::array();
  for (const auto& f : r.files) files.push_back(f.filename().string());
  j["files"] = files;
  write_file(r.dir / "meta.json", j.dump(2) + "\n");
}

}  // namespace

RunRecord run_one(const ExperimentConfig& config, const Cell& cell, std::uint64_t seed,
                  const fs::path& dir) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.cell = cell;
  rec.seed = seed;
  rec.dir = dir;
  fs::create_directories(dir);
  try {
    const EnvSpec env = make_env_spec(config, cell);
    Controller controller;
    std::shared_ptr<TrainedAgent> agent;
    if (is_learning_algorithm(cell.algorithm)) {
      const AgentConfig agent_config = make_agent_config(config, cell);
      const ConvergenceRule rule{config.convergence_window, config.convergence_tol,
                                 config.min_iterations};
      TrainResult result = train(env, agent_config, seed, rule, config.iterations);
      rec.iterations = result.iterations;
      rec.converged = result.converged;
      rec.converged_at = result.converged_at;
      rec.files.push_back(
          write_with(dir / "curve.csv", [&](std::ostream& out) { result.curve.write_csv(out); }));
      if (result.diverged) {
        rec.failed = true;
        rec.note = "training diverged: " + result.diagnostic;
      } else {
        for (const auto& p : result.agent.save(dir)) rec.files.push_back(p);
        agent = std::make_shared<TrainedAgent>(std::move(result.agent));
        auto rng = std::make_shared<Rng>(stream_seed(seed, SeedStream::Evaluation));
        controller = [agent, rng](const ChainState& s) { return agent->act(s, false, *rng); };
      }
    } else {
      controller = heuristic_controller(
          make_heuristic(config, cell, stream_seed(seed, SeedStream::Exploration)), env.params);
    }
    if (!rec.failed) {
      DemandSampler demand(env.demand, stream_seed(seed, SeedStream::Evaluation));
      std::vector<EpisodeTrace> traces;
      traces.reserve(kEvalEpisodes);
      for (int e = 0; e < kEvalEpisodes; ++e)
        traces.push_back(record_episode(env, controller, demand));
      rec.files.push_back(write_with(dir / "eval_traces.csv",
                                     [&](std::ostream& out) { write_traces_csv(out, traces); }));
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.note = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_meta(rec);
  return rec;
}

RunArtifacts run(const ExperimentConfig& config, const std::string& config_text) {
  config.validate();
  RunArtifacts art;
  art.root = resolve_output_root(config.output);
  std::error_code ec;
  fs::create_directories(art.root, ec);
  if (ec || !fs::is_directory(art.root))
    throw std::runtime_error("cannot create output directory " + art.root.string());
  art.config_snapshot = art.root / "config.ini";
  write_file(art.config_snapshot, config_text);

  struct Job {
    Cell cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const Cell& c : expand_cells(config))
    for (std::uint64_t s : config.seeds) jobs.push_back({c, s});
  art.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto dir = art.root / jobs[i].cell.name() / ("seed_" + std::to_string(jobs[i].seed));
      art.runs[i] = run_one(config, jobs[i].cell, jobs[i].seed, dir);
    }
  };
  const int n = std::min<int>(config.jobs, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const Report report = build_report(art.root, config.eoq_order_cost);
  art.summary = report.rows;
  write_with(art.root / "summary.csv",
             [&](std::ostream& out) { write_summary_csv(out, report.rows); });
  write_with(art.root / "report.txt", [&](std::ostream& out) { write_report(out, report); });
  return art;
}

std::vector<InventoryDelta> inventory_deltas(const std::vector<SummaryRow>& rows) {
  std::vector<InventoryDelta> out;
  for (const SummaryRow& b : rows) {
    if (b.key.reward_mode != "baseline" || b.failed) continue;
    for (const SummaryRow& c : rows) {
      if (c.key.reward_mode != "colla" || c.failed) continue;
      if (c.key.architecture != b.key.architecture || c.key.algorithm != b.key.algorithm ||
          c.key.demand_regime != b.key.demand_regime)
        continue;
      out.push_back({b.key.architecture, b.key.algorithm, b.key.demand_regime,
                     b.mean_retailer_inventory, c.mean_retailer_inventory,
                     b.mean_factory_inventory, c.mean_factory_inventory});
    }
  }
  return out;
}

Report build_report(const fs::path& root, double eoq_order_cost) {
  std::vector<LabeledTrace> traces;
  std::map<GroupKey, std::vector<std::string>> failures;
  std::map<GroupKey, bool> seen;
  std::vector<fs::path> metas;
  if (fs::is_directory(root))
    for (const auto& entry : fs::recursive_directory_iterator(root))
      if (entry.path().filename() == "meta.json") metas.push_back(entry.path());
  std::sort(metas.begin(), metas.end());
  for (const auto& meta_path : metas) {
    std::ifstream in(meta_path);
    json j;
    try {
      in >> j;
    } catch (const std::exception&) {
      continue;
    }
    const GroupKey key{j.value("architecture", ""), j.value("algorithm", ""),
                       j.value("reward", ""), j.value("demand", "")};
    const auto seed = j.value("seed", std::uint64_t{0});
    seen[key] = true;
    const auto trace_path = meta_path.parent_path() / "eval_traces.csv";
    if (j.value("failed", false) || !fs::exists(trace_path)) {
      failures[key].push_back("seed " + std::to_string(seed) + ": " + j.value("note", "missing traces"));
      continue;
    }
    std::ifstream tin(trace_path);
    try {
      for (auto& t : read_traces_csv(tin)) traces.push_back({key, seed, std::move(t)});
    } catch (const std::exception& e) {
      failures[key].push_back("seed " + std::to_string(seed) + ": " + e.what());
    }
  }

  Report report;
  if (!traces.empty()) report.rows = summarize(traces);
  for (auto& row : report.rows)
    if (auto it = failures.find(row.key); it != failures.end()) {
      row.failed = true;
      row.note = it->second.front();
    }
  for (const auto& [key, _] : seen) {
    const bool present = std::any_of(report.rows.begin(), report.rows.end(),
                                     [&](const SummaryRow& r) { return r.key == key; });
    if (!present) {
      SummaryRow row;
      row.key = key;
      row.failed = true;
      const auto& f = failures[key];
      row.note = f.empty() ? "no completed runs" : f.front();
      report.rows.push_back(row);
    }
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const SummaryRow& a, const SummaryRow& b) { return a.key < b.key; });
  report.deltas = inventory_deltas(report.rows);

  const ChainParams params;
  for (const char* regime : {"high", "low"}) {
    const double rate = nominal_mean(std::string(regime) == "high" ? DemandModel{HighPoisson{}}
                                                                   : DemandModel{LowNormal{}});
    for (const Echelon e : {Echelon::Retailer, Echelon::Factory}) {
      const EchelonParams& p = params[e];
      const EoqInputs in{rate, eoq_order_cost, p.holding_cost, p.stockout_cost};
      report.eoq.push_back({std::string(e == Echelon::Retailer ? "retailer" : "factory") + " " +
                                regime,
                            eoq(in), eoq_rounded(in)});
    }
  }
  return report;
}

void write_report(std::ostream& out, const Report& report) {
  out.imbue(std::locale::classic());
  out << "Evaluation summary (" << kEvalEpisodes << " deterministic episodes per seed)\n\n";
  write_summary_table(out, report.rows);
  out << "\nMean inventory, baseline vs colla\n";
  if (report.deltas.empty()) {
    out << "  (needs completed baseline and colla cells of the same architecture)\n";
  } else {
    out << std::left << std::setw(7) << "arch" << std::setw(10) << "algo" << std::setw(8) << "demand"
        << std::right << std::setw(12) << "R base" << std::setw(12) << "R colla" << std::setw(10)
        << "R delta" << std::setw(12) << "F base" << std::setw(12) << "F colla" << std::setw(10)
        << "F delta" << '\n';
    out << std::fixed << std::setprecision(2);
    for (const auto& d : report.deltas)
      out << std::left << std::setw(7) << d.architecture << std::setw(10) << d.algorithm
          << std::setw(8) << d.demand_regime << std::right << std::setw(12) << d.baseline_retailer
          << std::setw(12) << d.colla_retailer << std::setw(10)
          << d.colla_retailer - d.baseline_retailer << std::setw(12) << d.baseline_factory
          << std::setw(12) << d.colla_factory << std::setw(10)
          << d.colla_factory - d.baseline_factory << '\n';
    out.unsetf(std::ios::floatfield);
  }
  out << "\nEconomic order quantity\n";
  out << std::fixed << std::setprecision(2);
  for (const auto& e : report.eoq)
    out << "  " << std::left << std::setw(16) << e.label << std::right << std::setw(10) << e.value
        << "  (order " << e.rounded << ")\n";
  out.unsetf(std::ios::floatfield);
}

}  // namespace masc
