#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "masc/agents/config.hpp"
#include "masc/agents/policy.hpp"
#include "masc/demand.hpp"
#include "masc/env.hpp"
#include "masc/env_spec.hpp"
#include "masc/metrics.hpp"

namespace masc {

// Sub-seed streams derived from a run seed. Evaluation uses its own stream so
// evaluation demand never overlaps training demand.
enum class SeedStream : std::uint64_t {
  TrainDemand = 1,
  PolicyInit = 2,
  Exploration = 3,
  Evaluation = 4,
  Update = 5,
};

std::uint64_t stream_seed(std::uint64_t seed, SeedStream stream);

struct CurveRow {
  int iteration = 0;
  std::string policy_id;
  double mean_episode_reward = 0.0;
  double std = 0.0;
  int episodes = 0;
  std::int64_t env_steps = 0;
};

struct LearningCurve {
  std::vector<CurveRow> rows;

  // Mean episode reward per iteration for one policy id.
  std::vector<double> series(const std::string& policy_id) const;
  // CSV: iteration,policy_id,mean_episode_reward,std,episodes,env_steps
  void write_csv(std::ostream& out) const;
};

// Trained policies in deployable form: one shared policy (homogeneous) or
// retailer and factory policies (heterogeneous).
class TrainedAgent {
 public:
  TrainedAgent() = default;
  TrainedAgent(Architecture architecture, std::vector<PolicyNet> policies);

  JointAction act(const ChainState& state, bool stochastic, Rng& rng) const;

  Architecture architecture() const { return architecture_; }
  const std::vector<PolicyNet>& policies() const { return policies_; }
  // Policy ids in checkpoint order: {"shared"} or {"retailer", "factory"}.
  std::vector<std::string> policy_ids() const;

  // Writes checkpoint_<id>.txt per policy into `dir`.
  std::vector<std::filesystem::path> save(const std::filesystem::path& dir) const;
  static TrainedAgent load(const std::filesystem::path& dir, Architecture architecture);

 private:
  Architecture architecture_ = Architecture::Homogeneous;
  std::vector<PolicyNet> policies_;
};

// Maps a homogeneous action vector (Q_1, Q_2, Sp_1, Sp_2) onto a JointAction.
JointAction joint_from_homogeneous(const std::vector<double>& a);

struct TrainResult {
  LearningCurve curve;
  TrainedAgent agent;
  int iterations = 0;
  bool converged = false;
  int converged_at = -1;
  bool diverged = false;
  std::string diagnostic;
};

// Trains SAC or PPO in the configured architecture until the convergence
// rule fires (on the total-reward curve) or `max_iterations` is reached.
// Bitwise reproducible for a fixed (env, config, seed).
TrainResult train(const EnvSpec& env, const AgentConfig& config, std::uint64_t seed,
                  const ConvergenceRule& rule, int max_iterations);

}  // namespace masc
