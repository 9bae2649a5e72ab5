#include <stdexcept>

#include "masc/agents/config.hpp"

namespace masc {

std::string to_string(Algorithm a) { return a == Algorithm::SAC ? "sac" : "ppo"; }

std::string to_string(Architecture a) {
  return a == Architecture::Homogeneous ? "homo" : "hetero";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "sac") return Algorithm::SAC;
  if (name == "ppo") return Algorithm::PPO;
  throw ConfigError("unknown algorithm '" + name + "'");
}

Architecture parse_architecture(const std::string& name) {
  if (name == "homo" || name == "homogeneous") return Architecture::Homogeneous;
  if (name == "hetero" || name == "heterogeneous") return Architecture::Heterogeneous;
  throw ConfigError("unknown architecture '" + name + "'");
}

AgentConfig AgentConfig::defaults(Algorithm algorithm, Architecture architecture) {
  AgentConfig c;
  c.algorithm = algorithm;
  c.architecture = architecture;
  const bool homo = architecture == Architecture::Homogeneous;
  c.ppo.learning_rate = homo ? 1e-4 : 5e-5;
  c.ppo.minibatch_size = homo ? 512 : 128;
  c.sac.actor_learning_rate = homo ? 3e-4 : 3e-3;
  return c;
}

void AgentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(gamma > 0.0 && gamma < 1.0, "gamma must be in (0, 1)");
  require(!hidden.empty(), "at least one hidden layer is required");
  for (int w : hidden) require(w > 0, "hidden widths must be positive");
  require(reward_scale > 0.0, "reward scale must be > 0");
  require(ppo.clip > 0.0, "PPO clip must be > 0");
  require(ppo.kl_target > 0.0, "PPO kl_target must be > 0");
  require(ppo.learning_rate > 0.0, "PPO learning rate must be > 0");
  require(ppo.lambda >= 0.0 && ppo.lambda <= 1.0, "GAE lambda must be in [0, 1]");
  require(ppo.epochs >= 1, "PPO epochs must be >= 1");
  require(ppo.train_batch_size >= 1, "PPO train batch must be >= 1");
  require(ppo.minibatch_size >= 1, "PPO minibatch must be >= 1");
  require(sac.tau > 0.0 && sac.tau < 1.0, "SAC tau must be in (0, 1)");
  require(sac.actor_learning_rate > 0.0 && sac.critic_learning_rate > 0.0 &&
              sac.entropy_learning_rate > 0.0,
          "SAC learning rates must be > 0");
  require(sac.batch_size >= 1, "SAC batch size must be >= 1");
  require(sac.buffer_capacity >= sac.batch_size, "SAC buffer must hold at least one batch");
  require(sac.warmup >= 1, "SAC warm-up must be >= 1");
  require(sac.steps_per_iteration >= 1, "SAC steps per iteration must be >= 1");
  require(sac.initial_alpha > 0.0, "SAC initial alpha must be > 0");
}

}  // namespace masc
