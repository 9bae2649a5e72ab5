#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "masc/env.hpp"

namespace masc {

enum class Algorithm { SAC, PPO };
enum class Architecture { Homogeneous, Heterogeneous };

std::string to_string(Algorithm a);
std::string to_string(Architecture a);
Algorithm parse_algorithm(const std::string& name);
Architecture parse_architecture(const std::string& name);

struct PpoConfig {
  double clip = 0.3;
  double kl_target = 0.01;
  double learning_rate = 5e-5;
  double lambda = 0.95;
  double vf_loss_coeff = 1.0;
  int epochs = 10;
  int train_batch_size = 4000;
  int minibatch_size = 128;
  double initial_log_std = 0.0;
};

struct SacConfig {
  double tau = 0.005;
  double actor_learning_rate = 3e-4;
  double critic_learning_rate = 3e-4;
  double entropy_learning_rate = 3e-4;
  int batch_size = 256;
  int buffer_capacity = 100000;
  int warmup = 1000;
  int steps_per_iteration = 1000;
  double priority_alpha = 0.6;
  double priority_beta = 0.4;
  double priority_epsilon = 1e-6;
  double initial_alpha = 1.0;
};

struct AgentConfig {
  Algorithm algorithm = Algorithm::SAC;
  Architecture architecture = Architecture::Homogeneous;
  double gamma = 0.99;
  std::vector<int> hidden{256, 256};
  // Learners see reward * reward_scale; logged curves use raw rewards.
  double reward_scale = 0.01;
  PpoConfig ppo;
  SacConfig sac;

  // Defaults for the given cell: PPO lr 5e-5 / 1e-4 and minibatch
  // 128 / 512 (heterogeneous / homogeneous); SAC actor lr 3e-3 / 3e-4.
  static AgentConfig defaults(Algorithm algorithm, Architecture architecture);

  void validate() const;
};

}  // namespace masc
