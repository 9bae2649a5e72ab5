#pragma once

#include <string>

#include "masc/agents/config.hpp"
#include "masc/agents/policy.hpp"
#include "masc/agents/replay_buffer.hpp"
#include "masc/nn.hpp"

namespace masc {

// y = r + gamma * (1 - done) * (min(q1', q2') - alpha * log pi(a'|s'))
double sac_critic_target(double reward, bool done, double gamma, double alpha,
                         double q1_target, double q2_target, double next_log_prob);

// Twin-critic soft actor-critic learner with automatic temperature tuning.
// Critics take [scaled obs, squashed action] as input.
class SacLearner {
 public:
  SacLearner(nn::RowVector observation_scale, ActionSpace space, const AgentConfig& config,
             Rng& rng);
  SacLearner(const SacLearner&) = delete;
  SacLearner& operator=(const SacLearner&) = delete;

  PolicyNet& actor() { return actor_; }
  const PolicyNet& actor() const { return actor_; }
  nn::Mlp& critic(int i) { return i == 0 ? q1_ : q2_; }
  nn::Mlp& target(int i) { return i == 0 ? q1_target_ : q2_target_; }
  double alpha() const;
  double log_alpha() const { return log_alpha_.value(0, 0); }
  void set_log_alpha(double v) { log_alpha_.value(0, 0) = v; }
  double target_entropy() const { return target_entropy_; }

  // target <- tau * online + (1 - tau) * target for both critics.
  void soft_update_targets(double tau);

  nn::Adam& actor_optimizer() { return actor_opt_; }
  nn::Adam& critic_optimizer() { return critic_opt_; }
  nn::Adam& alpha_optimizer() { return alpha_opt_; }
  nn::Parameter& log_alpha_parameter() { return log_alpha_; }

  bool all_finite() const;

 private:
  PolicyNet actor_;
  nn::Mlp q1_, q2_, q1_target_, q2_target_;
  nn::Parameter log_alpha_;
  double target_entropy_;
  nn::Adam actor_opt_, critic_opt_, alpha_opt_;
};

struct SacStats {
  bool updated = false;
  std::string warning;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;
  double mean_target = 0.0;
  bool aborted = false;
  std::string diagnostic;
};

// One gradient step on critics, actor and temperature from a prioritized
// minibatch, then a Polyak update of the targets. Below the warm-up size it
// does nothing and reports a warning.
SacStats sac_update(ReplayBuffer& buffer, SacLearner& learner, const AgentConfig& config,
                    Rng& rng);

}  // namespace masc
