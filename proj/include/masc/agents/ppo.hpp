#pragma once

#include <span>
#include <string>
#include <vector>

#include "masc/agents/config.hpp"
#include "masc/agents/policy.hpp"
#include "masc/nn.hpp"

namespace masc {

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Generalized advantage estimation over one trajectory segment:
//   delta_t = r_t + gamma * V_{t+1} - V_t,  A_t = delta_t + gamma * lambda * A_{t+1}
// with V_T = bootstrap_value. returns = advantages + values.
Advantages compute_gae(std::span<const double> rewards, std::span<const double> values,
                       double bootstrap_value, double gamma, double lambda);

// On-policy samples for one learner. Rows are time steps.
struct RolloutBatch {
  nn::Matrix obs;        // scaled observations
  nn::Matrix raw_action; // pre-squash Gaussian draws
  std::vector<double> log_prob;
  std::vector<double> reward;
  std::vector<double> value;
  std::vector<double> advantage;
  std::vector<double> ret;

  std::size_t size() const { return log_prob.size(); }
};

// min(ratio * A, clamp(ratio, 1 - clip, 1 + clip) * A) for one sample.
double clipped_surrogate(double ratio, double advantage, double clip);

class PpoLearner {
 public:
  PpoLearner(nn::RowVector observation_scale, ActionSpace space, const AgentConfig& config,
             Rng& rng);
  PpoLearner(const PpoLearner&) = delete;
  PpoLearner& operator=(const PpoLearner&) = delete;

  PolicyNet& policy() { return policy_; }
  const PolicyNet& policy() const { return policy_; }
  nn::Mlp& value_net() { return value_; }
  double value(const nn::RowVector& scaled_obs) const;
  nn::Adam& optimizer() { return optimizer_; }

 private:
  PolicyNet policy_;
  nn::Mlp value_;
  nn::Adam optimizer_;
};

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  // Mean |ratio - 1| over the first minibatch pass.
  double first_pass_ratio_error = 0.0;
  int epochs_run = 0;
  bool aborted = false;
  std::string diagnostic;
};

// Clipped-surrogate policy loss plus vf_loss_coeff * value MSE, minimized by
// Adam over shuffled minibatches for `epochs` passes. Advantages are
// normalized per minibatch. Epochs stop early once the approximate KL
// exceeds 1.5 * kl_target. A non-finite loss aborts without touching the
// parameters of that minibatch.
PpoStats ppo_update(const RolloutBatch& batch, PpoLearner& learner, const AgentConfig& config,
                    Rng& rng);

}  // namespace masc
