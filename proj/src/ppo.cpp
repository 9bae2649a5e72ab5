#include "masc/agents/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace masc {

using nn::Matrix;
using nn::Var;

double clipped_surrogate(double ratio, double advantage, double clip) {
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
  return std::min(ratio * advantage, clipped * advantage);
}

namespace {

std::vector<nn::Parameter*> joint_parameters(PolicyNet& policy, nn::Mlp& value) {
  auto params = policy.parameters();
  auto vp = value.parameters();
  params.insert(params.end(), vp.begin(), vp.end());
  return params;
}

std::vector<int> value_widths(int obs, const std::vector<int>& hidden) {
  std::vector<int> w{obs};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return w;
}

}  // namespace

PpoLearner::PpoLearner(nn::RowVector observation_scale, ActionSpace space,
                       const AgentConfig& config, Rng& rng)
    : policy_(observation_scale, std::move(space), config.hidden, nn::Activation::Tanh,
              LogStdMode::Global, rng, config.ppo.initial_log_std),
      value_(value_widths(static_cast<int>(observation_scale.size()), config.hidden),
             nn::Activation::Tanh, rng),
      optimizer_(joint_parameters(policy_, value_), {config.ppo.learning_rate}) {}

double PpoLearner::value(const nn::RowVector& scaled_obs) const {
  return value_.forward_row(scaled_obs)(0);
}

PpoStats ppo_update(const RolloutBatch& batch, PpoLearner& learner, const AgentConfig& config,
                    Rng& rng) {
  const PpoConfig& cfg = config.ppo;
  const std::size_t n = batch.size();
  if (batch.advantage.size() != n || batch.ret.size() != n ||
      static_cast<std::size_t>(batch.obs.rows()) != n ||
      static_cast<std::size_t>(batch.raw_action.rows()) != n)
    throw std::invalid_argument("ppo_update: rollout batch fields are misaligned");
  PpoStats stats;
  if (n == 0) return stats;

  const std::size_t mb = std::clamp<std::size_t>(static_cast<std::size_t>(cfg.minibatch_size), 1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  nn::Tape tape;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double kl_sum = 0.0, clip_sum = 0.0, pl_sum = 0.0, vl_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < n; start += mb) {
      const std::size_t count = std::min(mb, n - start);
      const auto rows = static_cast<Eigen::Index>(count);
      Matrix obs(rows, batch.obs.cols()), raw(rows, batch.raw_action.cols());
      Matrix old_lp(rows, 1), adv(rows, 1), ret(rows, 1);
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t j = order[start + k];
        const auto r = static_cast<Eigen::Index>(k);
        obs.row(r) = batch.obs.row(static_cast<Eigen::Index>(j));
        raw.row(r) = batch.raw_action.row(static_cast<Eigen::Index>(j));
        old_lp(r, 0) = batch.log_prob[j];
        adv(r, 0) = batch.advantage[j];
        ret(r, 0) = batch.ret[j];
      }
      if (count > 1) {
        const double mu = adv.mean();
        const double sd = std::sqrt((adv.array() - mu).square().sum() / static_cast<double>(count));
        adv = ((adv.array() - mu) / (sd + 1e-8)).matrix();
      }

      tape.clear();
      Var x = tape.constant(obs);
      auto heads = learner.policy().heads(tape, x);
      Var logp = learner.policy().log_prob(tape, heads, raw);
      Var ratio = nn::exp(nn::sub(logp, tape.constant(old_lp)));
      Var a = tape.constant(adv);
      Var surr = nn::minimum(nn::mul(ratio, a),
                             nn::mul(nn::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip), a));
      Var policy_loss = nn::neg(nn::mean(surr));
      Var pred = learner.value_net().forward(tape, x);
      Var value_loss = nn::mean(nn::square(nn::sub(pred, tape.constant(ret))));
      Var loss = nn::add(policy_loss, nn::scale(value_loss, cfg.vf_loss_coeff));

      const double loss_v = loss.scalar();
      if (!std::isfinite(loss_v)) {
        stats.aborted = true;
        stats.diagnostic = "non-finite PPO loss at epoch " + std::to_string(epoch);
        return stats;
      }
      const Matrix& rv = ratio.value();
      if (epoch == 0 && start == 0)
        stats.first_pass_ratio_error = (rv.array() - 1.0).abs().mean();
      kl_sum += (old_lp - logp.value()).sum();
      clip_sum += ((rv.array() - 1.0).abs() > cfg.clip).cast<double>().sum();
      pl_sum += policy_loss.scalar() * static_cast<double>(count);
      vl_sum += value_loss.scalar() * static_cast<double>(count);
      seen += count;

      learner.optimizer().zero_grad();
      tape.backward(loss);
      learner.optimizer().step();
    }
    stats.epochs_run = epoch + 1;
    stats.approx_kl = kl_sum / static_cast<double>(seen);
    stats.clip_fraction = clip_sum / static_cast<double>(seen);
    stats.policy_loss = pl_sum / static_cast<double>(seen);
    stats.value_loss = vl_sum / static_cast<double>(seen);
    if (stats.approx_kl > 1.5 * cfg.kl_target) break;
  }
  if (!learner.policy().all_finite() || !learner.value_net().all_finite()) {
    stats.aborted = true;
    stats.diagnostic = "non-finite PPO parameters after update";
  }
  return stats;
}

}  // namespace masc
