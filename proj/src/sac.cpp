#include "masc/agents/sac.hpp"

#include <cmath>

namespace masc {

using nn::Matrix;
using nn::Var;

double sac_critic_target(double reward, bool done, double gamma, double alpha, double q1_target,
                         double q2_target, double next_log_prob) {
  const double soft_value = std::min(q1_target, q2_target) - alpha * next_log_prob;
  return reward + gamma * (done ? 0.0 : 1.0) * soft_value;
}

namespace {

std::vector<int> critic_widths(int obs, int act, const std::vector<int>& hidden) {
  std::vector<int> w{obs + act};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return w;
}

std::vector<nn::Parameter*> both(nn::Mlp& a, nn::Mlp& b) {
  auto p = a.parameters();
  auto q = b.parameters();
  p.insert(p.end(), q.begin(), q.end());
  return p;
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
  return m;
}

}  // namespace

SacLearner::SacLearner(nn::RowVector observation_scale, ActionSpace space,
                       const AgentConfig& config, Rng& rng)
    : actor_(observation_scale, space, config.hidden, nn::Activation::Relu,
             LogStdMode::StateDependent, rng),
      q1_(critic_widths(static_cast<int>(observation_scale.size()), space.size(), config.hidden),
          nn::Activation::Relu, rng),
      q2_(critic_widths(static_cast<int>(observation_scale.size()), space.size(), config.hidden),
          nn::Activation::Relu, rng),
      q1_target_(q1_),
      q2_target_(q2_),
      log_alpha_(Matrix::Constant(1, 1, std::log(config.sac.initial_alpha))),
      target_entropy_(-static_cast<double>(space.size())),
      actor_opt_(actor_.parameters(), {config.sac.actor_learning_rate}),
      critic_opt_(both(q1_, q2_), {config.sac.critic_learning_rate}),
      alpha_opt_({&log_alpha_}, {config.sac.entropy_learning_rate}) {}

double SacLearner::alpha() const { return std::exp(log_alpha_.value(0, 0)); }

void SacLearner::soft_update_targets(double tau) {
  q1_target_.soft_update_from(q1_, tau);
  q2_target_.soft_update_from(q2_, tau);
}

bool SacLearner::all_finite() const {
  return actor_.all_finite() && q1_.all_finite() && q2_.all_finite() &&
         q1_target_.all_finite() && q2_target_.all_finite() && log_alpha_.value.allFinite();
}

SacStats sac_update(ReplayBuffer& buffer, SacLearner& learner, const AgentConfig& config,
                    Rng& rng) {
  const SacConfig& cfg = config.sac;
  SacStats stats;
  const std::size_t warmup = static_cast<std::size_t>(std::max(cfg.warmup, 1));
  if (buffer.size() < warmup) {
    stats.warning = "replay buffer holds " + std::to_string(buffer.size()) + " < warm-up " +
                    std::to_string(warmup) + " transitions; update skipped";
    return stats;
  }
  const ReplaySample s = buffer.sample(static_cast<std::size_t>(cfg.batch_size), rng);
  const Eigen::Index b = s.obs.rows();
  const Eigen::Index act = s.action.cols();
  const double alpha = learner.alpha();
  nn::Tape tape;

  // Critic targets from the current actor at s'.
  Matrix target(b, 1);
  {
    Var next_obs = tape.constant(s.next_obs);
    auto heads = learner.actor().heads(tape, next_obs);
    auto next = learner.actor().rsample(tape, heads, normal_matrix(b, act, rng));
    Matrix critic_in(b, s.next_obs.cols() + act);
    critic_in << s.next_obs, next.squashed.value();
    const Matrix q1 = learner.target(0).forward(critic_in);
    const Matrix q2 = learner.target(1).forward(critic_in);
    const Matrix& lp = next.log_prob.value();
    for (Eigen::Index i = 0; i < b; ++i)
      target(i, 0) = sac_critic_target(s.reward(i, 0), s.done(i, 0) > 0.5, config.gamma, alpha,
                                       q1(i, 0), q2(i, 0), lp(i, 0));
    stats.mean_target = target.mean();
  }

  // Critics: importance-weighted squared TD error.
  tape.clear();
  Matrix critic_in(b, s.obs.cols() + act);
  critic_in << s.obs, s.action;
  Var xin = tape.constant(critic_in);
  Var y = tape.constant(target);
  Var w = tape.constant(s.weights);
  Var q1 = learner.critic(0).forward(tape, xin);
  Var q2 = learner.critic(1).forward(tape, xin);
  Var critic_loss = nn::add(nn::mean(nn::mul(w, nn::square(nn::sub(q1, y)))),
                            nn::mean(nn::mul(w, nn::square(nn::sub(q2, y)))));
  stats.critic_loss = critic_loss.scalar();
  if (!std::isfinite(stats.critic_loss)) {
    stats.aborted = true;
    stats.diagnostic = "non-finite SAC critic loss";
    return stats;
  }
  const Matrix td = 0.5 * ((q1.value() - target).cwiseAbs() + (q2.value() - target).cwiseAbs());
  learner.critic_optimizer().zero_grad();
  tape.backward(critic_loss);
  learner.critic_optimizer().step();
  buffer.update_priorities(s.indices, td);

  // Actor: minimize alpha * log pi - min(Q1, Q2) through the reparameterized sample.
  tape.clear();
  Var obs = tape.constant(s.obs);
  auto heads = learner.actor().heads(tape, obs);
  auto pi = learner.actor().rsample(tape, heads, normal_matrix(b, act, rng));
  Var actor_in = nn::concat_cols(obs, pi.squashed);
  Var aq1 = learner.critic(0).forward(tape, actor_in);
  Var aq2 = learner.critic(1).forward(tape, actor_in);
  Var actor_loss =
      nn::mean(nn::sub(nn::scale(pi.log_prob, alpha), nn::minimum(aq1, aq2)));
  stats.actor_loss = actor_loss.scalar();
  if (!std::isfinite(stats.actor_loss)) {
    stats.aborted = true;
    stats.diagnostic = "non-finite SAC actor loss";
    return stats;
  }
  const double mean_log_prob = pi.log_prob.value().mean();
  learner.actor_optimizer().zero_grad();
  tape.backward(actor_loss);
  learner.actor_optimizer().step();
  // The actor pass also accumulated critic gradients; the critic optimizer
  // zeroes them before its next use.

  // Temperature: minimize -log_alpha * (log pi + target_entropy).
  nn::Parameter& la = learner.log_alpha_parameter();
  la.grad(0, 0) = -(mean_log_prob + learner.target_entropy());
  learner.alpha_optimizer().step();

  learner.soft_update_targets(cfg.tau);
  stats.updated = true;
  stats.alpha = learner.alpha();
  stats.entropy = -mean_log_prob;
  if (!learner.all_finite()) {
    stats.aborted = true;
    stats.diagnostic = "non-finite SAC parameters after update";
  }
  return stats;
}

}  // namespace masc
