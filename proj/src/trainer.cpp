#include "masc/agents/trainer.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>

#include "masc/agents/ppo.hpp"
#include "masc/agents/sac.hpp"

namespace masc {

using nn::Matrix;
using nn::RowVector;

std::uint64_t stream_seed(std::uint64_t seed, SeedStream stream) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

std::vector<double> LearningCurve::series(const std::string& policy_id) const {
  std::vector<double> out;
  for (const CurveRow& r : rows)
    if (r.policy_id == policy_id) out.push_back(r.mean_episode_reward);
  return out;
}

void LearningCurve::write_csv(std::ostream& out) const {
  out.imbue(std::locale::classic());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "iteration,policy_id,mean_episode_reward,std,episodes,env_steps\n";
  for (const CurveRow& r : rows)
    out << r.iteration << ',' << r.policy_id << ',' << r.mean_episode_reward << ',' << r.std
        << ',' << r.episodes << ',' << r.env_steps << '\n';
}

JointAction joint_from_homogeneous(const std::vector<double>& a) {
  if (a.size() != 4) throw nn::ShapeError("homogeneous action must have 4 entries");
  return JointAction{a[0], a[2], a[1], a[3]};
}

TrainedAgent::TrainedAgent(Architecture architecture, std::vector<PolicyNet> policies)
    : architecture_(architecture), policies_(std::move(policies)) {
  const std::size_t expected = architecture_ == Architecture::Homogeneous ? 1 : 2;
  if (policies_.size() != expected)
    throw std::invalid_argument("wrong number of policies for the architecture");
}

std::vector<std::string> TrainedAgent::policy_ids() const {
  if (architecture_ == Architecture::Homogeneous) return {"shared"};
  return {"retailer", "factory"};
}

JointAction TrainedAgent::act(const ChainState& state, bool stochastic, Rng& rng) const {
  if (architecture_ == Architecture::Homogeneous) {
    const auto obs = observe_homogeneous(state);
    return joint_from_homogeneous(policies_[0].select_action(obs, stochastic, rng).action);
  }
  const auto r = policies_[0].select_action(observe_heterogeneous(state, Echelon::Retailer),
                                            stochastic, rng);
  const auto f = policies_[1].select_action(observe_heterogeneous(state, Echelon::Factory),
                                            stochastic, rng);
  return JointAction{r.action[0], r.action[1], f.action[0], f.action[1]};
}

std::vector<std::filesystem::path> TrainedAgent::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto ids = policy_ids();
  for (std::size_t i = 0; i < policies_.size(); ++i) {
    const auto path = dir / ("checkpoint_" + ids[i] + ".txt");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.imbue(std::locale::classic());
    policies_[i].save(out);
    written.push_back(path);
  }
  return written;
}

TrainedAgent TrainedAgent::load(const std::filesystem::path& dir, Architecture architecture) {
  TrainedAgent probe;
  probe.architecture_ = architecture;
  std::vector<PolicyNet> policies;
  for (const auto& id : probe.policy_ids()) {
    const auto path = dir / ("checkpoint_" + id + ".txt");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    in.imbue(std::locale::classic());
    policies.push_back(PolicyNet::load(in));
  }
  return TrainedAgent(architecture, std::move(policies));
}

namespace {

// How the one or two learners see the chain.
struct Slots {
  Architecture arch;

  int count() const { return arch == Architecture::Homogeneous ? 1 : 2; }

  std::vector<double> observe(const ChainState& s, int slot) const {
    if (arch == Architecture::Homogeneous) {
      const auto o = observe_homogeneous(s);
      return {o.begin(), o.end()};
    }
    const auto o = observe_heterogeneous(s, slot == 0 ? Echelon::Retailer : Echelon::Factory);
    return {o.begin(), o.end()};
  }

  double reward(const std::pair<double, double>& r, int slot) const {
    if (arch == Architecture::Homogeneous) return r.first + r.second;
    return slot == 0 ? r.first : r.second;
  }

  JointAction assemble(const std::vector<std::vector<double>>& a) const {
    if (arch == Architecture::Homogeneous) return joint_from_homogeneous(a[0]);
    return JointAction{a[0][0], a[0][1], a[1][0], a[1][1]};
  }

  std::vector<std::string> ids() const {
    if (arch == Architecture::Homogeneous) return {"shared"};
    return {"retailer", "factory", "total"};
  }

  RowVector scale(const ChainParams& p, int slot) const {
    if (arch == Architecture::Homogeneous) return observation_scale_homogeneous(p);
    return observation_scale_echelon(p, slot == 0 ? Echelon::Retailer : Echelon::Factory);
  }

  ActionSpace space(const ChainParams& p, int slot) const {
    if (arch == Architecture::Homogeneous) return ActionSpace::homogeneous(p);
    return ActionSpace::echelon(slot == 0 ? p.retailer : p.factory);
  }
};

// Episode returns per curve id collected during one iteration.
struct IterationReturns {
  std::vector<std::vector<double>> by_id;

  explicit IterationReturns(std::size_t ids) : by_id(ids) {}

  void add_episode(const Slots& slots, double r1, double r2) {
    if (slots.arch == Architecture::Homogeneous) {
      by_id[0].push_back(r1 + r2);
    } else {
      by_id[0].push_back(r1);
      by_id[1].push_back(r2);
      by_id[2].push_back(r1 + r2);
    }
  }
};

void append_rows(LearningCurve& curve, const Slots& slots, int iteration,
                 const IterationReturns& ret, std::int64_t env_steps) {
  const auto ids = slots.ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    CurveRow row;
    row.iteration = iteration;
    row.policy_id = ids[i];
    row.mean_episode_reward = mean_of(ret.by_id[i]);
    row.std = sample_std(ret.by_id[i]);
    row.episodes = static_cast<int>(ret.by_id[i].size());
    row.env_steps = env_steps;
    curve.rows.push_back(row);
  }
}

std::string total_id(const Slots& slots) {
  return slots.arch == Architecture::Homogeneous ? "shared" : "total";
}

bool check_converged(TrainResult& result, const Slots& slots, const ConvergenceRule& rule) {
  const auto series = result.curve.series(total_id(slots));
  if (static_cast<int>(series.size()) <= rule.window) return false;
  const auto c = convergence_check(series, rule);
  if (c.converged) {
    result.converged = true;
    result.converged_at = c.iteration;
  }
  return c.converged;
}

TrainResult train_ppo(const EnvSpec& env, const AgentConfig& config, std::uint64_t seed,
                      const ConvergenceRule& rule, int max_iterations) {
  const Slots slots{config.architecture};
  Rng init(stream_seed(seed, SeedStream::PolicyInit));
  Rng explore(stream_seed(seed, SeedStream::Exploration));
  Rng update_rng(stream_seed(seed, SeedStream::Update));
  DemandSampler demand(env.demand, stream_seed(seed, SeedStream::TrainDemand));

  std::vector<std::unique_ptr<PpoLearner>> learners;
  for (int s = 0; s < slots.count(); ++s)
    learners.push_back(std::make_unique<PpoLearner>(slots.scale(env.params, s),
                                                    slots.space(env.params, s), config, init));

  TrainResult result;
  const int horizon = env.params.horizon();
  std::int64_t env_steps = 0;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<RolloutBatch> batches(static_cast<std::size_t>(slots.count()));
    std::vector<std::vector<RowVector>> obs_rows(batches.size()), raw_rows(batches.size());
    IterationReturns returns(slots.ids().size());
    int collected = 0;
    while (collected < config.ppo.train_batch_size) {
      ChainState state = reset(env.params, env.initial_price);
      const std::size_t episode_start = batches[0].size();
      double ep_r1 = 0.0, ep_r2 = 0.0;
      for (int t = 0; t < horizon; ++t) {
        std::vector<std::vector<double>> actions;
        for (int s = 0; s < slots.count(); ++s) {
          auto& L = *learners[static_cast<std::size_t>(s)];
          auto& B = batches[static_cast<std::size_t>(s)];
          const auto ob = slots.observe(state, s);
          const RowVector scaled = L.policy().scale_observation(ob);
          auto sample = L.policy().select_action(ob, true, explore);
          obs_rows[static_cast<std::size_t>(s)].push_back(scaled);
          raw_rows[static_cast<std::size_t>(s)].push_back(sample.raw);
          B.log_prob.push_back(sample.log_prob);
          B.value.push_back(L.value(scaled));
          actions.push_back(std::move(sample.action));
        }
        const StepOutcome out =
            step(env.params, env.options, state, slots.assemble(actions), demand.sample());
        ep_r1 += out.rewards.first;
        ep_r2 += out.rewards.second;
        for (int s = 0; s < slots.count(); ++s)
          batches[static_cast<std::size_t>(s)].reward.push_back(slots.reward(out.rewards, s) *
                                                                config.reward_scale);
        state = out.next_state;
      }
      // The horizon truncates an otherwise stationary process; bootstrap from V(s_T).
      for (int s = 0; s < slots.count(); ++s) {
        auto& L = *learners[static_cast<std::size_t>(s)];
        auto& B = batches[static_cast<std::size_t>(s)];
        const double bootstrap = L.value(L.policy().scale_observation(slots.observe(state, s)));
        const std::span<const double> r(B.reward.data() + episode_start, static_cast<std::size_t>(horizon));
        const std::span<const double> v(B.value.data() + episode_start, static_cast<std::size_t>(horizon));
        const Advantages adv = compute_gae(r, v, bootstrap, config.gamma, config.ppo.lambda);
        B.advantage.insert(B.advantage.end(), adv.advantages.begin(), adv.advantages.end());
        B.ret.insert(B.ret.end(), adv.returns.begin(), adv.returns.end());
      }
      returns.add_episode(slots, ep_r1, ep_r2);
      collected += horizon;
    }
    env_steps += collected;

    for (int s = 0; s < slots.count(); ++s) {
      auto& B = batches[static_cast<std::size_t>(s)];
      const auto& o = obs_rows[static_cast<std::size_t>(s)];
      const auto& a = raw_rows[static_cast<std::size_t>(s)];
      B.obs.resize(static_cast<Eigen::Index>(o.size()), o.front().size());
      B.raw_action.resize(static_cast<Eigen::Index>(a.size()), a.front().size());
      for (std::size_t k = 0; k < o.size(); ++k) {
        B.obs.row(static_cast<Eigen::Index>(k)) = o[k];
        B.raw_action.row(static_cast<Eigen::Index>(k)) = a[k];
      }
      const PpoStats stats =
          ppo_update(B, *learners[static_cast<std::size_t>(s)], config, update_rng);
      if (stats.aborted) {
        result.diverged = true;
        result.diagnostic = stats.diagnostic;
      }
    }
    append_rows(result.curve, slots, it, returns, env_steps);
    result.iterations = it + 1;
    if (result.diverged) break;
    if (check_converged(result, slots, rule)) break;
  }

  std::vector<PolicyNet> policies;
  for (auto& L : learners) policies.push_back(L->policy());
  result.agent = TrainedAgent(config.architecture, std::move(policies));
  return result;
}

TrainResult train_sac(const EnvSpec& env, const AgentConfig& config, std::uint64_t seed,
                      const ConvergenceRule& rule, int max_iterations) {
  const Slots slots{config.architecture};
  Rng init(stream_seed(seed, SeedStream::PolicyInit));
  Rng explore(stream_seed(seed, SeedStream::Exploration));
  Rng update_rng(stream_seed(seed, SeedStream::Update));
  DemandSampler demand(env.demand, stream_seed(seed, SeedStream::TrainDemand));
  const SacConfig& cfg = config.sac;

  std::vector<std::unique_ptr<SacLearner>> learners;
  std::vector<ReplayBuffer> buffers;
  for (int s = 0; s < slots.count(); ++s) {
    learners.push_back(std::make_unique<SacLearner>(slots.scale(env.params, s),
                                                    slots.space(env.params, s), config, init));
    buffers.emplace_back(static_cast<std::size_t>(cfg.buffer_capacity), cfg.priority_alpha,
                         cfg.priority_beta, cfg.priority_epsilon);
  }

  TrainResult result;
  const int horizon = env.params.horizon();
  const int episodes_per_iteration = std::max(1, (cfg.steps_per_iteration + horizon - 1) / horizon);
  std::int64_t env_steps = 0;
  for (int it = 0; it < max_iterations && !result.diverged; ++it) {
    IterationReturns returns(slots.ids().size());
    for (int ep = 0; ep < episodes_per_iteration && !result.diverged; ++ep) {
      ChainState state = reset(env.params, env.initial_price);
      double ep_r1 = 0.0, ep_r2 = 0.0;
      for (int t = 0; t < horizon; ++t) {
        std::vector<std::vector<double>> actions;
        std::vector<RowVector> scaled_obs, squashed;
        for (int s = 0; s < slots.count(); ++s) {
          auto& L = *learners[static_cast<std::size_t>(s)];
          const auto ob = slots.observe(state, s);
          scaled_obs.push_back(L.actor().scale_observation(ob));
          auto sample = L.actor().select_action(ob, true, explore);
          squashed.push_back(sample.squashed);
          actions.push_back(std::move(sample.action));
        }
        const StepOutcome out =
            step(env.params, env.options, state, slots.assemble(actions), demand.sample());
        ep_r1 += out.rewards.first;
        ep_r2 += out.rewards.second;
        ++env_steps;
        for (int s = 0; s < slots.count(); ++s) {
          auto& L = *learners[static_cast<std::size_t>(s)];
          Transition tr;
          tr.obs = scaled_obs[static_cast<std::size_t>(s)];
          tr.action = squashed[static_cast<std::size_t>(s)];
          tr.reward = slots.reward(out.rewards, s) * config.reward_scale;
          tr.next_obs = L.actor().scale_observation(slots.observe(out.next_state, s));
          // Horizon end is a truncation, not a terminal state.
          tr.done = false;
          buffers[static_cast<std::size_t>(s)].add(std::move(tr));
          const SacStats stats = sac_update(buffers[static_cast<std::size_t>(s)], L, config, update_rng);
          if (stats.aborted) {
            result.diverged = true;
            result.diagnostic = stats.diagnostic;
          }
        }
        state = out.next_state;
        if (result.diverged) break;
      }
      returns.add_episode(slots, ep_r1, ep_r2);
    }
    append_rows(result.curve, slots, it, returns, env_steps);
    result.iterations = it + 1;
    if (result.diverged) break;
    if (check_converged(result, slots, rule)) break;
  }

  std::vector<PolicyNet> policies;
  for (auto& L : learners) policies.push_back(L->actor());
  result.agent = TrainedAgent(config.architecture, std::move(policies));
  return result;
}

}  // namespace

TrainResult train(const EnvSpec& env, const AgentConfig& config, std::uint64_t seed,
                  const ConvergenceRule& rule, int max_iterations) {
  config.validate();
  env.params.validate();
  validate(env.demand);
  if (max_iterations < 1) throw ConfigError("iteration cap must be >= 1");
  if (config.algorithm == Algorithm::PPO) return train_ppo(env, config, seed, rule, max_iterations);
  return train_sac(env, config, seed, rule, max_iterations);
}

}  // namespace masc
