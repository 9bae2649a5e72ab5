#include <cmath>

#include <gtest/gtest.h>

#include "masc/agents/sac.hpp"

using namespace masc;
using nn::RowVector;

namespace {

AgentConfig small_config() {
  AgentConfig c = AgentConfig::defaults(Algorithm::SAC, Architecture::Heterogeneous);
  c.hidden = {32, 32};
  c.sac.batch_size = 64;
  c.sac.warmup = 100;
  c.sac.actor_learning_rate = 3e-3;
  c.sac.critic_learning_rate = 3e-3;
  c.gamma = 0.5;
  return c;
}

struct Bandit {
  ChainParams params;
  AgentConfig config = small_config();
  Rng init{1};
  SacLearner learner{observation_scale_echelon(params, Echelon::Retailer),
                     ActionSpace::echelon(params.retailer), config, init};
  ReplayBuffer buffer{10000};
  std::vector<double> obs = std::vector<double>(7, 5.0);

  // Reward is the squashed price; the state never changes.
  void collect(Rng& rng, int n) {
    const RowVector scaled = learner.actor().scale_observation(obs);
    for (int i = 0; i < n; ++i) {
      const auto s = learner.actor().select_action(obs, true, rng);
      buffer.add({scaled, s.squashed, s.squashed(1), scaled, false});
    }
  }
};

}  // namespace

TEST(SacTarget, Formula) {
  EXPECT_NEAR(sac_critic_target(1.0, false, 0.9, 0.5, 2.0, 3.0, -1.0), 1.0 + 0.9 * 2.5, 1e-12);
  EXPECT_NEAR(sac_critic_target(1.0, true, 0.9, 0.5, 2.0, 3.0, -1.0), 1.0, 1e-12);
  EXPECT_NEAR(sac_critic_target(0.0, false, 1.0, 0.0, 5.0, 4.0, 100.0), 4.0, 1e-12);
}

TEST(SacLearner, TargetsStartEqualAndTrackWithPolyak) {
  Bandit b;
  EXPECT_EQ(b.learner.target(0).distance_to(b.learner.critic(0)), 0.0);
  b.learner.critic(0).weight(0).value.array() += 1.0;
  const double d0 = b.learner.target(0).distance_to(b.learner.critic(0));
  b.learner.soft_update_targets(0.1);
  EXPECT_NEAR(b.learner.target(0).distance_to(b.learner.critic(0)), 0.9 * d0, 1e-9);
  EXPECT_EQ(b.learner.target_entropy(), -2.0);
  EXPECT_NEAR(b.learner.alpha(), 1.0, 1e-12);
}

TEST(SacUpdate, SkipsBeforeWarmup) {
  Bandit b;
  Rng rng(2);
  b.collect(rng, 50);
  const SacStats s = sac_update(b.buffer, b.learner, b.config, rng);
  EXPECT_FALSE(s.updated);
  EXPECT_FALSE(s.warning.empty());
}

TEST(SacUpdate, LearnsBanditAndTunesTemperature) {
  Bandit b;
  Rng rng(3);
  b.collect(rng, 200);
  const double before = b.learner.actor().select_action(b.obs, false, rng).action[1];
  for (int i = 0; i < 400; ++i) {
    b.collect(rng, 1);
    const SacStats s = sac_update(b.buffer, b.learner, b.config, rng);
    ASSERT_TRUE(s.updated);
    ASSERT_FALSE(s.aborted);
  }
  const double after = b.learner.actor().select_action(b.obs, false, rng).action[1];
  EXPECT_GT(after, before + 1.0);
  EXPECT_NE(b.learner.alpha(), 1.0);
  EXPECT_TRUE(b.learner.all_finite());
}

TEST(SacUpdate, PrioritiesChangeAfterUpdate) {
  Bandit b;
  Rng rng(4);
  b.collect(rng, 200);
  const double before = b.buffer.total_priority();
  sac_update(b.buffer, b.learner, b.config, rng);
  EXPECT_NE(b.buffer.total_priority(), before);
}
