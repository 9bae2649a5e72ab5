#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "masc/agents/replay_buffer.hpp"

using namespace masc;
using nn::Matrix;
using nn::RowVector;

namespace {

Transition make(double tag) {
  Transition t;
  t.obs = RowVector::Constant(3, tag);
  t.action = RowVector::Constant(2, tag);
  t.reward = tag;
  t.next_obs = RowVector::Constant(3, tag + 1);
  return t;
}

}  // namespace

TEST(ReplayBuffer, RingOverwritesOldest) {
  ReplayBuffer buf(4);
  for (int i = 0; i < 6; ++i) buf.add(make(i));
  EXPECT_EQ(buf.size(), 4u);
  Rng rng(1);
  const auto s = buf.sample(200, rng);
  for (Eigen::Index r = 0; r < s.reward.rows(); ++r) EXPECT_GE(s.reward(r, 0), 2.0);
}

TEST(ReplayBuffer, UniformWhenPrioritiesEqual) {
  ReplayBuffer buf(8);
  for (int i = 0; i < 8; ++i) buf.add(make(i));
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(buf.probability(i), 1.0 / 8, 1e-12);
  Rng rng(2);
  const auto s = buf.sample(64, rng);
  EXPECT_TRUE((s.weights.array() == 1.0).all());
}

TEST(ReplayBuffer, ProportionalPriorities) {
  ReplayBuffer buf(4, 1.0, 0.4, 1e-6);
  for (int i = 0; i < 4; ++i) buf.add(make(i));
  Matrix td(4, 1);
  td << 1.0, 2.0, 3.0, 4.0;
  buf.update_priorities({0, 1, 2, 3}, td);
  const double total = 10.0 + 4e-6;
  EXPECT_NEAR(buf.probability(3), (4.0 + 1e-6) / total, 1e-12);
  Rng rng(3);
  std::map<double, int> counts;
  const int draws = 200000;
  for (int k = 0; k < draws / 100; ++k) {
    const auto s = buf.sample(100, rng);
    for (Eigen::Index r = 0; r < 100; ++r) counts[s.reward(r, 0)]++;
  }
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(counts[i] / double(draws), (i + 1) / 10.0, 0.01);
}

TEST(ReplayBuffer, ImportanceWeights) {
  ReplayBuffer buf(2, 1.0, 0.5, 1e-9);
  buf.add(make(0));
  buf.add(make(1));
  Matrix td(2, 1);
  td << 1.0, 3.0;
  buf.update_priorities({0, 1}, td);
  Rng rng(4);
  const auto s = buf.sample(50, rng);
  // w_i = (N P_i)^-beta / max: P = (0.25, 0.75) gives w_0 = 1, w_1 = sqrt(0.5/1.5).
  for (Eigen::Index r = 0; r < 50; ++r) {
    const double expected = s.reward(r, 0) == 0.0 ? 1.0 : std::sqrt(0.5 / 1.5);
    EXPECT_NEAR(s.weights(r, 0), expected, 1e-6);
  }
}

TEST(ReplayBuffer, NewTransitionsGetMaxPriority) {
  ReplayBuffer buf(4, 1.0, 0.4, 1e-6);
  buf.add(make(0));
  Matrix td(1, 1);
  td << 5.0;
  buf.update_priorities({0}, td);
  buf.add(make(1));
  EXPECT_NEAR(buf.probability(1), 0.5, 1e-9);
}

TEST(ReplayBuffer, Errors) {
  EXPECT_THROW(ReplayBuffer(0), std::invalid_argument);
  ReplayBuffer buf(4);
  Rng rng(5);
  EXPECT_THROW(buf.sample(1, rng), std::logic_error);
  buf.add(make(0));
  EXPECT_THROW(buf.update_priorities({0, 0}, Matrix::Zero(1, 1)), std::invalid_argument);
}
