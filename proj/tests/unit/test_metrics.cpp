#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "masc/baselines.hpp"
#include "masc/metrics.hpp"

using namespace masc;

namespace {

EpisodeTrace constant_trace(double inventory, double reward, int n = 10) {
  EpisodeTrace tr;
  for (int t = 0; t < n; ++t) {
    TraceStep s;
    s.t = t;
    s.demand = t % 3;
    s.retailer_inventory = inventory;
    s.factory_inventory = inventory;
    s.retailer_order = s.demand;
    s.factory_order = s.demand;
    s.retailer_reward = reward / n;
    tr.steps.push_back(s);
  }
  return tr;
}

const GroupKey kKey{"homo", "sac", "baseline", "low"};

}  // namespace

TEST(Bullwhip, TrivialCases) {
  const std::vector<double> d{1, 4, 2, 8, 5, 7};
  const std::vector<double> flat(6, 3.0);
  EXPECT_EQ(bullwhip_ratio(flat, d), 0.0);
  EXPECT_EQ(bullwhip_ratio(d, d), 1.0);
  std::vector<double> amplified;
  const double m = mean_of(d);
  for (double x : d) amplified.push_back(2 * (x - m) + m);
  EXPECT_NEAR(bullwhip_ratio(amplified, d), 4.0, 1e-9);
}

TEST(Bullwhip, Errors) {
  const std::vector<double> a{1, 2, 3}, b{1, 2}, flat{2, 2, 2};
  EXPECT_THROW(bullwhip_ratio(a, b), MetricsError);
  EXPECT_THROW(bullwhip_ratio(std::vector<double>{1}, std::vector<double>{1}), MetricsError);
  EXPECT_THROW(bullwhip_ratio(a, flat), MetricsError);
}

TEST(Bullwhip, ShiftInvariantAndQuadraticInScale) {
  Rng rng(1);
  std::vector<double> o(50), d(50);
  for (int i = 0; i < 50; ++i) {
    o[i] = rng.normal(5, 2);
    d[i] = rng.normal(3, 1);
  }
  const double base = bullwhip_ratio(o, d);
  auto shifted_o = o, shifted_d = d, scaled = o;
  for (int i = 0; i < 50; ++i) {
    shifted_o[i] += 11;
    shifted_d[i] += 11;
    scaled[i] *= 3;
  }
  EXPECT_NEAR(bullwhip_ratio(shifted_o, shifted_d), base, 1e-9 * base);
  EXPECT_NEAR(bullwhip_ratio(scaled, d), 9 * base, 1e-9 * base);
}

TEST(Stats, SampleVariance) {
  const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean_of(x), 5.0);
  EXPECT_NEAR(sample_variance(x), 32.0 / 7.0, 1e-12);
  EXPECT_EQ(sample_std(std::vector<double>{3}), 0.0);
}

TEST(Summarize, ConstantInventory) {
  const auto rows = summarize({{kKey, 1, constant_trace(10, 50)}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_retailer_inventory, 10);
  EXPECT_EQ(rows[0].std_reward, 0);
  EXPECT_EQ(rows[0].seeds, 1);
}

TEST(Summarize, MeanOverSeeds) {
  const auto rows = summarize({{kKey, 1, constant_trace(10, 100)}, {kKey, 2, constant_trace(10, 200)}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].mean_reward, 150.0, 1e-9);
  EXPECT_NEAR(rows[0].std_reward, std::sqrt(5000.0), 1e-9);
}

TEST(Summarize, GroupsByKeyAndRejectsEmpty) {
  GroupKey other = kKey;
  other.architecture = "hetero";
  const auto rows = summarize({{kKey, 1, constant_trace(10, 1)}, {other, 1, constant_trace(4, 1)}});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].key.architecture, "hetero");
  EXPECT_EQ(rows[0].mean_retailer_inventory, 4);
  EXPECT_THROW(summarize({}), MetricsError);
  EXPECT_THROW(summarize_group(kKey, {}), MetricsError);
}

TEST(Summarize, PermutationInvariant) {
  std::vector<LabeledTrace> traces;
  for (int i = 0; i < 6; ++i) traces.push_back({kKey, std::uint64_t(i % 3), constant_trace(i, 10 * i)});
  const auto a = summarize(traces);
  std::reverse(traces.begin(), traces.end());
  const auto b = summarize(traces);
  EXPECT_NEAR(a[0].mean_reward, b[0].mean_reward, 1e-12);
  EXPECT_NEAR(a[0].std_reward, b[0].std_reward, 1e-12);
  EXPECT_NEAR(a[0].mean_retailer_inventory, b[0].mean_retailer_inventory, 1e-12);
}

TEST(Summarize, CollaMatchesBaselineWithoutStockouts) {
  auto trace_for = [](RewardMode mode) {
    EnvSpec env;
    env.options.reward_mode = mode;
    env.demand = Scripted{std::vector<double>(30, 3.0)};
    DemandSampler d(env.demand, 0);
    return record_episode(env, heuristic_controller(BaseStock{12, 4}, env.params), d);
  };
  GroupKey colla = kKey;
  colla.reward_mode = "colla";
  auto a = summarize({{kKey, 1, trace_for(RewardMode::Baseline)}})[0];
  auto b = summarize({{colla, 1, trace_for(RewardMode::Colla)}})[0];
  EXPECT_EQ(a.retailer_stockout_events + a.factory_stockout_events, 0);
  EXPECT_EQ(a.mean_reward, b.mean_reward);
  EXPECT_EQ(a.mean_retailer_inventory, b.mean_retailer_inventory);
  EXPECT_EQ(a.mean_factory_inventory, b.mean_factory_inventory);
  EXPECT_EQ(a.retailer_backlog_events, b.retailer_backlog_events);
}

TEST(Summarize, EventCountsAndQuantities) {
  EpisodeTrace tr = constant_trace(5, 0, 4);
  tr.steps[1].retailer_stockout = 3;
  tr.steps[2].retailer_stockout = 1;
  tr.steps[3].factory_backlog = 2.5;
  const auto row = summarize({{kKey, 1, tr}})[0];
  EXPECT_EQ(row.retailer_stockout_events, 2);
  EXPECT_EQ(row.retailer_stockout_qty, 4);
  EXPECT_EQ(row.factory_backlog_events, 1);
  EXPECT_EQ(row.factory_backlog_qty, 2.5);
}

TEST(Convergence, ConstantCurve) {
  const std::vector<double> c(30, -5.0);
  const auto r = convergence_check(c, 10, 0.01);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iteration, 10);
}

TEST(Convergence, LinearCurveNeverWithZeroTol) {
  std::vector<double> c(200);
  for (int k = 0; k < 200; ++k) c[k] = k;
  EXPECT_FALSE(convergence_check(c, 10, 0.0).converged);
}

TEST(Convergence, GeometricApproachMatchesDirectEvaluation) {
  std::vector<double> c(100);
  for (int k = 0; k < 100; ++k) c[k] = 100.0 * (1.0 - std::pow(2.0, -k));
  int expected = -1;
  for (int k = 10; k < 100 && expected < 0; ++k) {
    double now = 0, before = 0;
    for (int j = k - 9; j <= k; ++j) now += c[j] / 10;
    for (int j = k - 10; j < k; ++j) before += c[j] / 10;
    if (std::abs(now - before) < 0.01 * std::abs(now)) expected = k;
  }
  ASSERT_GT(expected, 0);
  const auto r = convergence_check(c, 10, 0.01);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iteration, expected);
}

TEST(Convergence, WindowTooSmallAndMinimumIterations) {
  const std::vector<double> c(30, 1.0);
  EXPECT_THROW(convergence_check(c, 1, 0.1), MetricsError);
  const auto r = convergence_check(c, ConvergenceRule{5, 0.01, 12});
  EXPECT_EQ(r.iteration, 12);
}

TEST(Traces, CsvRoundTripAndHeader) {
  EnvSpec env;
  DemandSampler d(env.demand, 4);
  std::vector<EpisodeTrace> traces;
  for (int e = 0; e < 3; ++e)
    traces.push_back(record_episode(env, heuristic_controller(RandomPolicy{9}, env.params), d));
  std::stringstream ss;
  write_traces_csv(ss, traces);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header,
            "episode,t,demand,retailer_order,factory_order,retailer_price,factory_price,"
            "retailer_inventory,factory_inventory,retailer_stockout,factory_stockout,"
            "retailer_backlog,factory_backlog,retailer_reward,factory_reward");
  const auto back = read_traces_csv(ss);
  ASSERT_EQ(back.size(), 3u);
  for (int e = 0; e < 3; ++e) {
    ASSERT_EQ(back[e].steps.size(), 30u);
    EXPECT_EQ(back[e].total_reward(), traces[e].total_reward());
    EXPECT_EQ(back[e].steps[7].factory_price, traces[e].steps[7].factory_price);
  }
}

TEST(Traces, RecordEpisodeExtendsHorizon) {
  EnvSpec env;
  DemandSampler d(env.demand, 4);
  const auto tr = record_episode(env, heuristic_controller(BaseStock{}, env.params), d, 500);
  EXPECT_EQ(tr.steps.size(), 500u);
  EXPECT_EQ(tr.steps.back().t, 499);
}

TEST(Traces, RecordedFieldsMatchEnvironment) {
  EnvSpec env;
  env.demand = Scripted{{5, 2, 9}};
  DemandSampler d(env.demand, 0);
  const auto tr = record_episode(env, [](const ChainState&) { return JointAction{4, 5, 6, 2}; }, d, 3);
  EXPECT_EQ(tr.steps[0].retailer_inventory, 9);  // 10 + 4 - 5
  EXPECT_EQ(tr.steps[0].factory_inventory, 12);  // 10 + 6 - 4
  EXPECT_NEAR(tr.steps[0].retailer_reward, 5 * 5 - 0.2 * 10 - 2 * 4, 1e-12);
  EXPECT_EQ(tr.steps[2].retailer_stockout, 0);
  EXPECT_EQ(tr.steps[2].demand, 9);
}
