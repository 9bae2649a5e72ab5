#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <variant>

#include "masc/env.hpp"
#include "masc/env_spec.hpp"
#include "masc/rng.hpp"

namespace masc {

struct EoqInputs {
  double demand_rate = 0.0;    // units per period
  double order_cost = 0.0;     // per order placed
  double holding_cost = 0.0;   // per unit per period
  double stockout_cost = 0.0;  // per unit short
};

// Order quantity with planned shortages:
//   sqrt(2 D Oc / Hc) * sqrt((Hc + Sc) / Sc)
// Throws ConfigError unless every input is strictly positive.
double eoq(const EoqInputs& in);
double eoq_rounded(const EoqInputs& in);

// Orders max(target - inventory, 0), clamped to the order range.
struct BaseStock {
  double target = 15.0;
  double price = 3.0;
};

struct ConstantOrder {
  double quantity = 10.0;
  double price = 3.0;
};

// Integer orders and continuous prices drawn uniformly over the legal ranges.
struct RandomPolicy {
  std::uint64_t seed = 0;
};

using HeuristicPolicy = std::variant<BaseStock, ConstantOrder, RandomPolicy>;

struct EchelonAction {
  double order = 0.0;
  double price = 0.0;
};

// Stateful evaluator for one echelon. Observations use the per-echelon layout
// (I, B, SL, D_{t-2}, D_{t-1}, D_t, p).
class HeuristicAgent {
 public:
  HeuristicAgent(HeuristicPolicy policy, EchelonParams params);

  EchelonAction act(std::span<const double> observation);
  const HeuristicPolicy& policy() const { return policy_; }

 private:
  HeuristicPolicy policy_;
  EchelonParams params_;
  Rng rng_;
};

EchelonAction heuristic_action(HeuristicAgent& agent, std::span<const double> observation);

// Both echelons run the same rule. RandomPolicy echelons get distinct
// sub-streams of the policy seed.
Controller heuristic_controller(const HeuristicPolicy& policy, const ChainParams& params);

}  // namespace masc
