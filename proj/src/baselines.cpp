#include "masc/baselines.hpp"

#include <cmath>

namespace masc {

double eoq(const EoqInputs& in) {
  if (!(in.demand_rate > 0.0 && in.order_cost > 0.0 && in.holding_cost > 0.0 &&
        in.stockout_cost > 0.0))
    throw ConfigError("EOQ inputs must all be strictly positive");
  const double base = std::sqrt(2.0 * in.demand_rate * in.order_cost / in.holding_cost);
  return base * std::sqrt((in.holding_cost + in.stockout_cost) / in.stockout_cost);
}

double eoq_rounded(const EoqInputs& in) { return std::round(eoq(in)); }

namespace {

std::uint64_t policy_seed(const HeuristicPolicy& p) {
  if (const auto* r = std::get_if<RandomPolicy>(&p)) return r->seed;
  return 0;
}

}  // namespace

HeuristicAgent::HeuristicAgent(HeuristicPolicy policy, EchelonParams params)
    : policy_(policy), params_(params), rng_(policy_seed(policy)) {}

EchelonAction HeuristicAgent::act(std::span<const double> observation) {
  if (observation.empty()) throw std::invalid_argument("empty observation");
  const double inventory = observation[0];
  if (const auto* b = std::get_if<BaseStock>(&policy_)) {
    const double order = params_.order_range.clamp(std::max(b->target - inventory, 0.0));
    return {order, params_.sales_price_range.clamp(b->price)};
  }
  if (const auto* c = std::get_if<ConstantOrder>(&policy_))
    return {params_.order_range.clamp(c->quantity), params_.sales_price_range.clamp(c->price)};
  const double lo = std::ceil(params_.order_range.lo);
  const double hi = std::floor(params_.order_range.hi);
  const double order = lo + static_cast<double>(rng_.below(static_cast<std::uint64_t>(hi - lo) + 1));
  const double price = rng_.uniform(params_.sales_price_range.lo, params_.sales_price_range.hi);
  return {order, price};
}

EchelonAction heuristic_action(HeuristicAgent& agent, std::span<const double> observation) {
  return agent.act(observation);
}

Controller heuristic_controller(const HeuristicPolicy& policy, const ChainParams& params) {
  HeuristicPolicy retailer = policy, factory = policy;
  if (const auto* r = std::get_if<RandomPolicy>(&policy)) {
    retailer = RandomPolicy{derive_seed(r->seed, 1)};
    factory = RandomPolicy{derive_seed(r->seed, 2)};
  }
  auto agents = std::make_shared<std::pair<HeuristicAgent, HeuristicAgent>>(
      HeuristicAgent(retailer, params.retailer), HeuristicAgent(factory, params.factory));
  return [agents](const ChainState& s) {
    const auto r = agents->first.act(observe_heterogeneous(s, Echelon::Retailer));
    const auto f = agents->second.act(observe_heterogeneous(s, Echelon::Factory));
    return JointAction{r.order, r.price, f.order, f.price};
  };
}

}  // namespace masc
