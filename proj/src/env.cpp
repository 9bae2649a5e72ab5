#include "masc/env.hpp"

#include <algorithm>
#include <cmath>

namespace masc {

EchelonParams EchelonParams::retailer_defaults() {
  EchelonParams p;
  p.fixed_purchase_cost.reset();
  p.capacity = 19.0;
  p.stockout_cost = 140.0;
  p.backlog_threshold = 20.0;
  return p;
}

EchelonParams EchelonParams::factory_defaults() {
  EchelonParams p;
  p.fixed_purchase_cost = 0.2;
  p.capacity = 59.0;
  p.stockout_cost = 70.0;
  p.backlog_threshold = 60.0;
  return p;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void validate_interval(const Interval& r, const std::string& name) {
  require(std::isfinite(r.lo) && std::isfinite(r.hi), name + " bounds must be finite");
  require(r.lo <= r.hi, name + " range is inverted");
  require(r.lo >= 0.0, name + " range must be nonnegative");
}

}  // namespace

void EchelonParams::validate() const {
  validate_interval(sales_price_range, "sales price");
  validate_interval(order_range, "order");
  if (fixed_purchase_cost) require(*fixed_purchase_cost >= 0.0, "purchase cost must be >= 0");
  require(holding_cost >= 0.0, "holding cost must be >= 0");
  require(initial_inventory >= 0.0, "initial inventory must be >= 0");
  require(capacity >= 0.0, "capacity must be >= 0");
  require(stockout_cost >= 0.0, "stockout cost must be >= 0");
  require(backlog_cost >= 0.0, "backlog cost must be >= 0");
  require(backlog_threshold >= 0.0, "backlog threshold must be >= 0");
  require(horizon >= 1, "horizon must be >= 1");
}

void ChainParams::validate() const {
  retailer.validate();
  factory.validate();
  require(retailer.horizon == factory.horizon, "echelons must share one horizon");
  require(factory.fixed_purchase_cost.has_value(), "the factory needs a fixed purchase cost");
}

std::string to_string(RewardMode mode) {
  switch (mode) {
    case RewardMode::Baseline: return "baseline";
    case RewardMode::PeaRSO: return "pearso";
    case RewardMode::PeaFSO: return "peafso";
    case RewardMode::Colla: return "colla";
  }
  return "?";
}

RewardMode parse_reward_mode(const std::string& name) {
  if (name == "baseline") return RewardMode::Baseline;
  if (name == "pearso") return RewardMode::PeaRSO;
  if (name == "peafso") return RewardMode::PeaFSO;
  if (name == "colla") return RewardMode::Colla;
  throw ConfigError("unknown reward mode '" + name + "'");
}

ChainState reset(const ChainParams& params, double initial_price) {
  params.validate();
  if (!params.factory.sales_price_range.contains(initial_price))
    throw ConfigError("initial price outside the factory price range");
  ChainState s;
  s.retailer.inventory = params.retailer.initial_inventory;
  s.factory.inventory = params.factory.initial_inventory;
  s.upstream_price = initial_price;
  s.t = 0;
  return s;
}

double echelon_reward(const EchelonParams& params, double inventory, double sales_price,
                      double demand, double order, double purchase_price) {
  return sales_price * demand - params.holding_cost * inventory -
         params.backlog_cost * std::max(inventory - params.backlog_threshold, 0.0) -
         params.stockout_cost * std::max(demand - inventory, 0.0) - purchase_price * order;
}

double retailer_reward(const EchelonState& pre, const JointAction& action, double demand,
                       const EchelonParams& params) {
  const double purchase = params.fixed_purchase_cost.value_or(action.factory_price);
  return echelon_reward(params, pre.inventory, action.retailer_price, demand,
                        action.retailer_order, purchase);
}

double factory_reward(const EchelonState& pre, const JointAction& action, double retailer_order,
                      const EchelonParams& params) {
  const double purchase = params.fixed_purchase_cost.value_or(0.0);
  return echelon_reward(params, pre.inventory, action.factory_price, retailer_order,
                        action.factory_order, purchase);
}

std::pair<double, double> apply_shaping(RewardMode mode, std::pair<double, double> base,
                                        double demand, double retailer_inventory_pre,
                                        double retailer_order, double factory_inventory_pre,
                                        const ChainParams& params) {
  const double factory_short = std::max(retailer_order - factory_inventory_pre, 0.0);
  const double retailer_short = std::max(demand - retailer_inventory_pre, 0.0);
  const double on_retailer = params.factory.stockout_cost * factory_short;
  const double on_factory = params.retailer.stockout_cost * retailer_short;
  switch (mode) {
    case RewardMode::Baseline: return base;
    case RewardMode::PeaRSO: return {base.first, base.second - on_factory};
    case RewardMode::PeaFSO: return {base.first - on_retailer, base.second};
    case RewardMode::Colla: return {base.first - on_retailer, base.second - on_factory};
  }
  return base;
}

namespace {

[[noreturn, gnu::cold, gnu::noinline]] void reject(double value, const Interval& range,
                                                  const char* what) {
  if (!std::isfinite(value)) throw ActionError(std::string(what) + " is not finite");
  throw ActionError(std::string(what) + " outside [" + std::to_string(range.lo) + ", " +
                    std::to_string(range.hi) + "]");
}

[[noreturn, gnu::cold, gnu::noinline]] void reject_step(const ChainState& state, int horizon) {
  if (state.t >= horizon)
    throw EpisodeFinished("step called at t=" + std::to_string(state.t) + " with horizon " +
                          std::to_string(horizon));
  throw ActionError("customer demand must be finite and >= 0");
}

inline double admit(double value, const Interval& range, bool strict, const char* what) {
  if (!std::isfinite(value) || (strict && !range.contains(value))) reject(value, range, what);
  return range.clamp(value);
}

EchelonState advance(const EchelonState& pre, const EchelonParams& params, double order,
                     double demand, EchelonInfo& info) {
  EchelonState next;
  info.demand = demand;
  info.stockout = std::max(demand - pre.inventory, 0.0);
  info.sold = std::min(demand, pre.inventory);
  next.inventory = std::max(pre.inventory + order - demand, 0.0);
  next.stockout_level = info.stockout;
  next.backlog_level = std::max(next.inventory - params.backlog_threshold, 0.0);
  info.backlog = next.backlog_level;
  next.demand_history = {pre.demand_history[1], pre.demand_history[2], demand};
  return next;
}

}  // namespace

StepOutcome step(const ChainParams& params, const EnvOptions& options, const ChainState& state,
                 const JointAction& action, double customer_demand) {
  if (state.t >= params.horizon() || !std::isfinite(customer_demand) || customer_demand < 0.0)
    reject_step(state, params.horizon());

  const bool strict = options.strict_actions;
  JointAction a;
  a.retailer_order = admit(action.retailer_order, params.retailer.order_range, strict,
                           "retailer order");
  a.retailer_price = admit(action.retailer_price, params.retailer.sales_price_range, strict,
                           "retailer price");
  a.factory_order = admit(action.factory_order, params.factory.order_range, strict,
                          "factory order");
  a.factory_price = admit(action.factory_price, params.factory.sales_price_range, strict,
                          "factory price");

  StepOutcome out;
  out.applied = a;
  const double factory_demand = a.retailer_order;

  out.base_rewards = {retailer_reward(state.retailer, a, customer_demand, params.retailer),
                      factory_reward(state.factory, a, factory_demand, params.factory)};
  out.rewards = apply_shaping(options.reward_mode, out.base_rewards, customer_demand,
                              state.retailer.inventory, a.retailer_order,
                              state.factory.inventory, params);

  out.next_state.retailer =
      advance(state.retailer, params.retailer, a.retailer_order, customer_demand, out.retailer);
  out.next_state.factory =
      advance(state.factory, params.factory, a.factory_order, factory_demand, out.factory);
  out.next_state.upstream_price = a.factory_price;
  out.next_state.t = state.t + 1;
  return out;
}

std::array<double, 7> observe_heterogeneous(const ChainState& state, Echelon echelon) {
  const EchelonState& e = state[echelon];
  return {e.inventory,         e.backlog_level,     e.stockout_level,    e.demand_history[0],
          e.demand_history[1], e.demand_history[2], state.upstream_price};
}

std::array<double, 7> observe_heterogeneous(const ChainState& state, int echelon_index) {
  if (echelon_index != 1 && echelon_index != 2)
    throw std::out_of_range("echelon index must be 1 (retailer) or 2 (factory)");
  return observe_heterogeneous(state, static_cast<Echelon>(echelon_index));
}

std::array<double, 13> observe_homogeneous(const ChainState& state) {
  const EchelonState& r = state.retailer;
  const EchelonState& f = state.factory;
  return {r.inventory,         f.inventory,         r.backlog_level,     f.backlog_level,
          r.stockout_level,    f.stockout_level,    r.demand_history[0], f.demand_history[0],
          r.demand_history[1], f.demand_history[1], r.demand_history[2], f.demand_history[2],
          state.upstream_price};
}

}  // namespace masc
