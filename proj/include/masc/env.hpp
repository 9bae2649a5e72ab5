#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace masc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ActionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EpisodeFinished : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
  double width() const { return hi - lo; }
};

enum class Echelon { Retailer = 1, Factory = 2 };

// Economic constants of one node in the chain.
struct EchelonParams {
  Interval sales_price_range{0.0, 6.0};
  Interval order_range{0.0, 20.0};
  // Unset: the node buys at the upstream node's current sales price.
  std::optional<double> fixed_purchase_cost;
  double holding_cost = 0.2;
  double initial_inventory = 10.0;
  // Storage capacity. Only used to scale observations; overstock penalties
  // start at backlog_threshold.
  double capacity = 19.0;
  double stockout_cost = 140.0;
  double backlog_cost = 1.0;
  double backlog_threshold = 20.0;
  int horizon = 30;

  static EchelonParams retailer_defaults();
  static EchelonParams factory_defaults();

  // Throws ConfigError on inverted ranges, negative costs or levels.
  void validate() const;
};

struct ChainParams {
  EchelonParams retailer = EchelonParams::retailer_defaults();
  EchelonParams factory = EchelonParams::factory_defaults();

  const EchelonParams& operator[](Echelon e) const {
    return e == Echelon::Retailer ? retailer : factory;
  }
  int horizon() const { return retailer.horizon; }
  void validate() const;
};

enum class RewardMode { Baseline, PeaRSO, PeaFSO, Colla };

std::string to_string(RewardMode mode);
RewardMode parse_reward_mode(const std::string& name);

struct EchelonState {
  double inventory = 0.0;
  double backlog_level = 0.0;
  double stockout_level = 0.0;
  // Oldest first: (D_{t-2}, D_{t-1}, D_t).
  std::array<double, 3> demand_history{0.0, 0.0, 0.0};

  bool operator==(const EchelonState&) const = default;
};

struct ChainState {
  EchelonState retailer;
  EchelonState factory;
  // Factory's most recent sales price (the retailer's purchase price).
  double upstream_price = 0.0;
  int t = 0;

  const EchelonState& operator[](Echelon e) const {
    return e == Echelon::Retailer ? retailer : factory;
  }
  bool operator==(const ChainState&) const = default;
};

struct JointAction {
  double retailer_order = 0.0;
  double retailer_price = 0.0;
  double factory_order = 0.0;
  double factory_price = 0.0;
};

struct EchelonInfo {
  double demand = 0.0;
  double sold = 0.0;
  double stockout = 0.0;
  double backlog = 0.0;
};

struct StepOutcome {
  ChainState next_state;
  // Shaped rewards (r_1, r_2) as seen by the learners.
  std::pair<double, double> rewards;
  // Unshaped nodal profits.
  std::pair<double, double> base_rewards;
  EchelonInfo retailer;
  EchelonInfo factory;
  // The action after clamping, i.e. what the transition actually used.
  JointAction applied;
};

struct EnvOptions {
  RewardMode reward_mode = RewardMode::Baseline;
  // Out-of-range actions raise ActionError instead of being clamped.
  bool strict_actions = false;
};

ChainState reset(const ChainParams& params, double initial_price);

StepOutcome step(const ChainParams& params, const EnvOptions& options, const ChainState& state,
                 const JointAction& action, double customer_demand);

// Nodal profit of one echelon for one step, evaluated on the pre-transition
// inventory:
//   price * demand - Hc * I - Bc * max(I - threshold, 0)
//   - Sc * max(demand - I, 0) - purchase_price * order
double echelon_reward(const EchelonParams& params, double inventory, double sales_price,
                      double demand, double order, double purchase_price);

double retailer_reward(const EchelonState& pre, const JointAction& action, double demand,
                       const EchelonParams& params = EchelonParams::retailer_defaults());

double factory_reward(const EchelonState& pre, const JointAction& action, double retailer_order,
                      const EchelonParams& params = EchelonParams::factory_defaults());

// Cross-penalties for the partner's stockouts. No profit is transferred.
std::pair<double, double> apply_shaping(RewardMode mode, std::pair<double, double> base,
                                        double demand, double retailer_inventory_pre,
                                        double retailer_order, double factory_inventory_pre,
                                        const ChainParams& params = {});

// (I_i, B_i, SL_i, D_{i,t-2}, D_{i,t-1}, D_{i,t}, p_t)
std::array<double, 7> observe_heterogeneous(const ChainState& state, Echelon echelon);
std::array<double, 7> observe_heterogeneous(const ChainState& state, int echelon_index);

// (I_1, I_2, B_1, B_2, SL_1, SL_2, D_{1,t-2}, D_{2,t-2}, D_{1,t-1}, D_{2,t-1},
//  D_{1,t}, D_{2,t}, p_t)
std::array<double, 13> observe_homogeneous(const ChainState& state);

}  // namespace masc
