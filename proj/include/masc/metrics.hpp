#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "masc/demand.hpp"
#include "masc/env_spec.hpp"

namespace masc {

class MetricsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// One step of an episode. Inventories are end-of-step levels; stockout and
// backlog are the quantities incurred in the step; rewards are what the
// learners received (after shaping).
struct TraceStep {
  int t = 0;
  double demand = 0.0;
  double retailer_order = 0.0;
  double factory_order = 0.0;
  double retailer_price = 0.0;
  double factory_price = 0.0;
  double retailer_inventory = 0.0;
  double factory_inventory = 0.0;
  double retailer_stockout = 0.0;
  double factory_stockout = 0.0;
  double retailer_backlog = 0.0;
  double factory_backlog = 0.0;
  double retailer_reward = 0.0;
  double factory_reward = 0.0;
};

struct EpisodeTrace {
  std::vector<TraceStep> steps;

  double total_reward() const;
  double retailer_reward() const;
  double factory_reward() const;
  std::vector<double> demands() const;
  std::vector<double> retailer_orders() const;
  std::vector<double> factory_orders() const;
};

// Column order of trace CSV files.
inline constexpr const char* kTraceCsvHeader =
    "t,demand,retailer_order,factory_order,retailer_price,factory_price,"
    "retailer_inventory,factory_inventory,retailer_stockout,factory_stockout,"
    "retailer_backlog,factory_backlog,retailer_reward,factory_reward";

// Header plus one row per step. The multi-episode form prepends an
// `episode` column.
void write_trace_csv(std::ostream& out, const EpisodeTrace& trace);
void write_traces_csv(std::ostream& out, const std::vector<EpisodeTrace>& traces);
// Inverse of write_traces_csv. Throws MetricsError on a malformed file.
std::vector<EpisodeTrace> read_traces_csv(std::istream& in);

// Runs `controller` for `steps` steps from reset (default: the horizon). A
// longer run extends the horizon instead of terminating.
EpisodeTrace record_episode(const EnvSpec& env, const Controller& controller,
                            DemandSampler& demand, int steps = -1);

// Sample variance ratio Var(orders) / Var(demands) (n - 1 denominators).
double bullwhip_ratio(std::span<const double> orders, std::span<const double> demands);

// Sample mean/std helpers (std uses n - 1; 0 for fewer than two values).
double mean_of(std::span<const double> xs);
double sample_std(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

struct GroupKey {
  std::string architecture;
  std::string algorithm;
  std::string reward_mode;
  std::string demand_regime;

  bool operator==(const GroupKey&) const = default;
  auto operator<=>(const GroupKey&) const = default;
};

struct LabeledTrace {
  GroupKey key;
  std::uint64_t seed = 0;
  EpisodeTrace trace;
};

struct SummaryRow {
  GroupKey key;
  int seeds = 0;
  int episodes = 0;
  // Over seeds, each seed contributing its mean episode reward.
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double mean_retailer_reward = 0.0;
  double mean_factory_reward = 0.0;
  double mean_retailer_inventory = 0.0;
  double mean_factory_inventory = 0.0;
  double mean_retailer_price = 0.0;
  double mean_factory_price = 0.0;
  double mean_retailer_order = 0.0;
  double mean_factory_order = 0.0;
  // Steps with a nonzero event, per episode, and the mean quantity per episode.
  double retailer_stockout_events = 0.0;
  double factory_stockout_events = 0.0;
  double retailer_backlog_events = 0.0;
  double factory_backlog_events = 0.0;
  double retailer_stockout_qty = 0.0;
  double factory_stockout_qty = 0.0;
  double retailer_backlog_qty = 0.0;
  double factory_backlog_qty = 0.0;
  // Mean over episodes of Var(Q_i) / Var(customer demand); NaN when no
  // episode has varying demand.
  double bullwhip_retailer = 0.0;
  double bullwhip_factory = 0.0;
  bool failed = false;
  std::string note;
};

// One row per distinct GroupKey, in key order. Throws MetricsError on an
// empty input.
std::vector<SummaryRow> summarize(const std::vector<LabeledTrace>& traces);
SummaryRow summarize_group(const GroupKey& key, const std::vector<const LabeledTrace*>& traces);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows);

struct ConvergenceRule {
  int window = 20;
  double tol = 0.01;
  // Never report convergence before this many iterations.
  int min_iterations = 0;
};

struct ConvergenceResult {
  bool converged = false;
  int iteration = -1;
};

// Sliding-window rule: with m_k the mean of curve[k-window+1 .. k], the curve
// has converged at the first k >= window where
//   |m_k - m_{k-1}| < tol * |m_k|   (or the window mean did not move at all).
// Throws MetricsError when window < 2.
ConvergenceResult convergence_check(std::span<const double> curve, int window, double tol);
ConvergenceResult convergence_check(std::span<const double> curve, const ConvergenceRule& rule);

}  // namespace masc
