#include "masc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace masc {

double EpisodeTrace::total_reward() const { return retailer_reward() + factory_reward(); }

double EpisodeTrace::retailer_reward() const {
  double s = 0.0;
  for (const TraceStep& st : steps) s += st.retailer_reward;
  return s;
}

double EpisodeTrace::factory_reward() const {
  double s = 0.0;
  for (const TraceStep& st : steps) s += st.factory_reward;
  return s;
}

std::vector<double> EpisodeTrace::demands() const {
  std::vector<double> v;
  for (const TraceStep& st : steps) v.push_back(st.demand);
  return v;
}

std::vector<double> EpisodeTrace::retailer_orders() const {
  std::vector<double> v;
  for (const TraceStep& st : steps) v.push_back(st.retailer_order);
  return v;
}

std::vector<double> EpisodeTrace::factory_orders() const {
  std::vector<double> v;
  for (const TraceStep& st : steps) v.push_back(st.factory_order);
  return v;
}

namespace {

void write_step(std::ostream& out, const TraceStep& s) {
  out << s.t << ',' << s.demand << ',' << s.retailer_order << ',' << s.factory_order << ','
      << s.retailer_price << ',' << s.factory_price << ',' << s.retailer_inventory << ','
      << s.factory_inventory << ',' << s.retailer_stockout << ',' << s.factory_stockout << ','
      << s.retailer_backlog << ',' << s.factory_backlog << ',' << s.retailer_reward << ','
      << s.factory_reward << '\n';
}

// Formatting independent of the global locale.
std::ostream& prepare(std::ostream& out) {
  out.imbue(std::locale::classic());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

}  // namespace

void write_trace_csv(std::ostream& out, const EpisodeTrace& trace) {
  prepare(out) << kTraceCsvHeader << '\n';
  for (const TraceStep& s : trace.steps) write_step(out, s);
}

void write_traces_csv(std::ostream& out, const std::vector<EpisodeTrace>& traces) {
  prepare(out) << "episode," << kTraceCsvHeader << '\n';
  for (std::size_t e = 0; e < traces.size(); ++e)
    for (const TraceStep& s : traces[e].steps) {
      out << e << ',';
      write_step(out, s);
    }
}

std::vector<EpisodeTrace> read_traces_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != std::string("episode,") + kTraceCsvHeader)
    throw MetricsError("trace file header mismatch");
  std::vector<EpisodeTrace> traces;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw MetricsError("bad number on trace line " + std::to_string(line_no));
      }
    }
    if (v.size() != 15) throw MetricsError("wrong column count on trace line " + std::to_string(line_no));
    const auto episode = static_cast<std::size_t>(v[0]);
    if (episode >= traces.size()) traces.resize(episode + 1);
    TraceStep s;
    s.t = static_cast<int>(v[1]);
    s.demand = v[2];
    s.retailer_order = v[3];
    s.factory_order = v[4];
    s.retailer_price = v[5];
    s.factory_price = v[6];
    s.retailer_inventory = v[7];
    s.factory_inventory = v[8];
    s.retailer_stockout = v[9];
    s.factory_stockout = v[10];
    s.retailer_backlog = v[11];
    s.factory_backlog = v[12];
    s.retailer_reward = v[13];
    s.factory_reward = v[14];
    traces[episode].steps.push_back(s);
  }
  return traces;
}

EpisodeTrace record_episode(const EnvSpec& env, const Controller& controller,
                            DemandSampler& demand, int steps) {
  ChainParams params = env.params;
  const int n = steps < 0 ? params.horizon() : steps;
  if (n > params.horizon()) {
    params.retailer.horizon = n;
    params.factory.horizon = n;
  }
  EpisodeTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(n));
  ChainState state = reset(params, env.initial_price);
  for (int t = 0; t < n; ++t) {
    const JointAction a = controller(state);
    const double d = demand.sample();
    const StepOutcome out = step(params, env.options, state, a, d);
    TraceStep s;
    s.t = t;
    s.demand = d;
    s.retailer_order = out.applied.retailer_order;
    s.factory_order = out.applied.factory_order;
    s.retailer_price = out.applied.retailer_price;
    s.factory_price = out.applied.factory_price;
    s.retailer_inventory = out.next_state.retailer.inventory;
    s.factory_inventory = out.next_state.factory.inventory;
    s.retailer_stockout = out.retailer.stockout;
    s.factory_stockout = out.factory.stockout;
    s.retailer_backlog = out.retailer.backlog;
    s.factory_backlog = out.factory.backlog;
    s.retailer_reward = out.rewards.first;
    s.factory_reward = out.rewards.second;
    trace.steps.push_back(s);
    state = out.next_state;
  }
  return trace;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double sample_std(std::span<const double> xs) { return std::sqrt(sample_variance(xs)); }

double bullwhip_ratio(std::span<const double> orders, std::span<const double> demands) {
  if (orders.size() != demands.size())
    throw MetricsError("bullwhip_ratio: series lengths differ");
  if (orders.size() < 2) throw MetricsError("bullwhip_ratio: need at least two points");
  const double vd = sample_variance(demands);
  if (!(vd > 0.0)) throw MetricsError("bullwhip_ratio: demand variance is zero");
  return sample_variance(orders) / vd;
}

SummaryRow summarize_group(const GroupKey& key, const std::vector<const LabeledTrace*>& traces) {
  if (traces.empty()) throw MetricsError("summarize: empty group");
  SummaryRow row;
  row.key = key;

  std::map<std::uint64_t, std::vector<double>> per_seed;
  std::vector<double> retailer_rewards, factory_rewards;
  std::vector<double> bw_r, bw_f;
  double steps = 0.0;
  double inv_r = 0, inv_f = 0, price_r = 0, price_f = 0, ord_r = 0, ord_f = 0;
  double so_r_n = 0, so_f_n = 0, bl_r_n = 0, bl_f_n = 0;
  double so_r_q = 0, so_f_q = 0, bl_r_q = 0, bl_f_q = 0;

  for (const LabeledTrace* lt : traces) {
    const EpisodeTrace& tr = lt->trace;
    per_seed[lt->seed].push_back(tr.total_reward());
    retailer_rewards.push_back(tr.retailer_reward());
    factory_rewards.push_back(tr.factory_reward());
    for (const TraceStep& s : tr.steps) {
      steps += 1.0;
      inv_r += s.retailer_inventory;
      inv_f += s.factory_inventory;
      price_r += s.retailer_price;
      price_f += s.factory_price;
      ord_r += s.retailer_order;
      ord_f += s.factory_order;
      so_r_n += s.retailer_stockout > 0.0;
      so_f_n += s.factory_stockout > 0.0;
      bl_r_n += s.retailer_backlog > 0.0;
      bl_f_n += s.factory_backlog > 0.0;
      so_r_q += s.retailer_stockout;
      so_f_q += s.factory_stockout;
      bl_r_q += s.retailer_backlog;
      bl_f_q += s.factory_backlog;
    }
    const auto d = tr.demands();
    if (d.size() >= 2 && sample_variance(d) > 0.0) {
      bw_r.push_back(bullwhip_ratio(tr.retailer_orders(), d));
      bw_f.push_back(bullwhip_ratio(tr.factory_orders(), d));
    }
  }

  std::vector<double> seed_means;
  for (const auto& [seed, rewards] : per_seed) seed_means.push_back(mean_of(rewards));
  const double episodes = static_cast<double>(traces.size());
  row.seeds = static_cast<int>(per_seed.size());
  row.episodes = static_cast<int>(traces.size());
  row.mean_reward = mean_of(seed_means);
  row.std_reward = sample_std(seed_means);
  row.mean_retailer_reward = mean_of(retailer_rewards);
  row.mean_factory_reward = mean_of(factory_rewards);
  const double st = std::max(steps, 1.0);
  row.mean_retailer_inventory = inv_r / st;
  row.mean_factory_inventory = inv_f / st;
  row.mean_retailer_price = price_r / st;
  row.mean_factory_price = price_f / st;
  row.mean_retailer_order = ord_r / st;
  row.mean_factory_order = ord_f / st;
  row.retailer_stockout_events = so_r_n / episodes;
  row.factory_stockout_events = so_f_n / episodes;
  row.retailer_backlog_events = bl_r_n / episodes;
  row.factory_backlog_events = bl_f_n / episodes;
  row.retailer_stockout_qty = so_r_q / episodes;
  row.factory_stockout_qty = so_f_q / episodes;
  row.retailer_backlog_qty = bl_r_q / episodes;
  row.factory_backlog_qty = bl_f_q / episodes;
  row.bullwhip_retailer = mean_of(bw_r);
  row.bullwhip_factory = mean_of(bw_f);
  return row;
}

std::vector<SummaryRow> summarize(const std::vector<LabeledTrace>& traces) {
  if (traces.empty()) throw MetricsError("summarize: no traces");
  std::map<GroupKey, std::vector<const LabeledTrace*>> groups;
  for (const LabeledTrace& t : traces) groups[t.key].push_back(&t);
  std::vector<SummaryRow> rows;
  for (const auto& [key, members] : groups) rows.push_back(summarize_group(key, members));
  return rows;
}

namespace {

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  prepare(out) << "architecture,algorithm,reward_mode,demand,seeds,episodes,mean_reward,std_reward,"
                  "mean_retailer_reward,mean_factory_reward,mean_retailer_inventory,"
                  "mean_factory_inventory,mean_retailer_price,mean_factory_price,"
                  "mean_retailer_order,mean_factory_order,retailer_stockout_events,"
                  "factory_stockout_events,retailer_backlog_events,factory_backlog_events,"
                  "retailer_stockout_qty,factory_stockout_qty,retailer_backlog_qty,"
                  "factory_backlog_qty,bullwhip_retailer,bullwhip_factory,failed,note\n";
  for (const SummaryRow& r : rows) {
    out << r.key.architecture << ',' << r.key.algorithm << ',' << r.key.reward_mode << ','
        << r.key.demand_regime << ',' << r.seeds << ',' << r.episodes << ',' << r.mean_reward
        << ',' << r.std_reward << ',' << r.mean_retailer_reward << ',' << r.mean_factory_reward
        << ',' << r.mean_retailer_inventory << ',' << r.mean_factory_inventory << ','
        << r.mean_retailer_price << ',' << r.mean_factory_price << ',' << r.mean_retailer_order
        << ',' << r.mean_factory_order << ',' << r.retailer_stockout_events << ','
        << r.factory_stockout_events << ',' << r.retailer_backlog_events << ','
        << r.factory_backlog_events << ',' << r.retailer_stockout_qty << ','
        << r.factory_stockout_qty << ',' << r.retailer_backlog_qty << ','
        << r.factory_backlog_qty << ',' << r.bullwhip_retailer << ',' << r.bullwhip_factory
        << ',' << (r.failed ? 1 : 0) << ',' << csv_quote(r.note) << '\n';
  }
}

void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out.imbue(std::locale::classic());
  auto fixed = [](double v, int prec) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
  };
  out << std::left << std::setw(7) << "arch" << std::setw(10) << "algo" << std::setw(10)
      << "reward" << std::setw(9) << "demand" << std::right << std::setw(22)
      << "episode reward" << std::setw(9) << "inv R" << std::setw(9) << "inv F"
      << std::setw(8) << "price R" << std::setw(8) << "price F" << std::setw(8) << "SO R"
      << std::setw(8) << "SO F" << std::setw(8) << "BL R" << std::setw(8) << "BL F"
      << std::setw(8) << "BW R" << std::setw(8) << "BW F" << "  status\n";
  for (const SummaryRow& r : rows) {
    out << std::left << std::setw(7) << r.key.architecture << std::setw(10) << r.key.algorithm
        << std::setw(10) << r.key.reward_mode << std::setw(9) << r.key.demand_regime
        << std::right << std::setw(22)
        << (fixed(r.mean_reward, 1) + " +/- " + fixed(r.std_reward, 1)) << std::setw(9)
        << fixed(r.mean_retailer_inventory, 2) << std::setw(9)
        << fixed(r.mean_factory_inventory, 2) << std::setw(8) << fixed(r.mean_retailer_price, 2)
        << std::setw(8) << fixed(r.mean_factory_price, 2) << std::setw(8)
        << fixed(r.retailer_stockout_events, 1) << std::setw(8)
        << fixed(r.factory_stockout_events, 1) << std::setw(8)
        << fixed(r.retailer_backlog_events, 1) << std::setw(8)
        << fixed(r.factory_backlog_events, 1) << std::setw(8) << fixed(r.bullwhip_retailer, 2)
        << std::setw(8) << fixed(r.bullwhip_factory, 2) << "  "
        << (r.failed ? "FAILED " + r.note : "ok") << '\n';
  }
}

namespace {

ConvergenceResult check_from(std::span<const double> curve, int window, double tol,
                             std::size_t first) {
  if (window < 2) throw MetricsError("convergence window must be >= 2");
  ConvergenceResult res;
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t k = std::max(first, w); k < curve.size(); ++k) {
    double now = 0.0, before = 0.0;
    for (std::size_t j = k + 1 - w; j <= k; ++j) now += curve[j];
    for (std::size_t j = k - w; j < k; ++j) before += curve[j];
    now /= window;
    before /= window;
    const double change = std::abs(now - before);
    if (change == 0.0 || change < tol * std::abs(now)) {
      res.converged = true;
      res.iteration = static_cast<int>(k);
      return res;
    }
  }
  return res;
}

}  // namespace

ConvergenceResult convergence_check(std::span<const double> curve, int window, double tol) {
  return check_from(curve, window, tol, 0);
}

ConvergenceResult convergence_check(std::span<const double> curve, const ConvergenceRule& rule) {
  return check_from(curve, rule.window, rule.tol,
                    static_cast<std::size_t>(std::max(rule.min_iterations, 0)));
}

}  // namespace masc
