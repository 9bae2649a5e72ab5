#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "masc/runner.hpp"

namespace masc {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty item in list '" + text + "'");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("bad value for '" + key + "': '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("bad boolean for '" + key + "': '" + text + "'");
}

template <typename T>
std::string format_number(T v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, std::string>)
      out += xs[i];
    else
      out += format_number(xs[i]);
  }
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<T>(key, item));
  return out;
}

using PpoSetter = std::function<void(PpoConfig&, const std::string&, const std::string&)>;
using SacSetter = std::function<void(SacConfig&, const std::string&, const std::string&)>;

template <typename Config, typename Field>
auto setter(Field Config::*field) {
  return [field](Config& c, const std::string& key, const std::string& value) {
    c.*field = parse_number<Field>(key, value);
  };
}

const std::map<std::string, PpoSetter>& ppo_setters() {
  static const std::map<std::string, PpoSetter> m{
      {"clip", setter(&PpoConfig::clip)},
      {"kl_target", setter(&PpoConfig::kl_target)},
      {"learning_rate", setter(&PpoConfig::learning_rate)},
      {"lambda", setter(&PpoConfig::lambda)},
      {"vf_loss_coeff", setter(&PpoConfig::vf_loss_coeff)},
      {"epochs", setter(&PpoConfig::epochs)},
      {"train_batch_size", setter(&PpoConfig::train_batch_size)},
      {"minibatch_size", setter(&PpoConfig::minibatch_size)},
      {"initial_log_std", setter(&PpoConfig::initial_log_std)},
  };
  return m;
}

const std::map<std::string, SacSetter>& sac_setters() {
  static const std::map<std::string, SacSetter> m{
      {"tau", setter(&SacConfig::tau)},
      {"actor_learning_rate", setter(&SacConfig::actor_learning_rate)},
      {"critic_learning_rate", setter(&SacConfig::critic_learning_rate)},
      {"entropy_learning_rate", setter(&SacConfig::entropy_learning_rate)},
      {"batch_size", setter(&SacConfig::batch_size)},
      {"buffer_capacity", setter(&SacConfig::buffer_capacity)},
      {"warmup", setter(&SacConfig::warmup)},
      {"steps_per_iteration", setter(&SacConfig::steps_per_iteration)},
      {"priority_alpha", setter(&SacConfig::priority_alpha)},
      {"priority_beta", setter(&SacConfig::priority_beta)},
      {"priority_epsilon", setter(&SacConfig::priority_epsilon)},
      {"initial_alpha", setter(&SacConfig::initial_alpha)},
  };
  return m;
}

const std::set<std::string> kAlgorithms{"sac", "ppo", "random", "basestock", "constant"};

}  // namespace

bool is_learning_algorithm(const std::string& algorithm) {
  return algorithm == "sac" || algorithm == "ppo";
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(!demands.empty() && !architectures.empty() && !algorithms.empty() && !rewards.empty(),
          "every matrix axis needs at least one value");
  for (const auto& d : demands) require(d == "high" || d == "low", "unknown demand regime '" + d + "'");
  for (const auto& a : architectures) parse_architecture(a);
  for (const auto& a : algorithms) require(kAlgorithms.count(a) > 0, "unknown algorithm '" + a + "'");
  for (const auto& r : rewards) parse_reward_mode(r);
  require(!seeds.empty(), "at least one seed is required");
  require(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == seeds.size(),
          "seeds must be distinct");
  require(horizon >= 1, "horizon must be >= 1");
  require(iterations >= 1, "iteration cap must be >= 1");
  require(convergence_window >= 2, "convergence window must be >= 2");
  require(convergence_tol >= 0.0, "convergence tolerance must be >= 0");
  require(min_iterations >= 0, "min_iterations must be >= 0");
  require(!hidden.empty(), "at least one hidden layer is required");
  for (int w : hidden) require(w > 0, "hidden widths must be positive");
  require(eoq_order_cost > 0.0, "eoq_order_cost must be > 0");
  require(jobs >= 1, "jobs must be >= 1");
  PpoConfig ppo_probe;
  for (const auto& [k, v] : ppo) {
    const auto it = ppo_setters().find(k);
    require(it != ppo_setters().end(), "unknown key 'ppo." + k + "'");
    it->second(ppo_probe, "ppo." + k, v);
  }
  SacConfig sac_probe;
  for (const auto& [k, v] : sac) {
    const auto it = sac_setters().find(k);
    require(it != sac_setters().end(), "unknown key 'sac." + k + "'");
    it->second(sac_probe, "sac." + k, v);
  }
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      const std::string value = trim(node.data());
      if (section == "experiment") {
        if (key == "demand") c.demands = split_list(value);
        else if (key == "architecture") c.architectures = split_list(value);
        else if (key == "algorithm") c.algorithms = split_list(value);
        else if (key == "reward") c.rewards = split_list(value);
        else if (key == "seeds") c.seeds = parse_numbers<std::uint64_t>(name, value);
        else if (key == "horizon") c.horizon = parse_number<int>(name, value);
        else if (key == "iterations") c.iterations = parse_number<int>(name, value);
        else if (key == "convergence_window") c.convergence_window = parse_number<int>(name, value);
        else if (key == "convergence_tol") c.convergence_tol = parse_number<double>(name, value);
        else if (key == "min_iterations") c.min_iterations = parse_number<int>(name, value);
        else if (key == "hidden") c.hidden = parse_numbers<int>(name, value);
        else if (key == "output") c.output = value;
        else if (key == "strict_actions") c.strict_actions = parse_bool(name, value);
        else if (key == "eoq_order_cost") c.eoq_order_cost = parse_number<double>(name, value);
        else if (key == "initial_price") c.initial_price = parse_number<double>(name, value);
        else if (key == "jobs") c.jobs = parse_number<int>(name, value);
        else throw ConfigError("unknown key '" + name + "'");
      } else if (section == "ppo") {
        c.ppo[key] = value;
      } else if (section == "sac") {
        c.sac[key] = value;
      } else if (section == "heuristic") {
        if (key == "base_stock_target") c.base_stock_target = parse_number<double>(name, value);
        else if (key == "constant_order") c.constant_order = parse_number<double>(name, value);
        else if (key == "price") c.heuristic_price = parse_number<double>(name, value);
        else throw ConfigError("unknown key '" + name + "'");
      } else {
        throw ConfigError("unknown section '" + section + "'");
      }
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_experiment_config(in);
}

void serialize_experiment_config(std::ostream& out, const ExperimentConfig& c) {
  out << "[experiment]\n"
      << "demand = " << join(c.demands) << '\n'
      << "architecture = " << join(c.architectures) << '\n'
      << "algorithm = " << join(c.algorithms) << '\n'
      << "reward = " << join(c.rewards) << '\n'
      << "seeds = " << join(c.seeds) << '\n'
      << "horizon = " << c.horizon << '\n'
      << "iterations = " << c.iterations << '\n'
      << "convergence_window = " << c.convergence_window << '\n'
      << "convergence_tol = " << format_number(c.convergence_tol) << '\n'
      << "min_iterations = " << c.min_iterations << '\n'
      << "hidden = " << join(c.hidden) << '\n';
  if (!c.output.empty()) out << "output = " << c.output << '\n';
  out << "strict_actions = " << (c.strict_actions ? "true" : "false") << '\n'
      << "eoq_order_cost = " << format_number(c.eoq_order_cost) << '\n'
      << "initial_price = " << format_number(c.initial_price) << '\n'
      << "jobs = " << c.jobs << '\n';
  if (!c.ppo.empty()) {
    out << "\n[ppo]\n";
    for (const auto& [k, v] : c.ppo) out << k << " = " << v << '\n';
  }
  if (!c.sac.empty()) {
    out << "\n[sac]\n";
    for (const auto& [k, v] : c.sac) out << k << " = " << v << '\n';
  }
  out << "\n[heuristic]\n"
      << "base_stock_target = " << format_number(c.base_stock_target) << '\n'
      << "constant_order = " << format_number(c.constant_order) << '\n'
      << "price = " << format_number(c.heuristic_price) << '\n';
}

std::string Cell::name() const { return architecture + "_" + algorithm + "_" + reward + "_" + demand; }

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (const auto& d : config.demands)
    for (const auto& a : config.architectures)
      for (const auto& g : config.algorithms)
        for (const auto& r : config.rewards) cells.push_back(Cell{d, a, g, r});
  return cells;
}

EnvSpec make_env_spec(const ExperimentConfig& config, const Cell& cell) {
  EnvSpec env;
  env.params.retailer.horizon = config.horizon;
  env.params.factory.horizon = config.horizon;
  env.options.reward_mode = parse_reward_mode(cell.reward);
  env.options.strict_actions = config.strict_actions;
  if (cell.demand == "high")
    env.demand = HighPoisson{};
  else
    env.demand = LowNormal{};
  env.initial_price = config.initial_price;
  return env;
}

AgentConfig make_agent_config(const ExperimentConfig& config, const Cell& cell) {
  AgentConfig a = AgentConfig::defaults(parse_algorithm(cell.algorithm),
                                        parse_architecture(cell.architecture));
  a.hidden = config.hidden;
  for (const auto& [k, v] : config.ppo) ppo_setters().at(k)(a.ppo, "ppo." + k, v);
  for (const auto& [k, v] : config.sac) sac_setters().at(k)(a.sac, "sac." + k, v);
  a.validate();
  return a;
}

HeuristicPolicy make_heuristic(const ExperimentConfig& config, const Cell& cell,
                               std::uint64_t seed) {
  if (cell.algorithm == "basestock") return BaseStock{config.base_stock_target, config.heuristic_price};
  if (cell.algorithm == "constant") return ConstantOrder{config.constant_order, config.heuristic_price};
  if (cell.algorithm == "random") return RandomPolicy{seed};
  throw ConfigError("'" + cell.algorithm + "' is not a heuristic");
}

}  // namespace masc
