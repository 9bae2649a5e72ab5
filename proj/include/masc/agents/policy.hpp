#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "masc/env.hpp"
#include "masc/nn.hpp"

namespace masc {

struct ActionDim {
  Interval range;
  bool integer = false;
};

// Legal action box of one policy plus the rule that maps a squashed value in
// [-1, 1] onto it. Integer dimensions (orders) are rounded after mapping.
struct ActionSpace {
  std::vector<ActionDim> dims;

  int size() const { return static_cast<int>(dims.size()); }
  double to_env(int dim, double squashed) const;
  std::vector<double> to_env(const nn::RowVector& squashed) const;
  // Sum of log half-widths: the log-determinant of the affine map.
  double log_scale() const;

  // (Q_1, Q_2, Sp_1, Sp_2)
  static ActionSpace homogeneous(const ChainParams& params);
  // (Q_i, Sp_i)
  static ActionSpace echelon(const EchelonParams& params);
};

// Per-feature divisors applied to raw observations before they reach a
// network: inventory, backlog and stockout by capacity, demand by the
// order ceiling, price by the price ceiling.
nn::RowVector observation_scale_homogeneous(const ChainParams& params);
nn::RowVector observation_scale_echelon(const ChainParams& params, Echelon echelon);

enum class LogStdMode { StateDependent, Global };

// Tanh-squashed diagonal Gaussian policy over an ActionSpace.
class PolicyNet {
 public:
  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  struct Sample {
    nn::RowVector raw;       // pre-squash Gaussian draw
    nn::RowVector squashed;  // tanh(raw), in [-1, 1]
    std::vector<double> action;  // mapped onto the ActionSpace
    double log_prob = 0.0;   // density of the continuous action on the box
  };

  // Differentiable batch heads.
  struct Heads {
    nn::Var mean;
    nn::Var log_std;  // BxA for StateDependent, 1xA for Global
  };

  PolicyNet() = default;
  PolicyNet(nn::RowVector observation_scale, ActionSpace space, std::vector<int> hidden,
            nn::Activation activation, LogStdMode mode, Rng& rng, double initial_log_std = 0.0);

  int observation_size() const { return static_cast<int>(scale_.size()); }
  int action_size() const { return space_.size(); }
  const ActionSpace& space() const { return space_; }
  LogStdMode log_std_mode() const { return mode_; }

  // Raw observation in, legal action out. Deterministic mode returns the
  // squashed mean; its log_prob is evaluated at the mean.
  Sample select_action(std::span<const double> observation, bool stochastic, Rng& rng) const;

  nn::RowVector scale_observation(std::span<const double> observation) const;
  nn::Matrix scale_observations(const nn::Matrix& raw) const;

  // Heads for a batch of already scaled observations.
  Heads heads(nn::Tape& tape, const nn::Var& scaled_obs);

  // log N(raw; mean, std) summed over dims, minus the tanh and affine
  // Jacobians; returns Bx1.
  nn::Var log_prob(nn::Tape& tape, const Heads& heads, const nn::Matrix& raw);

  struct Reparameterized {
    nn::Var squashed;  // Bx A, tanh(mean + std * noise)
    nn::Var log_prob;  // Bx1, density of the squashed value on [-1, 1]^A
  };
  // Differentiable sample for a state-dependent head, given standard normal
  // noise of shape BxA.
  Reparameterized rsample(nn::Tape& tape, const Heads& heads, const nn::Matrix& noise);

  // Plain-matrix version of log_prob for one sample (no tape).
  double log_prob(const nn::RowVector& mean, const nn::RowVector& log_std,
                  const nn::RowVector& raw) const;

  std::vector<nn::Parameter*> parameters();
  nn::Mlp& backbone() { return backbone_; }
  const nn::Mlp& backbone() const { return backbone_; }
  nn::Parameter& global_log_std() { return global_log_std_; }
  bool all_finite() const;

  void save(std::ostream& out) const;
  static PolicyNet load(std::istream& in);

 private:
  void mean_log_std(const nn::RowVector& scaled, nn::RowVector& mean, nn::RowVector& log_std) const;

  nn::RowVector scale_;
  ActionSpace space_;
  LogStdMode mode_ = LogStdMode::Global;
  nn::Mlp backbone_;
  nn::Parameter global_log_std_;
};

// log(1 - tanh(u)^2), numerically stable.
double log_tanh_jacobian(double u);

}  // namespace masc
