#pragma once

#include <cstddef>
#include <vector>

#include "masc/nn.hpp"
#include "masc/rng.hpp"

namespace masc {

struct Transition {
  nn::RowVector obs;
  nn::RowVector action;
  double reward = 0.0;
  nn::RowVector next_obs;
  bool done = false;
};

struct ReplaySample {
  std::vector<std::size_t> indices;
  nn::Matrix obs;
  nn::Matrix action;
  nn::Matrix reward;    // Bx1
  nn::Matrix next_obs;
  nn::Matrix done;      // Bx1, 1.0 for terminal
  nn::Matrix weights;   // Bx1 importance weights, max-normalized
};

// Ring buffer with proportional prioritized sampling: P(i) ~ p_i^alpha,
// weights (N P(i))^-beta / max, priorities |td| + epsilon. New transitions
// enter at the current maximum priority.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double alpha = 0.6, double beta = 0.4,
               double epsilon = 1e-6);

  void add(Transition t);
  ReplaySample sample(std::size_t batch, Rng& rng) const;
  void update_priorities(const std::vector<std::size_t>& indices, const nn::Matrix& td_errors);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  double total_priority() const { return tree_[1]; }
  // P(i) for a stored slot.
  double probability(std::size_t index) const;

 private:
  void set_priority(std::size_t index, double priority);
  std::size_t find(double mass) const;

  std::size_t capacity_;
  std::size_t leaves_;
  double alpha_, beta_, epsilon_;
  std::vector<Transition> data_;
  std::vector<double> tree_;  // sum tree over p_i^alpha, root at 1
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace masc
