#include "masc/agents/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace masc {

ReplayBuffer::ReplayBuffer(std::size_t capacity, double alpha, double beta, double epsilon)
    : capacity_(capacity), alpha_(alpha), beta_(beta), epsilon_(epsilon) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
  if (alpha < 0.0 || beta < 0.0 || epsilon <= 0.0)
    throw std::invalid_argument("replay exponents must be >= 0 and epsilon > 0");
  leaves_ = 1;
  while (leaves_ < capacity_) leaves_ <<= 1;
  tree_.assign(2 * leaves_, 0.0);
  data_.resize(capacity_);
}

void ReplayBuffer::set_priority(std::size_t index, double priority) {
  std::size_t node = leaves_ + index;
  tree_[node] = std::pow(priority, alpha_);
  for (node >>= 1; node >= 1; node >>= 1) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
}

std::size_t ReplayBuffer::find(double mass) const {
  std::size_t node = 1;
  while (node < leaves_) {
    const std::size_t left = 2 * node;
    if (mass < tree_[left] || tree_[left + 1] <= 0.0) {
      node = left;
    } else {
      mass -= tree_[left];
      node = left + 1;
    }
  }
  return std::min(node - leaves_, size_ - 1);
}

void ReplayBuffer::add(Transition t) {
  data_[next_] = std::move(t);
  set_priority(next_, max_priority_);
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

double ReplayBuffer::probability(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("replay index out of range");
  return tree_[leaves_ + index] / tree_[1];
}

ReplaySample ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (size_ == 0) throw std::logic_error("sampling from an empty replay buffer");
  const Transition& first = data_[0];
  ReplaySample s;
  s.indices.resize(batch);
  const auto b = static_cast<Eigen::Index>(batch);
  s.obs.resize(b, first.obs.size());
  s.action.resize(b, first.action.size());
  s.reward.resize(b, 1);
  s.next_obs.resize(b, first.next_obs.size());
  s.done.resize(b, 1);
  s.weights.resize(b, 1);

  // Stratified draws: one uniform per equal-mass segment.
  const double total = tree_[1];
  const double segment = total / static_cast<double>(batch);
  double max_weight = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    const double mass = segment * (static_cast<double>(i) + rng.uniform());
    const std::size_t idx = find(std::min(mass, total * (1.0 - 1e-12)));
    s.indices[i] = idx;
    const auto r = static_cast<Eigen::Index>(i);
    const Transition& t = data_[idx];
    s.obs.row(r) = t.obs;
    s.action.row(r) = t.action;
    s.reward(r, 0) = t.reward;
    s.next_obs.row(r) = t.next_obs;
    s.done(r, 0) = t.done ? 1.0 : 0.0;
    const double p = tree_[leaves_ + idx] / total;
    const double w = std::pow(static_cast<double>(size_) * p, -beta_);
    s.weights(r, 0) = w;
    max_weight = std::max(max_weight, w);
  }
  if (max_weight > 0.0) s.weights /= max_weight;
  return s;
}

void ReplayBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                     const nn::Matrix& td_errors) {
  if (static_cast<Eigen::Index>(indices.size()) != td_errors.rows())
    throw std::invalid_argument("priority update: index/error count mismatch");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double p = std::abs(td_errors(static_cast<Eigen::Index>(i), 0)) + epsilon_;
    if (!std::isfinite(p)) continue;
    max_priority_ = std::max(max_priority_, p);
    set_priority(indices[i], p);
  }
}

}  // namespace masc
