#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "masc/rng.hpp"

namespace masc::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A trainable tensor and its accumulated gradient.
struct Parameter {
  Matrix value;
  Matrix grad;

  explicit Parameter(Matrix v = {}) : value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}
  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; only valid while the tape lives
// and has not been cleared.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  const Matrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;
  Tape* tape() const { return tape_; }
  int id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Records matrix-valued operations in creation order. Since every node only
// refers to earlier nodes, creation order is a topological order and the
// backward pass is a single reverse sweep.
class Tape {
 public:
  using Backprop = std::function<void(Tape&, int self)>;

  Var constant(Matrix value);
  // Differentiable input not tied to a Parameter (gradients readable via Var::grad).
  Var variable(Matrix value);
  // Node whose gradient is added into p.grad by backward().
  Var parameter(Parameter& p);

  // Internal: used by the operation library.
  Var record(Matrix value, std::vector<int> inputs, Backprop backprop);

  // Reverse sweep from a 1x1 loss. Throws ShapeError for non-scalar losses.
  void backward(const Var& loss);

  void clear();
  std::size_t size() const { return nodes_.size(); }
  // Number of nodes whose backprop ran during the last backward().
  std::size_t last_backward_visits() const { return last_visits_; }

  const Matrix& value(int id) const { return nodes_[id].value; }
  const Matrix& grad(int id) const { return nodes_[id].grad; }
  Matrix& grad_ref(int id);
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<int> inputs;
    Backprop backprop;
    Parameter* bound = nullptr;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  std::size_t last_visits_ = 0;
};

// ---- differentiable operations -------------------------------------------

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // elementwise
Var neg(const Var& a);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
// Adds a 1xN row to every row of a BxN matrix.
Var add_row(const Var& a, const Var& row);
// Multiplies every row of a BxN matrix elementwise by a 1xN row.
Var mul_row(const Var& a, const Var& row);
// Multiplies column j of a BxN matrix by entry j of a Bx1 column, for all j.
Var mul_col(const Var& a, const Var& column);
Var tanh(const Var& a);
Var relu(const Var& a);
Var exp(const Var& a);
Var log(const Var& a);
Var softplus(const Var& a);
Var square(const Var& a);
Var minimum(const Var& a, const Var& b);
Var clamp(const Var& a, double lo, double hi);
Var sum(const Var& a);       // -> 1x1
Var mean(const Var& a);      // -> 1x1
Var row_sum(const Var& a);   // BxN -> Bx1
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);
Var concat_cols(const Var& a, const Var& b);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }
inline Var operator-(const Var& a) { return neg(a); }

// ---- networks ------------------------------------------------------------

enum class Activation { Tanh, Relu, Identity };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

// Fully connected network: hidden layers use `hidden`, the output layer is
// affine. Inputs are batches laid out one sample per row.
class Mlp {
 public:
  Mlp() = default;
  // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Mlp(std::vector<int> widths, Activation hidden, Rng& rng);
  // All parameters zero.
  Mlp(std::vector<int> widths, Activation hidden);

  Matrix forward(const Matrix& input) const;
  RowVector forward_row(const RowVector& input) const;
  Var forward(Tape& tape, const Var& input);

  int input_size() const { return widths_.front(); }
  int output_size() const { return widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return hidden_; }
  std::size_t layer_count() const { return weights_.size(); }

  Parameter& weight(std::size_t layer) { return weights_[layer]; }
  Parameter& bias(std::size_t layer) { return biases_[layer]; }
  const Parameter& weight(std::size_t layer) const { return weights_[layer]; }
  const Parameter& bias(std::size_t layer) const { return biases_[layer]; }

  std::vector<Parameter*> parameters();
  std::size_t parameter_count() const;
  void zero_grad();

  // this <- tau * source + (1 - tau) * this
  void soft_update_from(const Mlp& source, double tau);
  double distance_to(const Mlp& other) const;
  bool all_finite() const;

  // Text checkpoint, format "masc-mlp 1": widths, activation, then every
  // layer's weight (in x out, row-major) followed by its bias.
  void save(std::ostream& out) const;
  static Mlp load(std::istream& in);

 private:
  void check_input(Eigen::Index cols) const;

  std::vector<int> widths_;
  Activation hidden_ = Activation::Tanh;
  std::vector<Parameter> weights_;
  std::vector<Parameter> biases_;
};

// ---- optimizer -----------------------------------------------------------

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Parameter*> params, AdamOptions options);

  // One update from the gradients stored in the parameters.
  void step();
  // Same update with explicit gradients, one per parameter.
  void step(const std::vector<Matrix>& grads);
  void zero_grad();

  std::int64_t step_count() const { return steps_; }
  const AdamOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
  AdamOptions options_;
  std::int64_t steps_ = 0;
};

}  // namespace masc::nn
