#include <cmath>

#include "masc/nn.hpp"

namespace masc::nn {

Adam::Adam(std::vector<Parameter*> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (Parameter* p : params_) {
    first_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    second_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step() {
  std::vector<Matrix> grads;
  grads.reserve(params_.size());
  for (Parameter* p : params_) grads.push_back(p->grad);
  step(grads);
}

void Adam::step(const std::vector<Matrix>& grads) {
  if (grads.size() != params_.size())
    throw ShapeError("Adam: got " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params_.size()) + " parameters");
  for (std::size_t i = 0; i < params_.size(); ++i)
    if (grads[i].rows() != params_[i]->value.rows() || grads[i].cols() != params_[i]->value.cols())
      throw ShapeError("Adam: gradient " + std::to_string(i) + " has the wrong shape");

  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    first_[i] = b1 * first_[i] + (1.0 - b1) * grads[i];
    second_[i] = b2 * second_[i] + (1.0 - b2) * grads[i].cwiseAbs2();
    params_[i]->value.array() -= options_.learning_rate * (first_[i].array() / c1) /
                                 ((second_[i].array() / c2).sqrt() + options_.epsilon);
  }
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

}  // namespace masc::nn
