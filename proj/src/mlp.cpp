#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "masc/nn.hpp"

namespace masc::nn {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::Relu;
  if (name == "identity") return Activation::Identity;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

namespace {

void check_widths(const std::vector<int>& widths) {
  if (widths.size() < 2) throw ShapeError("an Mlp needs at least input and output widths");
  for (int w : widths)
    if (w <= 0) throw ShapeError("layer widths must be positive");
}

Matrix activate(const Matrix& x, Activation a) {
  switch (a) {
    case Activation::Tanh: return x.array().tanh();
    case Activation::Relu: return x.cwiseMax(0.0);
    case Activation::Identity: return x;
  }
  return x;
}

Var activate(const Var& x, Activation a) {
  switch (a) {
    case Activation::Tanh: return tanh(x);
    case Activation::Relu: return relu(x);
    case Activation::Identity: return x;
  }
  return x;
}

}  // namespace

Mlp::Mlp(std::vector<int> widths, Activation hidden, Rng& rng)
    : widths_(std::move(widths)), hidden_(hidden) {
  check_widths(widths_);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const int fan_in = widths_[l], fan_out = widths_[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix w(fan_in, fan_out);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = rng.uniform(-bound, bound);
    Matrix b(1, fan_out);
    for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = rng.uniform(-bound, bound);
    weights_.emplace_back(std::move(w));
    biases_.emplace_back(std::move(b));
  }
}

Mlp::Mlp(std::vector<int> widths, Activation hidden) : widths_(std::move(widths)), hidden_(hidden) {
  check_widths(widths_);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    weights_.emplace_back(Matrix::Zero(widths_[l], widths_[l + 1]));
    biases_.emplace_back(Matrix::Zero(1, widths_[l + 1]));
  }
}

void Mlp::check_input(Eigen::Index cols) const {
  if (widths_.empty()) throw ShapeError("forward on an empty Mlp");
  if (cols != widths_.front())
    throw ShapeError("Mlp expects " + std::to_string(widths_.front()) + " inputs, got " +
                     std::to_string(cols));
}

Matrix Mlp::forward(const Matrix& input) const {
  check_input(input.cols());
  Matrix h = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = h * weights_[l].value;
    z.rowwise() += biases_[l].value.row(0);
    h = (l + 1 < weights_.size()) ? activate(z, hidden_) : std::move(z);
  }
  return h;
}

RowVector Mlp::forward_row(const RowVector& input) const {
  Matrix in = input;
  return forward(in).row(0);
}

Var Mlp::forward(Tape& tape, const Var& input) {
  check_input(input.cols());
  Var h = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Var z = add_row(matmul(h, tape.parameter(weights_[l])), tape.parameter(biases_[l]));
    h = (l + 1 < weights_.size()) ? activate(z, hidden_) : z;
  }
  return h;
}

std::vector<Parameter*> Mlp::parameters() {
  std::vector<Parameter*> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
  return out;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    n += static_cast<std::size_t>(weights_[l].value.size() + biases_[l].value.size());
  return n;
}

void Mlp::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

void Mlp::soft_update_from(const Mlp& source, double tau) {
  if (source.widths_ != widths_) throw ShapeError("soft update between different architectures");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l].value = tau * source.weights_[l].value + (1.0 - tau) * weights_[l].value;
    biases_[l].value = tau * source.biases_[l].value + (1.0 - tau) * biases_[l].value;
  }
}

double Mlp::distance_to(const Mlp& other) const {
  if (other.widths_ != widths_) throw ShapeError("distance between different architectures");
  double sq = 0.0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    sq += (weights_[l].value - other.weights_[l].value).squaredNorm();
    sq += (biases_[l].value - other.biases_[l].value).squaredNorm();
  }
  return std::sqrt(sq);
}

bool Mlp::all_finite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l)
    if (!weights_[l].value.allFinite() || !biases_[l].value.allFinite()) return false;
  return true;
}

void Mlp::save(std::ostream& out) const {
  out << "masc-mlp 1\n";
  out << "widths";
  for (int w : widths_) out << ' ' << w;
  out << "\nactivation " << to_string(hidden_) << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  auto dump = [&out](const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
      out << '\n';
    }
  };
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    dump(weights_[l].value);
    dump(biases_[l].value);
  }
}

Mlp Mlp::load(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "masc-mlp")
    throw std::runtime_error("not an Mlp checkpoint");
  if (version != 1) throw std::runtime_error("unsupported Mlp checkpoint version " + std::to_string(version));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream ws(line);
  std::string key;
  ws >> key;
  if (key != "widths") throw std::runtime_error("checkpoint: expected widths");
  std::vector<int> widths;
  for (int w; ws >> w;) widths.push_back(w);
  std::string act;
  if (!(in >> key >> act) || key != "activation")
    throw std::runtime_error("checkpoint: expected activation");
  Mlp net(widths, parse_activation(act));
  for (auto* p : net.parameters())
    for (Eigen::Index k = 0; k < p->value.size(); ++k)
      if (!(in >> p->value.data()[k])) throw std::runtime_error("checkpoint truncated");
  return net;
}

}  // namespace masc::nn
