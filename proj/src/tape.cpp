#include <cmath>

#include "masc/nn.hpp"

namespace masc::nn {

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ShapeError("Var::scalar on a non-1x1 node");
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, {}, nullptr, false});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::variable(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, {}, nullptr, true});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::parameter(Parameter& p) {
  nodes_.push_back(Node{p.value, {}, {}, {}, &p, true});
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::record(Matrix value, std::vector<int> inputs, Backprop backprop) {
  bool needs = false;
  for (int i : inputs) needs = needs || nodes_[i].requires_grad;
  Node node{std::move(value), {}, std::move(inputs), {}, nullptr, needs};
  if (needs) node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Tape::grad_ref(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(const Var& loss) {
  if (loss.tape() != this) throw std::invalid_argument("loss does not belong to this tape");
  const Matrix& lv = nodes_[loss.id()].value;
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ShapeError("backward needs a 1x1 loss, got " + std::to_string(lv.rows()) + "x" +
                     std::to_string(lv.cols()));
  for (Node& n : nodes_) n.grad.resize(0, 0);
  last_visits_ = 0;
  grad_ref(loss.id()).setOnes();
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    ++last_visits_;
    if (n.backprop) n.backprop(*this, id);
    if (n.bound) n.bound->grad += n.grad;
  }
}

void Tape::clear() {
  nodes_.clear();
  last_visits_ = 0;
}

namespace {

Tape& same_tape(const Var& a, const Var& b) {
  if (a.tape() == nullptr || a.tape() != b.tape())
    throw std::invalid_argument("operands live on different tapes");
  return *a.tape();
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
}

// Unary elementwise op with derivative expressed from input x and output y.
template <class F, class D>
Var unary(const Var& a, F f, D dfdx) {
  Tape& t = *a.tape();
  Matrix y = a.value().unaryExpr(f);
  const int ia = a.id();
  return t.record(std::move(y), {ia}, [ia, dfdx](Tape& tp, int self) {
    const Matrix& x = tp.value(ia);
    const Matrix& out = tp.value(self);
    Matrix local(x.rows(), x.cols());
    for (Eigen::Index k = 0; k < x.size(); ++k) local.data()[k] = dfdx(x.data()[k], out.data()[k]);
    if (tp.requires_grad(ia)) tp.grad_ref(ia).array() += tp.grad(self).array() * local.array();
  });
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  Matrix y = a.value() * b.value();
  const int ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_ref(ia).noalias() += g * tp.value(ib).transpose();
    if (tp.requires_grad(ib)) tp.grad_ref(ib).noalias() += tp.value(ia).transpose() * g;
  });
}

Var add(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, "add");
  Matrix y = a.value() + b.value();
  const int ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib](Tape& tp, int self) {
    if (tp.requires_grad(ia)) tp.grad_ref(ia) += tp.grad(self);
    if (tp.requires_grad(ib)) tp.grad_ref(ib) += tp.grad(self);
  });
}

Var sub(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, "sub");
  Matrix y = a.value() - b.value();
  const int ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib](Tape& tp, int self) {
    if (tp.requires_grad(ia)) tp.grad_ref(ia) += tp.grad(self);
    if (tp.requires_grad(ib)) tp.grad_ref(ib) -= tp.grad(self);
  });
}

Var mul(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, "mul");
  Matrix y = a.value().cwiseProduct(b.value());
  const int ia = a.id(), ib = b.id();
  return t.record(std::move(y), {ia, ib}, [ia, ib](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_ref(ia) += g.cwiseProduct(tp.value(ib));
    if (tp.requires_grad(ib)) tp.grad_ref(ib) += g.cwiseProduct(tp.value(ia));
  });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double s) {
  Tape& t = *a.tape();
  Matrix y = a.value() * s;
  const int ia = a.id();
  return t.record(std::move(y), {ia}, [ia, s](Tape& tp, int self) {
    tp.grad_ref(ia) += s * tp.grad(self);
  });
}

Var add_scalar(const Var& a, double s) {
  Tape& t = *a.tape();
  Matrix y = a.value().array() + s;
  const int ia = a.id();
  return t.record(std::move(y), {ia}, [ia](Tape& tp, int self) {
    tp.grad_ref(ia) += tp.grad(self);
  });
}

Var add_row(const Var& a, const Var& row) {
  Tape& t = same_tape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ShapeError("add_row: row must be 1x" + std::to_string(a.cols()));
  Matrix y = a.value().rowwise() + row.value().row(0);
  const int ia = a.id(), ir = row.id();
  return t.record(std::move(y), {ia, ir}, [ia, ir](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_ref(ia) += g;
    if (tp.requires_grad(ir)) tp.grad_ref(ir) += g.colwise().sum();
  });
}

Var mul_row(const Var& a, const Var& row) {
  Tape& t = same_tape(a, row);
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ShapeError("mul_row: row must be 1x" + std::to_string(a.cols()));
  Matrix y = a.value().array().rowwise() * row.value().row(0).array();
  const int ia = a.id(), ir = row.id();
  return t.record(std::move(y), {ia, ir}, [ia, ir](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia))
      tp.grad_ref(ia).array() += g.array().rowwise() * tp.value(ir).row(0).array();
    if (tp.requires_grad(ir)) tp.grad_ref(ir) += g.cwiseProduct(tp.value(ia)).colwise().sum();
  });
}

Var mul_col(const Var& a, const Var& column) {
  Tape& t = same_tape(a, column);
  if (column.cols() != 1 || column.rows() != a.rows())
    throw ShapeError("mul_col: column must be " + std::to_string(a.rows()) + "x1");
  Matrix y = a.value().array().colwise() * column.value().col(0).array();
  const int ia = a.id(), ic = column.id();
  return t.record(std::move(y), {ia, ic}, [ia, ic](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia))
      tp.grad_ref(ia).array() += g.array().colwise() * tp.value(ic).col(0).array();
    if (tp.requires_grad(ic)) tp.grad_ref(ic) += g.cwiseProduct(tp.value(ia)).rowwise().sum();
  });
}

Var tanh(const Var& a) {
  return unary(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(const Var& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var exp(const Var& a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary(
      a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var softplus(const Var& a) {
  return unary(
      a, [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
      [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Var square(const Var& a) {
  return unary(
      a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var clamp(const Var& a, double lo, double hi) {
  return unary(
      a, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var minimum(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require_same_shape(a, b, "minimum");
  Matrix y = a.value().cwiseMin(b.value());
  const int ia = a.id(), ib = b.id();
  // Ties route the gradient to the first operand.
  return t.record(std::move(y), {ia, ib}, [ia, ib](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    const Matrix& av = tp.value(ia);
    const Matrix& bv = tp.value(ib);
    const bool ga = tp.requires_grad(ia), gb = tp.requires_grad(ib);
    Matrix* da = ga ? &tp.grad_ref(ia) : nullptr;
    Matrix* db = gb ? &tp.grad_ref(ib) : nullptr;
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      if (av.data()[k] <= bv.data()[k]) {
        if (da) da->data()[k] += g.data()[k];
      } else if (db) {
        db->data()[k] += g.data()[k];
      }
    }
  });
}

Var sum(const Var& a) {
  Tape& t = *a.tape();
  Matrix y(1, 1);
  y(0, 0) = a.value().sum();
  const int ia = a.id();
  return t.record(std::move(y), {ia}, [ia](Tape& tp, int self) {
    tp.grad_ref(ia).array() += tp.grad(self)(0, 0);
  });
}

Var mean(const Var& a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeError("mean of an empty node");
  return scale(sum(a), 1.0 / n);
}

Var row_sum(const Var& a) {
  Tape& t = *a.tape();
  Matrix y = a.value().rowwise().sum();
  const int ia = a.id();
  return t.record(std::move(y), {ia}, [ia](Tape& tp, int self) {
    tp.grad_ref(ia).colwise() += tp.grad(self).col(0);
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  Tape& t = *a.tape();
  if (start < 0 || count < 0 || start + count > a.cols())
    throw ShapeError("slice_cols out of range");
  Matrix y = a.value().middleCols(start, count);
  const int ia = a.id();
  return t.record(std::move(y), {ia}, [ia, start, count](Tape& tp, int self) {
    tp.grad_ref(ia).middleCols(start, count) += tp.grad(self);
  });
}

Var concat_cols(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  if (a.rows() != b.rows()) throw ShapeError("concat_cols: row count mismatch");
  Matrix y(a.rows(), a.cols() + b.cols());
  y << a.value(), b.value();
  const int ia = a.id(), ib = b.id();
  const Eigen::Index ca = a.cols(), cb = b.cols();
  return t.record(std::move(y), {ia, ib}, [ia, ib, ca, cb](Tape& tp, int self) {
    const Matrix& g = tp.grad(self);
    if (tp.requires_grad(ia)) tp.grad_ref(ia) += g.leftCols(ca);
    if (tp.requires_grad(ib)) tp.grad_ref(ib) += g.rightCols(cb);
  });
}

}  // namespace masc::nn
