#include "masc/agents/policy.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace masc {

using nn::Matrix;
using nn::RowVector;
using nn::Var;

double ActionSpace::to_env(int dim, double squashed) const {
  const ActionDim& d = dims.at(static_cast<std::size_t>(dim));
  const double s = std::clamp(squashed, -1.0, 1.0);
  double v = d.range.lo + 0.5 * (s + 1.0) * d.range.width();
  if (d.integer) v = std::round(v);
  return d.range.clamp(v);
}

std::vector<double> ActionSpace::to_env(const RowVector& squashed) const {
  if (squashed.size() != size()) throw nn::ShapeError("action width does not match the space");
  std::vector<double> out(dims.size());
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = to_env(i, squashed(i));
  return out;
}

double ActionSpace::log_scale() const {
  double s = 0.0;
  for (const ActionDim& d : dims) s += std::log(std::max(0.5 * d.range.width(), 1e-12));
  return s;
}

ActionSpace ActionSpace::homogeneous(const ChainParams& p) {
  return ActionSpace{{{p.retailer.order_range, true},
                      {p.factory.order_range, true},
                      {p.retailer.sales_price_range, false},
                      {p.factory.sales_price_range, false}}};
}

ActionSpace ActionSpace::echelon(const EchelonParams& p) {
  return ActionSpace{{{p.order_range, true}, {p.sales_price_range, false}}};
}

namespace {

double positive(double x) { return x > 0.0 ? x : 1.0; }

}  // namespace

RowVector observation_scale_homogeneous(const ChainParams& p) {
  const double c1 = positive(p.retailer.capacity), c2 = positive(p.factory.capacity);
  const double d1 = positive(p.retailer.order_range.hi), d2 = positive(p.factory.order_range.hi);
  RowVector s(13);
  s << c1, c2, c1, c2, c1, c2, d1, d2, d1, d2, d1, d2, positive(p.factory.sales_price_range.hi);
  return s;
}

RowVector observation_scale_echelon(const ChainParams& p, Echelon e) {
  const EchelonParams& ep = p[e];
  const double c = positive(ep.capacity);
  // Factory demand is the retailer's order; customer demand shares that scale.
  const double d = positive(p.retailer.order_range.hi);
  RowVector s(7);
  s << c, c, c, d, d, d, positive(p.factory.sales_price_range.hi);
  return s;
}

double log_tanh_jacobian(double u) {
  return 2.0 * (std::numbers::ln2 - u - std::log1p(std::exp(-2.0 * u)));
}

PolicyNet::PolicyNet(RowVector observation_scale, ActionSpace space, std::vector<int> hidden,
                     nn::Activation activation, LogStdMode mode, Rng& rng,
                     double initial_log_std)
    : scale_(std::move(observation_scale)), space_(std::move(space)), mode_(mode) {
  std::vector<int> widths;
  widths.push_back(static_cast<int>(scale_.size()));
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  const int heads = mode_ == LogStdMode::StateDependent ? 2 * space_.size() : space_.size();
  widths.push_back(heads);
  backbone_ = nn::Mlp(widths, activation, rng);
  // Small output layer so initial actions sit near the middle of the box.
  const std::size_t last = backbone_.layer_count() - 1;
  backbone_.weight(last).value *= 0.01;
  backbone_.bias(last).value.setZero();
  global_log_std_ = nn::Parameter(Matrix::Constant(1, space_.size(), initial_log_std));
}

RowVector PolicyNet::scale_observation(std::span<const double> observation) const {
  if (static_cast<Eigen::Index>(observation.size()) != scale_.size())
    throw nn::ShapeError("policy expects " + std::to_string(scale_.size()) +
                         " observation values, got " + std::to_string(observation.size()));
  RowVector x(scale_.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = observation[static_cast<std::size_t>(i)] / scale_(i);
  return x;
}

Matrix PolicyNet::scale_observations(const Matrix& raw) const {
  if (raw.cols() != scale_.size()) throw nn::ShapeError("observation batch width mismatch");
  return raw.array().rowwise() / scale_.array();
}

void PolicyNet::mean_log_std(const RowVector& scaled, RowVector& mean, RowVector& log_std) const {
  const RowVector out = backbone_.forward_row(scaled);
  const int a = space_.size();
  mean = out.head(a);
  if (mode_ == LogStdMode::StateDependent)
    log_std = out.segment(a, a);
  else
    log_std = global_log_std_.value.row(0);
  log_std = log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

PolicyNet::Sample PolicyNet::select_action(std::span<const double> observation, bool stochastic,
                                           Rng& rng) const {
  const RowVector scaled = scale_observation(observation);
  RowVector mean, log_std;
  mean_log_std(scaled, mean, log_std);
  Sample s;
  s.raw = mean;
  if (stochastic)
    for (Eigen::Index i = 0; i < s.raw.size(); ++i) s.raw(i) += std::exp(log_std(i)) * rng.normal();
  s.squashed = s.raw.array().tanh();
  s.action = space_.to_env(s.squashed);
  s.log_prob = log_prob(mean, log_std, s.raw);
  return s;
}

double PolicyNet::log_prob(const RowVector& mean, const RowVector& log_std,
                           const RowVector& raw) const {
  constexpr double half_log_two_pi = 0.91893853320467274178;
  double lp = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double z = (raw(i) - mean(i)) * std::exp(-log_std(i));
    lp += -0.5 * z * z - log_std(i) - half_log_two_pi - log_tanh_jacobian(raw(i));
  }
  return lp - space_.log_scale();
}

PolicyNet::Heads PolicyNet::heads(nn::Tape& tape, const Var& scaled_obs) {
  Var out = backbone_.forward(tape, scaled_obs);
  const int a = space_.size();
  Heads h;
  h.mean = nn::slice_cols(out, 0, a);
  if (mode_ == LogStdMode::StateDependent)
    h.log_std = nn::clamp(nn::slice_cols(out, a, a), kLogStdMin, kLogStdMax);
  else
    h.log_std = nn::clamp(tape.parameter(global_log_std_), kLogStdMin, kLogStdMax);
  return h;
}

Var PolicyNet::log_prob(nn::Tape& tape, const Heads& h, const Matrix& raw) {
  constexpr double half_log_two_pi = 0.91893853320467274178;
  const Eigen::Index batch = raw.rows();
  Var u = tape.constant(raw);
  Var log_std_b;
  if (h.log_std.rows() == 1 && batch != 1) {
    Var ones = tape.constant(Matrix::Ones(batch, raw.cols()));
    log_std_b = nn::mul_row(ones, h.log_std);
  } else {
    log_std_b = h.log_std;
  }
  Var z = nn::mul(nn::sub(u, h.mean), nn::exp(nn::neg(log_std_b)));
  Var per_dim = nn::sub(nn::scale(nn::square(z), -0.5), log_std_b);
  Matrix jac(raw.rows(), raw.cols());
  for (Eigen::Index k = 0; k < raw.size(); ++k) jac.data()[k] = log_tanh_jacobian(raw.data()[k]);
  const double constant = -half_log_two_pi * static_cast<double>(raw.cols());
  Var lp = nn::add_scalar(nn::row_sum(per_dim), constant - space_.log_scale());
  return nn::sub(lp, tape.constant(jac.rowwise().sum()));
}

PolicyNet::Reparameterized PolicyNet::rsample(nn::Tape& tape, const Heads& h, const Matrix& noise) {
  constexpr double half_log_two_pi = 0.91893853320467274178;
  if (h.mean.rows() != noise.rows() || h.mean.cols() != noise.cols())
    throw nn::ShapeError("rsample: noise shape does not match the mean head");
  Var eps = tape.constant(noise);
  Var raw = nn::add(h.mean, nn::mul(nn::exp(h.log_std), eps));
  Reparameterized r;
  r.squashed = nn::tanh(raw);
  // log(1 - tanh(u)^2) = 2 (ln 2 - u - softplus(-2u))
  Var jac = nn::scale(nn::add_scalar(nn::neg(nn::add(raw, nn::softplus(nn::scale(raw, -2.0)))),
                                     std::numbers::ln2),
                      2.0);
  const Matrix gauss = (-0.5 * noise.array().square() - half_log_two_pi).matrix().rowwise().sum();
  Var lp = nn::add(tape.constant(gauss), nn::neg(nn::row_sum(nn::add(h.log_std, jac))));
  r.log_prob = lp;
  return r;
}

std::vector<nn::Parameter*> PolicyNet::parameters() {
  auto params = backbone_.parameters();
  if (mode_ == LogStdMode::Global) params.push_back(&global_log_std_);
  return params;
}

bool PolicyNet::all_finite() const {
  return backbone_.all_finite() && global_log_std_.value.allFinite();
}

void PolicyNet::save(std::ostream& out) const {
  out << "masc-policy 1\n";
  out << "log_std_mode " << (mode_ == LogStdMode::StateDependent ? "state" : "global") << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "observation_scale";
  for (Eigen::Index i = 0; i < scale_.size(); ++i) out << ' ' << scale_(i);
  out << "\nactions " << space_.size() << '\n';
  for (const ActionDim& d : space_.dims)
    out << d.range.lo << ' ' << d.range.hi << ' ' << (d.integer ? 1 : 0) << '\n';
  out << "global_log_std";
  for (Eigen::Index i = 0; i < global_log_std_.value.size(); ++i)
    out << ' ' << global_log_std_.value(0, i);
  out << '\n';
  backbone_.save(out);
}

PolicyNet PolicyNet::load(std::istream& in) {
  std::string tag, key, mode;
  int version = 0;
  if (!(in >> tag >> version) || tag != "masc-policy" || version != 1)
    throw std::runtime_error("not a version-1 policy checkpoint");
  PolicyNet p;
  in >> key >> mode;
  if (key != "log_std_mode") throw std::runtime_error("policy checkpoint: expected log_std_mode");
  p.mode_ = mode == "state" ? LogStdMode::StateDependent : LogStdMode::Global;
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream ss(line);
  ss >> key;
  if (key != "observation_scale") throw std::runtime_error("policy checkpoint: expected observation_scale");
  std::vector<double> scale;
  for (double v; ss >> v;) scale.push_back(v);
  p.scale_ = Eigen::Map<RowVector>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  int n = 0;
  if (!(in >> key >> n) || key != "actions") throw std::runtime_error("policy checkpoint: expected actions");
  for (int i = 0; i < n; ++i) {
    ActionDim d;
    int integer = 0;
    in >> d.range.lo >> d.range.hi >> integer;
    d.integer = integer != 0;
    p.space_.dims.push_back(d);
  }
  in >> key;
  if (key != "global_log_std") throw std::runtime_error("policy checkpoint: expected global_log_std");
  Matrix ls(1, n);
  for (int i = 0; i < n; ++i) in >> ls(0, i);
  p.global_log_std_ = nn::Parameter(ls);
  if (!in) throw std::runtime_error("policy checkpoint truncated");
  p.backbone_ = nn::Mlp::load(in);
  return p;
}

}  // namespace masc
