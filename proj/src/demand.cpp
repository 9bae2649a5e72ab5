#include "masc/demand.hpp"

#include <cmath>
#include <numeric>

namespace masc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const DemandModel& model) {
  std::visit(overloaded{
                 [](const HighPoisson& m) {
                   if (!(m.mean > 0.0) || m.mean > 500.0)
                     throw DemandError("poisson mean must be in (0, 500]");
                 },
                 [](const LowNormal& m) {
                   if (!(m.mean > 0.0)) throw DemandError("normal mean must be > 0");
                   if (!(m.stddev > 0.0)) throw DemandError("normal stddev must be > 0");
                 },
                 [](const Scripted& m) {
                   for (double v : m.values)
                     if (!(v >= 0.0) || !std::isfinite(v))
                       throw DemandError("scripted demand values must be finite and >= 0");
                 },
             },
             model);
}

std::string demand_regime_name(const DemandModel& model) {
  return std::visit(overloaded{
                        [](const HighPoisson&) { return std::string("high"); },
                        [](const LowNormal&) { return std::string("low"); },
                        [](const Scripted&) { return std::string("scripted"); },
                    },
                    model);
}

double nominal_mean(const DemandModel& model) {
  return std::visit(overloaded{
                        [](const HighPoisson& m) { return m.mean; },
                        [](const LowNormal& m) { return m.mean; },
                        [](const Scripted& m) {
                          if (m.values.empty()) return 0.0;
                          return std::accumulate(m.values.begin(), m.values.end(), 0.0) /
                                 static_cast<double>(m.values.size());
                        },
                    },
                    model);
}

double sample_poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  double product = rng.uniform();
  int count = 0;
  while (product > limit) {
    product *= rng.uniform();
    ++count;
  }
  return static_cast<double>(count);
}

double sample_low_normal(Rng& rng, double mean, double stddev) {
  const double x = rng.normal(mean, stddev);
  return static_cast<double>(std::lround(std::max(x, 0.0)));
}

DemandSampler::DemandSampler(DemandModel model, std::uint64_t seed)
    : model_(std::move(model)), seed_(seed), rng_(seed) {
  validate(model_);
}

double DemandSampler::sample() {
  return std::visit(overloaded{
                        [this](const HighPoisson& m) { return sample_poisson(rng_, m.mean); },
                        [this](const LowNormal& m) {
                          return sample_low_normal(rng_, m.mean, m.stddev);
                        },
                        [this](const Scripted& m) {
                          if (cursor_ >= m.values.size())
                            throw DemandError("scripted demand exhausted after " +
                                              std::to_string(m.values.size()) + " values");
                          return m.values[cursor_++];
                        },
                    },
                    model_);
}

DemandSampler DemandSampler::fork(std::uint64_t stream) const {
  return DemandSampler(model_, derive_seed(seed_, stream));
}

}  // namespace masc
