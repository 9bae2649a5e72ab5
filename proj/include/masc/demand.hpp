#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "masc/rng.hpp"

namespace masc {

// Customer demand models. HighPoisson and LowNormal are the two experiment
// regimes (Poisson mean 10, Normal(2, 1)); Scripted replays a fixed series.
struct HighPoisson {
  double mean = 10.0;
};

struct LowNormal {
  double mean = 2.0;
  double stddev = 1.0;
};

struct Scripted {
  std::vector<double> values;
};

using DemandModel = std::variant<HighPoisson, LowNormal, Scripted>;

class DemandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void validate(const DemandModel& model);

// Short name used in configs and reports: "high", "low" or "scripted".
std::string demand_regime_name(const DemandModel& model);

// Expected per-step demand of the model (for scripted: the series mean).
double nominal_mean(const DemandModel& model);

// Owns a model, its generator and (for scripted models) the replay cursor.
class DemandSampler {
 public:
  DemandSampler(DemandModel model, std::uint64_t seed);

  // One demand draw in units; always a nonnegative integer value.
  // Throws DemandError once a scripted series is exhausted.
  double sample();

  // Independent sampler over the same model, seeded from this one's seed and
  // `stream`. Scripted cursors restart at the beginning.
  DemandSampler fork(std::uint64_t stream) const;

  const DemandModel& model() const { return model_; }
  std::uint64_t seed() const { return seed_; }

 private:
  DemandModel model_;
  std::uint64_t seed_;
  Rng rng_;
  std::size_t cursor_ = 0;
};

// Knuth's product-of-uniforms Poisson sampler. Fine for the means used here
// (exp(-mean) must stay well above the smallest double).
double sample_poisson(Rng& rng, double mean);

// Normal draw censored at 0 and rounded to the nearest integer.
double sample_low_normal(Rng& rng, double mean, double stddev);

}  // namespace masc
