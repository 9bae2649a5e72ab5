#pragma once

#include <functional>

#include "masc/demand.hpp"
#include "masc/env.hpp"

namespace masc {

// Everything needed to instantiate one supply-chain environment.
struct EnvSpec {
  ChainParams params;
  EnvOptions options;
  DemandModel demand = LowNormal{};
  // p_0, the factory price observed before the first step.
  double initial_price = 3.0;
};

// Decision rule for the whole chain: trained agents, heuristics and scripts
// all reduce to this.
using Controller = std::function<JointAction(const ChainState&)>;

}  // namespace masc
