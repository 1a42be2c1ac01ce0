#pragma once

#include "dynamiqs/netsim/simulator.hpp"

namespace dynamiqs::testing {

// Default-tier lane shared across tests; key generation dominates setup.
inline const netsim::Deployment& shared_deployment() {
  static const netsim::Deployment dep = netsim::make_deployment(ring::RingParams::standard(), 2024, 8);
  return dep;
}

}  // namespace dynamiqs::testing
