#pragma once

#include <cmath>
#include <stdexcept>

#include "scenario.hpp"

namespace d2dnet {

// Densities of the mode-split point processes implied by an association probability.
// Half-duplex pairs share one channel, so only half of the HD users transmit at a time;
// full-duplex users transmit and receive simultaneously.
struct Densities {
  double assoc_probability = 0;  // fraction of users served by the cellular tier
  double lambda_c = 0;           // cellular-user density
  double lambda_d = 0;           // D2D-user density
  double lambda_hd_tx = 0;       // density of transmitting half-duplex D2D users
  double lambda_fd = 0;          // density of full-duplex D2D transceivers
};

inline Densities derive_densities(const Scenario& s, double assoc_probability) {
  if (!(assoc_probability >= 0 && assoc_probability <= 1))
    throw std::domain_error("association probability must lie in [0, 1]");
  Densities d;
  d.assoc_probability = assoc_probability;
  d.lambda_c = s.lambda_u * assoc_probability;
  d.lambda_d = s.lambda_u - d.lambda_c;
  d.lambda_hd_tx = 0.5 * d.lambda_d * (1.0 - s.p_fd);
  d.lambda_fd = d.lambda_d * s.p_fd;
  return d;
}

}  // namespace d2dnet
