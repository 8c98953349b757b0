#pragma once

#include <cstdint>

#include "netclass/prior.hpp"
#include "netclass/types.hpp"

namespace netclass {

using ByteMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Thinned post-burn-in draws of everything inference needs. Draws from
// multiple chains are stacked in chain order (chain 0 first), each chain
// contributing draws_per_chain rows.
struct PosteriorSamples {
  int node_count = 1;
  int max_rank = 1;
  ShrinkagePrior prior;
  McmcConfig config;
  int chains = 1;
  int draws_per_chain = 0;

  Vector intercept;       // L
  Matrix edge_coef;       // L x q
  ByteMatrix node_active; // L x V
  ByteMatrix rank_active; // L x R

  int total_draws() const { return static_cast<int>(intercept.size()); }
  int edge_dim() const { return static_cast<int>(edge_coef.cols()); }

  void validate() const;
};

}  // namespace netclass
