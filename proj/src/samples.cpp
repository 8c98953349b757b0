#include "netclass/samples.hpp"

#include "netclass/network.hpp"

namespace netclass {

void PosteriorSamples::validate() const {
  if (node_count < 1) throw ValidationError("samples: node count must be >= 1");
  if (max_rank < 1) throw ValidationError("samples: max rank must be >= 1");
  const int total = total_draws();
  if (total < 1) throw ValidationError("samples: at least one draw required");
  if (chains < 1 || draws_per_chain < 1 || chains * draws_per_chain != total) {
    throw ValidationError("samples: chain layout disagrees with draw count");
  }
  const int q = edge_count(node_count);
  if (edge_coef.rows() != total || edge_coef.cols() != q) {
    throw ValidationError("samples: edge coefficient block is " +
                          std::to_string(edge_coef.rows()) + "x" +
                          std::to_string(edge_coef.cols()) + ", expected " +
                          std::to_string(total) + "x" + std::to_string(q));
  }
  if (node_active.rows() != total || node_active.cols() != node_count) {
    throw ValidationError("samples: node indicator block has wrong shape");
  }
  if (rank_active.rows() != total || rank_active.cols() != max_rank) {
    throw ValidationError("samples: rank indicator block has wrong shape");
  }
}

}  // namespace netclass
