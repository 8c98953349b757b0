#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netclass/network.hpp"
#include "netclass/rng.hpp"

namespace netclass {

// Synthetic-data scenario: independent-Gaussian edges (sim1) or a
// stochastic blockmodel with community structure (sim2).
enum class SimScenario { kSim1, kSim2 };

std::string to_string(SimScenario scenario);

struct SimConfig {
  SimScenario scenario = SimScenario::kSim1;
  int node_count = 25;
  int n_subjects = 250;
  int true_rank = 2;           // R_g, latent dimension of the generating u
  int fitted_rank = 2;         // R the model is meant to be fitted with
  double node_activity = 0.5;  // pi, probability a node is active
  double residual_fraction = 0.05;  // pi_2, fraction of extra edge effects
  int strategy = 1;  // residual values: 1 = N(1,0.1), 2 = N(0.5,0.1), 3 = 0.5
  double mu0 = 2.0;

  // blockmodel parameters (sim2 only)
  std::vector<int> community_sizes = {8, 9, 8};
  double within_mean = 0.5;
  double within_var = 1.0;
  // fraction of between-community pairs carrying a N(0,1) edge; the paper
  // fixes a count without stating it, this default keeps 10%
  double between_fraction = 0.1;

  std::uint64_t seed = 0;

  void validate() const;
};

// The named cases of the simulation study (sim1-case1 .. sim2-case4).
SimConfig sim_preset(const std::string& name);
std::vector<std::string> sim_preset_names();

// True coefficient structure: a low-rank part from latent node positions
// plus a sparse residual part, as matrices on the Gamma scale (the (k,l)
// entry contributes twice itself to the linear predictor).
struct GroundTruth {
  AdjacencyMatrix low_rank;   // (k,l) entry = u_k' u_l / 2
  AdjacencyMatrix residual;   // sparse extra effects
  AdjacencyMatrix combined;   // sum of the two
  Matrix u0;                  // V x R_g latent positions
  std::vector<int> active_nodes;           // 0-based, u_k != 0
  std::vector<int> active_residual_edges;  // 0-based edge indices
  double mu0 = 2.0;

  // True coefficients on the model's gamma scale (gamma = 2 Gamma).
  EdgeVector coefficient_vector() const;
  // Edges with a nonzero true coefficient.
  std::vector<int> nonzero_edges() const;
};

GroundTruth generate_coefficients(const SimConfig& config, RngStream& rng);

std::vector<AdjacencyMatrix> generate_networks(const SimConfig& config,
                                               RngStream& rng);

std::vector<int> generate_responses(const std::vector<AdjacencyMatrix>& networks,
                                    const GroundTruth& truth, double mu0,
                                    RngStream& rng);

// Full pipeline with fixed substreams per stage, so the same config and
// seed always reproduce the identical dataset and truth.
struct SimulatedData {
  NetworkDataset dataset;
  GroundTruth truth;
};

SimulatedData generate_dataset(const SimConfig& config);

}  // namespace netclass
