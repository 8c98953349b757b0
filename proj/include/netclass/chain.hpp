#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "netclass/network.hpp"
#include "netclass/prior.hpp"
#include "netclass/rng.hpp"
#include "netclass/samples.hpp"

namespace netclass {

// One MCMC state. Lasso chains use global_rate; horseshoe chains use
// global_var plus the inverse-gamma augmentation variables. Invariants
// maintained by the sampler: node_active[k] == 0 exactly when row k of
// latent_pos is zero; all variance entries strictly positive; latent_cov
// symmetric positive-definite.
struct ChainState {
  double intercept = 0.0;               // mu
  Vector edge_coef;                     // gamma, length q
  Matrix latent_pos;                    // V x R, row k is the node position
  std::vector<std::uint8_t> node_active;  // xi, length V
  std::vector<std::uint8_t> rank_active;  // lambda, length R
  Vector rank_prob;                     // pi_r, length R
  Vector local_var;                     // s^2 per edge, length q
  double node_prob = 0.5;               // Delta
  Matrix latent_cov;                    // Q, R x R
  Vector pg_weight;                     // omega per subject, length n

  double global_rate = 1.0;             // theta^2 (lasso)

  double global_var = 1.0;              // sigma^2 (horseshoe)
  Vector local_aux;                     // nu per edge (horseshoe)
  double global_aux = 1.0;              // sigma_2 (horseshoe)

  int active_node_count() const;
  int active_rank_count() const;
};

// Spike-and-slab conditional for one node's latent position.
struct NodeConditional {
  double spike_prob = 0.0;  // posterior weight on u_k = 0
  Vector slab_mean;
  Matrix slab_precision;
};

// Gibbs sampler over the network logistic model with a global-local
// shrinkage prior on the edge coefficients. One instance can serve many
// chains; each chain owns a private ChainState and RngStream. The two
// prior families share every update except the scale steps and the few
// places the global variance enters.
class GibbsSampler {
 public:
  GibbsSampler(const NetworkDataset& data, const ShrinkagePrior& prior,
               double mu_prior_var = std::numeric_limits<double>::infinity());

  // Explicit node count, for datasets with zero subjects (prior sampling
  // and simulation-consistency checks). Must match the data when n > 0.
  GibbsSampler(int node_count, const NetworkDataset& data,
               const ShrinkagePrior& prior,
               double mu_prior_var = std::numeric_limits<double>::infinity());

  int num_subjects() const { return n_; }
  int node_count() const { return v_; }
  int edge_dim() const { return q_; }
  int max_rank() const { return prior_.max_rank; }
  const ShrinkagePrior& prior() const { return prior_; }
  const Matrix& design() const { return design_; }

  // Swaps in new labels over the same networks (used by the
  // simulation-consistency harness, which redraws data each step).
  void set_labels(const std::vector<int>& labels);

  // Warm start: a few iteratively reweighted ridge passes for the edge
  // coefficients, then the top positive eigenpairs of the implied
  // coefficient matrix seed the latent positions. Falls back to the flat
  // start when there is no data.
  ChainState initial_state(RngStream& rng) const;

  // The flat start: zero coefficients, all nodes active with small random
  // positions, unit scales.
  ChainState flat_initial_state(RngStream& rng) const;

  // Forward draw of a full state from the prior; requires a proper
  // (finite-variance) intercept prior.
  ChainState sample_prior_state(RngStream& rng) const;

  // Labels drawn from the likelihood at the current state.
  std::vector<int> draw_labels(const ChainState& state, RngStream& rng) const;

  // One full sweep in the fixed scan order: omega, mu, gamma, scales,
  // latent positions, node sparsity, latent covariance, rank indicators.
  void sweep(ChainState& state, RngStream& rng) const;

  void update_omega(ChainState& state, RngStream& rng) const;
  void update_mu(ChainState& state, RngStream& rng) const;
  void update_gamma(ChainState& state, RngStream& rng) const;
  // lasso scale steps: s^2 from its GIG conditional, theta^2 from Gamma
  void update_local_scales(ChainState& state, RngStream& rng) const;
  // horseshoe scale steps
  void update_local_scales_hs(ChainState& state, RngStream& rng) const;
  void update_global_scale_hs(ChainState& state, RngStream& rng) const;
  void update_latent_positions(ChainState& state, RngStream& rng) const;
  void update_node_sparsity(ChainState& state, RngStream& rng) const;
  void update_latent_cov(ChainState& state, RngStream& rng) const;
  void update_rank_indicators(ChainState& state, RngStream& rng) const;

  // Low-rank prior mean per edge: u_k' diag(lambda) u_l in edge order.
  Vector rank_means(const ChainState& state) const;
  // Effective prior variance per edge: s^2 (lasso) or sigma^2 s^2.
  Vector edge_variances(const ChainState& state) const;
  // mu + X gamma per subject.
  Vector linear_predictors(const ChainState& state) const;

  // Exposed pieces of the composite updates, for direct verification.
  NodeConditional node_conditional(int node, const ChainState& state) const;
  double rank_log_odds(int rank, const ChainState& state) const;

  // Unnormalized log joint density (priors + label likelihood).
  double log_joint(const ChainState& state) const;

  void check_state(const ChainState& state) const;

 private:
  Vector gamma_draw_dense(const ChainState& state, const Vector& prior_mean,
                          const Vector& prior_var, RngStream& rng) const;
  Vector gamma_draw_aux(const ChainState& state, const Vector& prior_mean,
                        const Vector& prior_var, RngStream& rng) const;

  Matrix design_;        // n x q
  Vector resp_shift_;    // y - 1/2
  std::vector<int> labels_;
  ShrinkagePrior prior_;
  double mu_prior_var_;
  int n_ = 0;
  int v_ = 1;
  int q_ = 0;
};

// Retained-draw extraction for one or more chains, merged in chain order.
// Deterministic given (seed, data, prior, config) regardless of the number
// of worker threads.
PosteriorSamples run_chain(const NetworkDataset& data,
                           const ShrinkagePrior& prior, const McmcConfig& config);
PosteriorSamples run_chain_bnlc(const NetworkDataset& data,
                                const PriorSpecLasso& prior,
                                const McmcConfig& config);
PosteriorSamples run_chain_bnhc(const NetworkDataset& data,
                                const PriorSpecHorseshoe& prior,
                                const McmcConfig& config);

}  // namespace netclass
