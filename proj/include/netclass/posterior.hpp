#pragma once

#include <vector>

#include "netclass/network.hpp"
#include "netclass/samples.hpp"

namespace netclass {

struct Classification {
  double probability = 0.0;  // posterior-averaged class-1 probability
  int label = 0;             // 1 iff probability > 0.5 (ties go to 0)
};

// Monte Carlo average of logistic(mu + <M, G>) over the retained draws.
Classification classify(const PosteriorSamples& samples,
                        const AdjacencyMatrix& network);

struct NodeSelection {
  Vector probabilities;        // per-node posterior inclusion frequency
  std::vector<int> selected;   // 0-based nodes with probability > 0.5
};

NodeSelection select_nodes(const PosteriorSamples& samples);

struct EdgeSelection {
  Vector exceedance;           // d_j = P(|gamma_j| > t | data), per edge
  std::vector<int> selected;   // 0-based edges, ordered by exceedance
  double achieved_fdr = 0.0;   // mean of (1 - d) over the selection
  double effect_threshold = 0.05;
  double fdr_level = 0.05;
};

// Bayesian FDR rule on exceedance probabilities: sort edges by d
// descending, keep the largest prefix whose average posterior null
// probability (1 - d) stays within the level.
EdgeSelection select_edges_fdr(const PosteriorSamples& samples,
                               double effect_threshold, double fdr_level);

struct EffectiveDimensionality {
  Vector distribution;  // P(R_eff = r | data) for r = 0..R
  int mode = 0;
  double mean = 0.0;
};

EffectiveDimensionality effective_dimensionality(const PosteriorSamples& samples);

struct CoefficientSummary {
  Vector mean;   // posterior mean per edge
  Vector lower;  // equal-tailed interval bounds
  Vector upper;
  double level = 0.95;
};

CoefficientSummary summarize_coefficients(const PosteriorSamples& samples,
                                          double level = 0.95);

// Effective sample size by the initial monotone positive sequence
// estimator. Chains shorter than 4 are rejected.
double effective_sample_size(const Vector& chain);

Vector autocorrelations(const Vector& chain, int max_lag);

// Potential scale reduction across chains. With several chains the
// statistic is computed across them directly; a single chain is split in
// half first. Identical chains give exactly 1.
double potential_scale_reduction(const std::vector<Vector>& chains);

struct ScalarDiagnostic {
  std::string name;
  double mean = 0.0;
  double ess = 0.0;
  double rhat = 1.0;  // 1.0 when only one chain and splitting is degenerate
  double lag1_autocorr = 0.0;
};

// Standard convergence summaries for the intercept, the mean node
// indicator, the active-rank count, and a fixed random subset of edge
// coefficients.
std::vector<ScalarDiagnostic> diagnostics(const PosteriorSamples& samples,
                                          int gamma_subset = 5,
                                          std::uint64_t subset_seed = 0);

// Everything the infer command reports, bundled.
struct InferenceReport {
  NodeSelection nodes;
  EdgeSelection edges;
  EffectiveDimensionality reff;
  CoefficientSummary coefficients;
  double class_threshold = 0.5;
};

InferenceReport build_inference_report(const PosteriorSamples& samples,
                                       double edge_threshold = 0.05,
                                       double fdr_level = 0.05,
                                       double interval_level = 0.95);

}  // namespace netclass
