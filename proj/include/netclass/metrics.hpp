#pragma once

#include <string>
#include <vector>

#include "netclass/chain.hpp"
#include "netclass/network.hpp"
#include "netclass/simgen.hpp"

namespace netclass {

// Mean of squared element-wise differences over all edges.
double coefficient_mse(const Vector& estimate, const Vector& truth);

struct SelectionRates {
  double tpr = 0.0;
  double fpr = 0.0;
};

// TPR = |selected ∩ truth| / |truth| (vacuously 1 when truth is empty),
// FPR = |selected \ truth| / |universe \ truth| (0 when no nulls exist).
SelectionRates selection_rates(const std::vector<int>& selected,
                               const std::vector<int>& truth, int universe_size);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocResult {
  double auc = 0.5;
  std::vector<RocPoint> curve;  // from (0,0) to (1,1), monotone
};

// AUC as the Mann-Whitney statistic (ties count half), with the ROC curve
// swept over all score thresholds. Requires both classes present.
RocResult roc_auc(const Vector& scores, const std::vector<int>& labels);

struct CvResult {
  Vector scores;            // pooled out-of-fold class probabilities
  std::vector<int> labels;  // matching observed labels
  std::vector<int> fold_of; // fold assignment per subject
  double auc = 0.5;
};

// Stratified k-fold cross-validation: deterministic fold assignment given
// the config seed, one chain fit per fold, held-out subjects scored by the
// fold's posterior. Folds run concurrently.
CvResult kfold_cv(const NetworkDataset& data, const ShrinkagePrior& prior,
                  const McmcConfig& config, int folds);

struct MetricsReport {
  double mse = 0.0;
  double node_tpr = 0.0;
  double node_fpr = 0.0;
  double node_separation_auc = 0.0;  // active vs inactive node probabilities
  double edge_tpr = 0.0;
  double edge_fpr = 0.0;
  double edge_empirical_fdr = 0.0;
  double auc = 0.0;  // held-out classification AUC
  std::vector<RocPoint> roc;
  int reff_mode = 0;
  double reff_mean = 0.0;
  double runtime_seconds = 0.0;
};

// Everything evaluate needs, from a fitted posterior plus the truth and an
// optional held-out test set.
MetricsReport evaluate_fit(const PosteriorSamples& samples,
                           const GroundTruth& truth,
                           const std::vector<AdjacencyMatrix>& test_networks,
                           const std::vector<int>& test_labels,
                           double edge_threshold, double fdr_level);

struct ExperimentOptions {
  McmcConfig mcmc;
  double edge_threshold = 0.05;
  double fdr_level = 0.05;
  int test_subjects = 100;
  std::uint64_t data_seed = 1;
};

struct ExperimentCell {
  std::string preset;
  std::string method;
  bool failed = false;
  std::string error;
  MetricsReport metrics;
};

// The simulate -> fit -> infer -> evaluate grid over (preset, method)
// pairs. Methods within a row share the row's dataset. Cell failures are
// isolated; the grid continues.
std::vector<ExperimentCell> experiment_table(
    const std::vector<std::string>& presets,
    const std::vector<std::string>& methods, const ExperimentOptions& options);

}  // namespace netclass
