#include "netclass/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "netclass/posterior.hpp"
#include "netclass/util.hpp"

namespace netclass {

double coefficient_mse(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size()) {
    throw ValidationError("mse: vectors have lengths " +
                          std::to_string(estimate.size()) + " and " +
                          std::to_string(truth.size()));
  }
  if (estimate.size() == 0) return 0.0;
  return (estimate - truth).squaredNorm() / estimate.size();
}

SelectionRates selection_rates(const std::vector<int>& selected,
                               const std::vector<int>& truth,
                               int universe_size) {
  const std::set<int> truth_set(truth.begin(), truth.end());
  int hits = 0;
  int misses = 0;
  for (int item : selected) {
    if (truth_set.count(item)) {
      ++hits;
    } else {
      ++misses;
    }
  }
  SelectionRates rates;
  rates.tpr = truth_set.empty()
                  ? 1.0
                  : static_cast<double>(hits) / static_cast<double>(truth_set.size());
  const int nulls = universe_size - static_cast<int>(truth_set.size());
  rates.fpr = nulls <= 0 ? 0.0 : static_cast<double>(misses) / nulls;
  return rates;
}

RocResult roc_auc(const Vector& scores, const std::vector<int>& labels) {
  const int n = static_cast<int>(scores.size());
  if (n != static_cast<int>(labels.size())) {
    throw ValidationError("roc: score and label counts differ");
  }
  int positives = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) throw ValidationError("roc: labels must be binary");
    positives += label;
  }
  const int negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw ValidationError("roc: need at least one positive and one negative label");
  }

  // rank-based Mann-Whitney with average ranks for ties
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * (i + j) + 1.0;  // 1-based average rank
    for (int t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }
  double rank_sum = 0.0;
  for (int idx = 0; idx < n; ++idx) {
    if (labels[idx] == 1) rank_sum += rank[idx];
  }
  RocResult out;
  out.auc = (rank_sum - 0.5 * positives * (positives + 1.0)) /
            (static_cast<double>(positives) * negatives);

  // sweep thresholds from high to low over distinct scores
  std::vector<int> desc(order.rbegin(), order.rend());
  out.curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  int tp = 0;
  int fp = 0;
  int at = 0;
  while (at < n) {
    const double threshold = scores[desc[at]];
    while (at < n && scores[desc[at]] == threshold) {
      if (labels[desc[at]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
      ++at;
    }
    out.curve.push_back({static_cast<double>(fp) / negatives,
                         static_cast<double>(tp) / positives, threshold});
  }
  return out;
}

namespace {

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds,
                                  std::uint64_t seed) {
  const int n = static_cast<int>(labels.size());
  std::vector<int> assignment(n, -1);
  RngStream rng(seed, 811);
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.next_u64() % (members.size() - i));
      std::swap(members[i], members[j]);
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      assignment[members[i]] = static_cast<int>(i) % folds;
    }
  }
  return assignment;
}

}  // namespace

CvResult kfold_cv(const NetworkDataset& data, const ShrinkagePrior& prior,
                  const McmcConfig& config, int folds) {
  data.validate();
  config.validate();
  const int n = data.size();
  if (folds < 2) throw ValidationError("cv: need at least 2 folds");
  if (folds > n) throw ValidationError("cv: more folds than subjects");

  CvResult out;
  out.fold_of = stratified_folds(data.labels, folds, config.seed);
  out.scores.resize(n);
  out.labels = data.labels;

  // validate training folds up front so a degenerate split fails fast
  for (int fold = 0; fold < folds; ++fold) {
    int train_pos = 0;
    int train_neg = 0;
    for (int i = 0; i < n; ++i) {
      if (out.fold_of[i] == fold) continue;
      (data.labels[i] == 1 ? train_pos : train_neg)++;
    }
    if (train_pos == 0 || train_neg == 0) {
      throw ValidationError("cv: training data for fold " +
                            std::to_string(fold + 1) +
                            " lost one of the classes");
    }
  }

  run_parallel(folds, [&](int fold) {
    NetworkDataset train;
    std::vector<int> held_out;
    for (int i = 0; i < n; ++i) {
      if (out.fold_of[i] == fold) {
        held_out.push_back(i);
      } else {
        train.networks.push_back(data.networks[i]);
        train.labels.push_back(data.labels[i]);
      }
    }
    McmcConfig fold_config = config;
    fold_config.seed = config.seed + 1000003ULL * (fold + 1);
    const PosteriorSamples samples = run_chain(train, prior, fold_config);
    for (int i : held_out) {
      out.scores[i] = classify(samples, data.networks[i]).probability;
    }
  });

  out.auc = roc_auc(out.scores, out.labels).auc;
  return out;
}

MetricsReport evaluate_fit(const PosteriorSamples& samples,
                           const GroundTruth& truth,
                           const std::vector<AdjacencyMatrix>& test_networks,
                           const std::vector<int>& test_labels,
                           double edge_threshold, double fdr_level) {
  MetricsReport report;
  const int v = samples.node_count;
  const int q = samples.edge_dim();

  const CoefficientSummary summary = summarize_coefficients(samples);
  report.mse = coefficient_mse(summary.mean, truth.coefficient_vector().values);

  const NodeSelection nodes = select_nodes(samples);
  const SelectionRates node_rates =
      selection_rates(nodes.selected, truth.active_nodes, v);
  report.node_tpr = node_rates.tpr;
  report.node_fpr = node_rates.fpr;

  const int active = static_cast<int>(truth.active_nodes.size());
  if (active > 0 && active < v) {
    std::vector<int> indicator(v, 0);
    for (int k : truth.active_nodes) indicator[k] = 1;
    report.node_separation_auc = roc_auc(nodes.probabilities, indicator).auc;
  } else {
    report.node_separation_auc = std::numeric_limits<double>::quiet_NaN();
  }

  const EdgeSelection edges = select_edges_fdr(samples, edge_threshold, fdr_level);
  const std::vector<int> true_edges = truth.nonzero_edges();
  const SelectionRates edge_rates = selection_rates(edges.selected, true_edges, q);
  report.edge_tpr = edge_rates.tpr;
  report.edge_fpr = edge_rates.fpr;
  if (!edges.selected.empty()) {
    const std::set<int> truth_set(true_edges.begin(), true_edges.end());
    int false_picks = 0;
    for (int e : edges.selected) {
      if (!truth_set.count(e)) ++false_picks;
    }
    report.edge_empirical_fdr =
        static_cast<double>(false_picks) / edges.selected.size();
  }

  const EffectiveDimensionality reff = effective_dimensionality(samples);
  report.reff_mode = reff.mode;
  report.reff_mean = reff.mean;

  if (!test_networks.empty()) {
    Vector scores(test_networks.size());
    for (std::size_t i = 0; i < test_networks.size(); ++i) {
      scores[i] = classify(samples, test_networks[i]).probability;
    }
    int positives = 0;
    for (int label : test_labels) positives += label;
    if (positives > 0 && positives < static_cast<int>(test_labels.size())) {
      const RocResult roc = roc_auc(scores, test_labels);
      report.auc = roc.auc;
      report.roc = roc.curve;
    } else {
      report.auc = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

namespace {

// Held-out subjects drawn from the same truth as the training data but
// from dedicated substreams.
void make_test_split(const SimConfig& config, const GroundTruth& truth,
                     int subjects, std::vector<AdjacencyMatrix>* networks,
                     std::vector<int>* labels) {
  SimConfig test_config = config;
  test_config.n_subjects = subjects;
  RngStream network_rng(config.seed, 202);
  RngStream response_rng(config.seed, 203);
  *networks = generate_networks(test_config, network_rng);
  *labels = generate_responses(*networks, truth, truth.mu0, response_rng);
}

}  // namespace

std::vector<ExperimentCell> experiment_table(
    const std::vector<std::string>& presets,
    const std::vector<std::string>& methods, const ExperimentOptions& options) {
  std::vector<ExperimentCell> cells(presets.size() * methods.size());
  run_parallel(static_cast<int>(cells.size()), [&](int index) {
    const std::size_t preset_idx = index / methods.size();
    const std::size_t method_idx = index % methods.size();
    ExperimentCell& cell = cells[index];
    cell.preset = presets[preset_idx];
    cell.method = methods[method_idx];
    try {
      SimConfig config = sim_preset(cell.preset);
      config.seed = options.data_seed + 7919ULL * preset_idx;
      const SimulatedData sim = generate_dataset(config);

      ShrinkagePrior prior;
      if (cell.method == "bnlc") {
        PriorSpecLasso spec;
        spec.max_rank = config.fitted_rank;
        prior = ShrinkagePrior::from(spec);
      } else if (cell.method == "bnhc") {
        PriorSpecHorseshoe spec;
        spec.max_rank = config.fitted_rank;
        prior = ShrinkagePrior::from(spec);
      } else {
        throw ValidationError("unknown method '" + cell.method + "'");
      }

      McmcConfig mcmc = options.mcmc;
      mcmc.seed = options.mcmc.seed + 104729ULL * (index + 1);

      const auto started = std::chrono::steady_clock::now();
      const PosteriorSamples samples = run_chain(sim.dataset, prior, mcmc);
      const auto finished = std::chrono::steady_clock::now();

      std::vector<AdjacencyMatrix> test_networks;
      std::vector<int> test_labels;
      if (options.test_subjects > 0) {
        make_test_split(config, sim.truth, options.test_subjects,
                        &test_networks, &test_labels);
      }
      cell.metrics =
          evaluate_fit(samples, sim.truth, test_networks, test_labels,
                       options.edge_threshold, options.fdr_level);
      cell.metrics.runtime_seconds =
          std::chrono::duration<double>(finished - started).count();
    } catch (const std::exception& err) {
      cell.failed = true;
      cell.error = err.what();
    }
  });
  return cells;
}

}  // namespace netclass
