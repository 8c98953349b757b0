#include "netclass/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "netclass/rng.hpp"

namespace netclass {

Classification classify(const PosteriorSamples& samples,
                        const AdjacencyMatrix& network) {
  samples.validate();
  if (network.node_count() != samples.node_count) {
    throw ValidationError("classify: network has V=" +
                          std::to_string(network.node_count()) +
                          " but samples have V=" +
                          std::to_string(samples.node_count));
  }
  const Vector x = vectorize_upper(network).values;
  const int total = samples.total_draws();
  double acc = 0.0;
  for (int l = 0; l < total; ++l) {
    acc += logistic(samples.intercept[l] + samples.edge_coef.row(l).dot(x));
  }
  Classification out;
  out.probability = acc / total;
  out.label = out.probability > 0.5 ? 1 : 0;
  return out;
}

NodeSelection select_nodes(const PosteriorSamples& samples) {
  samples.validate();
  NodeSelection out;
  out.probabilities =
      samples.node_active.cast<double>().colwise().mean().transpose();
  for (int k = 0; k < samples.node_count; ++k) {
    if (out.probabilities[k] > 0.5) out.selected.push_back(k);
  }
  return out;
}

EdgeSelection select_edges_fdr(const PosteriorSamples& samples,
                               double effect_threshold, double fdr_level) {
  samples.validate();
  if (!(effect_threshold > 0.0)) {
    throw ValidationError("edge selection: effect threshold must be positive");
  }
  if (!(fdr_level > 0.0) || !(fdr_level < 1.0)) {
    throw ValidationError("edge selection: FDR level must lie in (0, 1)");
  }
  const int q = samples.edge_dim();
  const int total = samples.total_draws();
  EdgeSelection out;
  out.effect_threshold = effect_threshold;
  out.fdr_level = fdr_level;
  out.exceedance = Vector::Zero(q);
  for (int l = 0; l < total; ++l) {
    for (int j = 0; j < q; ++j) {
      if (std::abs(samples.edge_coef(l, j)) > effect_threshold) {
        out.exceedance[j] += 1.0;
      }
    }
  }
  out.exceedance /= total;

  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out.exceedance[a] > out.exceedance[b];
  });

  double null_mass = 0.0;
  double best_bound = 0.0;
  int best_len = 0;
  for (int len = 1; len <= q; ++len) {
    null_mass += 1.0 - out.exceedance[order[len - 1]];
    const double bound = null_mass / len;
    if (bound <= fdr_level) {
      best_len = len;
      best_bound = bound;
    }
  }
  out.selected.assign(order.begin(), order.begin() + best_len);
  out.achieved_fdr = best_bound;
  return out;
}

EffectiveDimensionality effective_dimensionality(
    const PosteriorSamples& samples) {
  samples.validate();
  const int total = samples.total_draws();
  const int r = samples.max_rank;
  EffectiveDimensionality out;
  out.distribution = Vector::Zero(r + 1);
  for (int l = 0; l < total; ++l) {
    int active = 0;
    for (int j = 0; j < r; ++j) active += samples.rank_active(l, j);
    out.distribution[active] += 1.0;
  }
  out.distribution /= total;
  out.distribution.maxCoeff(&out.mode);
  for (int value = 0; value <= r; ++value) {
    out.mean += value * out.distribution[value];
  }
  return out;
}

CoefficientSummary summarize_coefficients(const PosteriorSamples& samples,
                                          double level) {
  samples.validate();
  if (!(level > 0.0) || !(level < 1.0)) {
    throw ValidationError("coefficient summary: level must lie in (0, 1)");
  }
  const int q = samples.edge_dim();
  const int total = samples.total_draws();
  CoefficientSummary out;
  out.level = level;
  out.mean = samples.edge_coef.colwise().mean().transpose();
  out.lower.resize(q);
  out.upper.resize(q);
  const double tail = (1.0 - level) / 2.0;
  std::vector<double> column(total);
  for (int j = 0; j < q; ++j) {
    for (int l = 0; l < total; ++l) column[l] = samples.edge_coef(l, j);
    std::sort(column.begin(), column.end());
    // order-statistic quantiles: ceil(p*L)-th smallest, clamped
    const auto pick = [&](double p) {
      int idx = static_cast<int>(std::ceil(p * total)) - 1;
      idx = std::min(total - 1, std::max(0, idx));
      return column[idx];
    };
    out.lower[j] = pick(tail);
    out.upper[j] = pick(1.0 - tail);
  }
  return out;
}

Vector autocorrelations(const Vector& chain, int max_lag) {
  const int len = static_cast<int>(chain.size());
  if (len < 2) throw ValidationError("autocorrelation: chain too short");
  max_lag = std::min(max_lag, len - 1);
  const double mean = chain.mean();
  const Vector centered = chain.array() - mean;
  const double denom = centered.squaredNorm();
  Vector acf(max_lag + 1);
  if (denom == 0.0) {
    acf.setZero();
    acf[0] = 1.0;
    return acf;
  }
  for (int lag = 0; lag <= max_lag; ++lag) {
    acf[lag] =
        centered.head(len - lag).dot(centered.tail(len - lag)) / denom;
  }
  return acf;
}

double effective_sample_size(const Vector& chain) {
  const int len = static_cast<int>(chain.size());
  if (len < 4) throw ValidationError("ess: chain too short (need >= 4)");
  if (chain.maxCoeff() == chain.minCoeff()) return static_cast<double>(len);
  const Vector acf = autocorrelations(chain, len - 1);
  // Geyer initial monotone positive sequence: tau = 2 * sum of paired
  // autocorrelations Gamma_m = rho_{2m} + rho_{2m+1}, minus 1, truncated
  // at the first nonpositive pair and forced nonincreasing.
  double tau = -1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (int m = 0; 2 * m + 1 < acf.size(); ++m) {
    double pair = acf[2 * m] + acf[2 * m + 1];
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  tau = std::max(tau, 1e-8);
  return len / tau;
}

double potential_scale_reduction(const std::vector<Vector>& chains) {
  std::vector<Vector> segments;
  if (chains.empty()) throw ValidationError("rhat: no chains");
  if (chains.size() == 1) {
    const Vector& chain = chains.front();
    const int half = static_cast<int>(chain.size()) / 2;
    if (half < 2) throw ValidationError("rhat: chain too short to split");
    segments.push_back(chain.head(half));
    segments.push_back(chain.tail(half));
  } else {
    segments = chains;
  }
  const int m = static_cast<int>(segments.size());
  const int len = static_cast<int>(segments.front().size());
  for (const auto& seg : segments) {
    if (seg.size() != len) throw ValidationError("rhat: unequal chain lengths");
    if (len < 2) throw ValidationError("rhat: chains too short");
  }
  double grand = 0.0;
  std::vector<double> means(m);
  for (int j = 0; j < m; ++j) {
    means[j] = segments[j].mean();
    grand += means[j];
  }
  grand /= m;
  double between = 0.0;
  double within = 0.0;
  for (int j = 0; j < m; ++j) {
    between += (means[j] - grand) * (means[j] - grand);
    within += (segments[j].array() - means[j]).square().sum() / (len - 1);
  }
  between *= static_cast<double>(len) / (m - 1);
  within /= m;
  if (within == 0.0) return 1.0;
  return std::sqrt((within + between / len) / within);
}

std::vector<ScalarDiagnostic> diagnostics(const PosteriorSamples& samples,
                                          int gamma_subset,
                                          std::uint64_t subset_seed) {
  samples.validate();
  const int per_chain = samples.draws_per_chain;
  if (per_chain < 4) {
    throw ValidationError("diagnostics: chains too short (need >= 4 draws)");
  }
  const int total = samples.total_draws();

  struct Summary {
    std::string name;
    Vector values;  // length = total draws, stacked by chain
  };
  std::vector<Summary> summaries;
  summaries.push_back({"intercept", samples.intercept});
  Vector mean_active(total);
  Vector rank_count(total);
  for (int l = 0; l < total; ++l) {
    double acc = 0.0;
    for (int k = 0; k < samples.node_count; ++k) acc += samples.node_active(l, k);
    mean_active[l] = acc / samples.node_count;
    double ranks = 0.0;
    for (int r = 0; r < samples.max_rank; ++r) ranks += samples.rank_active(l, r);
    rank_count[l] = ranks;
  }
  summaries.push_back({"mean_node_active", mean_active});
  summaries.push_back({"active_rank_count", rank_count});

  RngStream rng(subset_seed, 0x9d1a6);
  const int q = samples.edge_dim();
  const int subset = std::min(gamma_subset, q);
  std::set<int> picked;
  while (static_cast<int>(picked.size()) < subset) {
    picked.insert(static_cast<int>(rng.next_u64() % q));
  }
  for (int j : picked) {
    summaries.push_back({"edge_coef_" + edge_label(samples.node_count, j),
                         samples.edge_coef.col(j)});
  }

  std::vector<ScalarDiagnostic> out;
  for (const auto& summary : summaries) {
    ScalarDiagnostic diag;
    diag.name = summary.name;
    diag.mean = summary.values.mean();
    double ess = 0.0;
    std::vector<Vector> chains;
    for (int chain = 0; chain < samples.chains; ++chain) {
      const Vector segment = summary.values.segment(chain * per_chain, per_chain);
      ess += effective_sample_size(segment);
      chains.push_back(segment);
    }
    diag.ess = ess;
    const Vector acf = autocorrelations(chains.front(), 1);
    diag.lag1_autocorr = acf[1];
    diag.rhat = potential_scale_reduction(chains);
    out.push_back(std::move(diag));
  }
  return out;
}

InferenceReport build_inference_report(const PosteriorSamples& samples,
                                       double edge_threshold, double fdr_level,
                                       double interval_level) {
  InferenceReport report;
  report.nodes = select_nodes(samples);
  report.edges = select_edges_fdr(samples, edge_threshold, fdr_level);
  report.reff = effective_dimensionality(samples);
  report.coefficients = summarize_coefficients(samples, interval_level);
  report.class_threshold = 0.5;
  return report;
}

}  // namespace netclass
