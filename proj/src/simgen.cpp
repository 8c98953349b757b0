#include "netclass/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace netclass {

std::string to_string(SimScenario scenario) {
  return scenario == SimScenario::kSim1 ? "sim1" : "sim2";
}

void SimConfig::validate() const {
  if (node_count < 1) throw ValidationError("sim: node count must be >= 1");
  if (n_subjects < 0) throw ValidationError("sim: subject count must be >= 0");
  if (true_rank < 1) throw ValidationError("sim: true rank must be >= 1");
  if (fitted_rank < 1) throw ValidationError("sim: fitted rank must be >= 1");
  if (node_activity < 0.0 || node_activity > 1.0) {
    throw ValidationError("sim: node activity must lie in [0, 1]");
  }
  if (residual_fraction < 0.0 || residual_fraction > 1.0) {
    throw ValidationError("sim: residual fraction must lie in [0, 1]");
  }
  if (strategy < 1 || strategy > 3) {
    throw ValidationError("sim: strategy must be 1, 2 or 3");
  }
  if (scenario == SimScenario::kSim2) {
    const int total =
        std::accumulate(community_sizes.begin(), community_sizes.end(), 0);
    if (total != node_count) {
      throw ValidationError("sim: community sizes sum to " +
                            std::to_string(total) + ", expected V=" +
                            std::to_string(node_count));
    }
    if (!(within_var > 0.0)) {
      throw ValidationError("sim: within-community variance must be positive");
    }
    if (between_fraction < 0.0 || between_fraction > 1.0) {
      throw ValidationError("sim: between fraction must lie in [0, 1]");
    }
  }
}

SimConfig sim_preset(const std::string& name) {
  SimConfig cfg;
  const auto set = [&cfg](SimScenario sc, int rg, int r, double node_sparsity,
                          double edge_sparsity, int strat) {
    cfg.scenario = sc;
    cfg.true_rank = rg;
    cfg.fitted_rank = r;
    cfg.node_activity = 1.0 - node_sparsity;
    cfg.residual_fraction = 1.0 - edge_sparsity;
    cfg.strategy = strat;
  };
  if (name == "sim1-case1") set(SimScenario::kSim1, 2, 2, 0.5, 0.95, 1);
  else if (name == "sim1-case2") set(SimScenario::kSim1, 3, 5, 0.6, 0.95, 1);
  else if (name == "sim1-case3") set(SimScenario::kSim1, 2, 5, 0.5, 0.90, 2);
  else if (name == "sim1-case4") set(SimScenario::kSim1, 2, 5, 0.4, 0.90, 3);
  else if (name == "sim2-case1") set(SimScenario::kSim2, 2, 2, 0.5, 0.95, 1);
  else if (name == "sim2-case2") set(SimScenario::kSim2, 2, 4, 0.5, 0.95, 1);
  else if (name == "sim2-case3") set(SimScenario::kSim2, 2, 3, 0.7, 0.95, 1);
  else if (name == "sim2-case4") set(SimScenario::kSim2, 2, 5, 0.4, 0.90, 3);
  else {
    throw ValidationError("unknown simulation preset '" + name + "'");
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> sim_preset_names() {
  return {"sim1-case1", "sim1-case2", "sim1-case3", "sim1-case4",
          "sim2-case1", "sim2-case2", "sim2-case3", "sim2-case4"};
}

EdgeVector GroundTruth::coefficient_vector() const {
  EdgeVector v = vectorize_upper(combined);
  v.values *= 2.0;
  return v;
}

std::vector<int> GroundTruth::nonzero_edges() const {
  const EdgeVector v = coefficient_vector();
  std::vector<int> out;
  for (int e = 0; e < v.values.size(); ++e) {
    if (v.values[e] != 0.0) out.push_back(e);
  }
  return out;
}

namespace {

// Sample `count` distinct values from 0..pool_size-1 (partial Fisher-Yates).
std::vector<int> sample_without_replacement(int pool_size, int count,
                                            RngStream& rng) {
  std::vector<int> pool(pool_size);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(rng.next_u64() % (pool_size - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<int> community_assignment(const SimConfig& cfg) {
  std::vector<int> community(cfg.node_count, 0);
  int node = 0;
  for (std::size_t c = 0; c < cfg.community_sizes.size(); ++c) {
    for (int i = 0; i < cfg.community_sizes[c]; ++i) community[node++] = static_cast<int>(c);
  }
  return community;
}

}  // namespace

GroundTruth generate_coefficients(const SimConfig& config, RngStream& rng) {
  config.validate();
  const int v = config.node_count;
  const int rg = config.true_rank;
  const int q = edge_count(v);

  GroundTruth truth;
  truth.mu0 = config.mu0;
  truth.u0 = Matrix::Zero(v, rg);
  for (int k = 0; k < v; ++k) {
    if (rng.bernoulli(config.node_activity)) {
      truth.active_nodes.push_back(k);
      for (int j = 0; j < rg; ++j) truth.u0(k, j) = rng.normal(0.5, 1.0);
    }
  }

  Matrix low_rank = Matrix::Zero(v, v);
  for (int k = 0; k < v; ++k) {
    for (int l = k + 1; l < v; ++l) {
      const double value = 0.5 * truth.u0.row(k).dot(truth.u0.row(l));
      low_rank(k, l) = value;
      low_rank(l, k) = value;
    }
  }

  const int residual_count =
      static_cast<int>(std::lround(config.residual_fraction * q));
  truth.active_residual_edges = sample_without_replacement(q, residual_count, rng);
  Matrix residual = Matrix::Zero(v, v);
  for (int e : truth.active_residual_edges) {
    double value = 0.0;
    switch (config.strategy) {
      case 1: value = rng.normal(1.0, std::sqrt(0.1)); break;
      case 2: value = rng.normal(0.5, std::sqrt(0.1)); break;
      case 3: value = 0.5; break;
    }
    const auto [k, l] = edge_nodes(v, e);
    residual(k, l) = value;
    residual(l, k) = value;
  }

  truth.low_rank = AdjacencyMatrix::from_dense(low_rank);
  truth.residual = AdjacencyMatrix::from_dense(residual);
  truth.combined = AdjacencyMatrix::from_dense(low_rank + residual);
  return truth;
}

std::vector<AdjacencyMatrix> generate_networks(const SimConfig& config,
                                               RngStream& rng) {
  config.validate();
  const int v = config.node_count;
  std::vector<AdjacencyMatrix> networks;
  networks.reserve(config.n_subjects);

  if (config.scenario == SimScenario::kSim1) {
    for (int i = 0; i < config.n_subjects; ++i) {
      Matrix m = Matrix::Zero(v, v);
      for (int k = 0; k < v; ++k) {
        for (int l = k + 1; l < v; ++l) {
          const double value = rng.normal();
          m(k, l) = value;
          m(l, k) = value;
        }
      }
      networks.push_back(AdjacencyMatrix::from_dense(m));
    }
    return networks;
  }

  // stochastic blockmodel: assignments shared by every subject
  const std::vector<int> community = community_assignment(config);
  std::vector<int> between_pairs;
  const int q = edge_count(v);
  for (int e = 0; e < q; ++e) {
    const auto [k, l] = edge_nodes(v, e);
    if (community[k] != community[l]) between_pairs.push_back(e);
  }
  const int between_active = static_cast<int>(
      std::lround(config.between_fraction * between_pairs.size()));
  const double within_sd = std::sqrt(config.within_var);

  for (int i = 0; i < config.n_subjects; ++i) {
    Matrix m = Matrix::Zero(v, v);
    for (int k = 0; k < v; ++k) {
      for (int l = k + 1; l < v; ++l) {
        if (community[k] == community[l]) {
          const double value = rng.normal(config.within_mean, within_sd);
          m(k, l) = value;
          m(l, k) = value;
        }
      }
    }
    const std::vector<int> picks = sample_without_replacement(
        static_cast<int>(between_pairs.size()), between_active, rng);
    for (int pick : picks) {
      const auto [k, l] = edge_nodes(v, between_pairs[pick]);
      const double value = rng.normal();
      m(k, l) = value;
      m(l, k) = value;
    }
    networks.push_back(AdjacencyMatrix::from_dense(m));
  }
  return networks;
}

std::vector<int> generate_responses(const std::vector<AdjacencyMatrix>& networks,
                                    const GroundTruth& truth, double mu0,
                                    RngStream& rng) {
  const EdgeVector gamma = truth.coefficient_vector();
  std::vector<int> labels;
  labels.reserve(networks.size());
  for (const auto& network : networks) {
    const double psi = linear_predictor(network, mu0, gamma);
    labels.push_back(rng.bernoulli(logistic(psi)) ? 1 : 0);
  }
  return labels;
}

SimulatedData generate_dataset(const SimConfig& config) {
  config.validate();
  // fixed substreams per stage keep the pieces independently reproducible
  RngStream coef_rng(config.seed, 101);
  RngStream network_rng(config.seed, 102);
  RngStream response_rng(config.seed, 103);

  SimulatedData out;
  out.truth = generate_coefficients(config, coef_rng);
  out.dataset.networks = generate_networks(config, network_rng);
  out.dataset.labels = generate_responses(out.dataset.networks, out.truth,
                                          config.mu0, response_rng);
  out.dataset.validate();
  return out;
}

}  // namespace netclass
