#include "netclass/network.hpp"

#include <cmath>
#include <cstdio>

namespace netclass {

std::pair<int, int> edge_nodes(int node_count, int edge) {
  int k = 0;
  int row_len = node_count - 1;
  int e = edge;
  while (e >= row_len) {
    e -= row_len;
    --row_len;
    ++k;
  }
  return {k, k + 1 + e};
}

std::string edge_label(int node_count, int edge) {
  const auto [k, l] = edge_nodes(node_count, edge);
  return std::to_string(k + 1) + "_" + std::to_string(l + 1);
}

int node_count_for_edges(int edge_count) {
  if (edge_count < 0) return -1;
  if (edge_count == 0) return 1;
  // V = (1 + sqrt(1 + 8q)) / 2 when q is triangular
  const double v = (1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(edge_count))) / 2.0;
  const int vi = static_cast<int>(std::lround(v));
  if (vi * (vi - 1) / 2 != edge_count) return -1;
  return vi;
}

AdjacencyMatrix AdjacencyMatrix::from_dense(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1) {
    throw ValidationError("adjacency matrix must be square and nonempty, got " +
                          std::to_string(entries.rows()) + "x" +
                          std::to_string(entries.cols()));
  }
  const int v = static_cast<int>(entries.rows());
  Matrix out(v, v);
  for (int k = 0; k < v; ++k) {
    if (std::abs(entries(k, k)) > kSymmetryTolerance) {
      throw ValidationError("adjacency matrix has nonzero diagonal at (" +
                            std::to_string(k + 1) + "," + std::to_string(k + 1) +
                            "): " + std::to_string(entries(k, k)));
    }
    out(k, k) = 0.0;
    for (int l = k + 1; l < v; ++l) {
      const double diff = entries(k, l) - entries(l, k);
      if (std::abs(diff) > kSymmetryTolerance) {
        throw ValidationError(
            "adjacency matrix is asymmetric at (" + std::to_string(k + 1) + "," +
            std::to_string(l + 1) + "): " + std::to_string(entries(k, l)) +
            " vs " + std::to_string(entries(l, k)));
      }
      // within tolerance: symmetrize by averaging (float round-off in files)
      const double a = 0.5 * (entries(k, l) + entries(l, k));
      out(k, l) = a;
      out(l, k) = a;
    }
  }
  return AdjacencyMatrix(std::move(out));
}

AdjacencyMatrix AdjacencyMatrix::zero(int node_count) {
  if (node_count < 1) throw ValidationError("node count must be >= 1");
  return AdjacencyMatrix(Matrix::Zero(node_count, node_count));
}

void EdgeVector::validate() const {
  if (node_count < 1) throw ValidationError("edge vector: node count must be >= 1");
  if (values.size() != edge_count(node_count)) {
    throw ValidationError("edge vector length " + std::to_string(values.size()) +
                          " does not match V=" + std::to_string(node_count) +
                          " (expected " + std::to_string(edge_count(node_count)) + ")");
  }
}

EdgeVector vectorize_upper(const AdjacencyMatrix& network) {
  const int v = network.node_count();
  EdgeVector out;
  out.node_count = v;
  out.values.resize(edge_count(v));
  int e = 0;
  for (int k = 0; k < v; ++k) {
    for (int l = k + 1; l < v; ++l) out.values[e++] = network(k, l);
  }
  return out;
}

AdjacencyMatrix devectorize(const EdgeVector& v) {
  const int nodes = node_count_for_edges(static_cast<int>(v.values.size()));
  if (nodes < 0) {
    throw ValidationError("edge vector length " + std::to_string(v.values.size()) +
                          " is not a triangular number");
  }
  Matrix m = Matrix::Zero(nodes, nodes);
  int e = 0;
  for (int k = 0; k < nodes; ++k) {
    for (int l = k + 1; l < nodes; ++l) {
      m(k, l) = v.values[e];
      m(l, k) = v.values[e];
      ++e;
    }
  }
  return AdjacencyMatrix::from_dense(m);
}

double linear_predictor(const AdjacencyMatrix& network, double mu,
                        const EdgeVector& gamma) {
  if (gamma.node_count != network.node_count()) {
    throw ValidationError("linear predictor: network has V=" +
                          std::to_string(network.node_count()) +
                          " but coefficients have V=" +
                          std::to_string(gamma.node_count));
  }
  gamma.validate();
  const int v = network.node_count();
  double acc = mu;
  int e = 0;
  for (int k = 0; k < v; ++k) {
    for (int l = k + 1; l < v; ++l) acc += network(k, l) * gamma.values[e++];
  }
  return acc;
}

int NetworkDataset::node_count() const {
  if (networks.empty()) throw ValidationError("dataset has no networks");
  return networks.front().node_count();
}

void NetworkDataset::validate() const {
  if (networks.size() != labels.size()) {
    throw ValidationError("dataset has " + std::to_string(networks.size()) +
                          " networks but " + std::to_string(labels.size()) +
                          " labels");
  }
  if (networks.empty()) return;
  const int v = networks.front().node_count();
  for (std::size_t i = 0; i < networks.size(); ++i) {
    if (networks[i].node_count() != v) {
      throw ValidationError("network " + std::to_string(i + 1) + " has V=" +
                            std::to_string(networks[i].node_count()) +
                            ", expected V=" + std::to_string(v));
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw ValidationError("label " + std::to_string(i + 1) +
                            " is not binary: " + std::to_string(labels[i]));
    }
  }
}

Matrix NetworkDataset::design_matrix() const {
  validate();
  const int n = size();
  const int v = networks.empty() ? 1 : node_count();
  const int q = edge_count(v);
  Matrix x(n, q);
  for (int i = 0; i < n; ++i) {
    x.row(i) = vectorize_upper(networks[i]).values.transpose();
  }
  return x;
}

}  // namespace netclass
