#pragma once

#include <string>
#include <vector>

#include "netclass/types.hpp"

namespace netclass {

// Number of node pairs q = V(V-1)/2.
inline int edge_count(int node_count) {
  return node_count * (node_count - 1) / 2;
}

// Flat index of pair (k, l), 0-based with k < l, in row-major upper
// triangular order (0,1),(0,2),...,(0,V-1),(1,2),...,(V-2,V-1). This
// ordering is a format contract; posterior sample files depend on it.
inline int edge_index(int node_count, int k, int l) {
  return k * (node_count - 1) - k * (k - 1) / 2 + (l - k - 1);
}

// Inverse of edge_index: the (k, l) pair for a flat edge index.
std::pair<int, int> edge_nodes(int node_count, int edge);

// 1-based "k_l" edge name used in file headers.
std::string edge_label(int node_count, int edge);

// If q is a triangular number V(V-1)/2 returns V, otherwise -1.
// q = 0 maps to the degenerate single-node network (V = 1).
int node_count_for_edges(int edge_count);

// Symmetric weighted network with zero diagonal. Immutable once built;
// safe to share across concurrent chain workers.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() : entries_(Matrix::Zero(1, 1)) {}

  // Validates shape, symmetry and zero diagonal. Entries within 1e-9 of
  // symmetric are averaged; larger violations are rejected with the
  // offending 1-based index pair in the message.
  static AdjacencyMatrix from_dense(const Matrix& entries);
  static AdjacencyMatrix zero(int node_count);

  int node_count() const { return static_cast<int>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int k, int l) const { return entries_(k, l); }

  static constexpr double kSymmetryTolerance = 1e-9;

 private:
  explicit AdjacencyMatrix(Matrix entries) : entries_(std::move(entries)) {}
  Matrix entries_;
};

// Upper-triangular vectorization of a V x V symmetric matrix, in the
// canonical edge order above.
struct EdgeVector {
  int node_count = 1;
  Vector values;  // length edge_count(node_count)

  void validate() const;
};

// Upper-triangular entries of A in canonical order.
EdgeVector vectorize_upper(const AdjacencyMatrix& network);

// Symmetric zero-diagonal matrix whose upper triangle is v. Rejects
// vectors whose length is not a triangular number.
AdjacencyMatrix devectorize(const EdgeVector& v);

// mu + <vectorize(A), gamma>. Equals mu + <A, G>_F where G carries
// gamma/2 off the diagonal.
double linear_predictor(const AdjacencyMatrix& network, double mu,
                        const EdgeVector& gamma);

// Observed data: n networks over a shared node set plus binary labels.
struct NetworkDataset {
  std::vector<AdjacencyMatrix> networks;
  std::vector<int> labels;  // values in {0, 1}

  int size() const { return static_cast<int>(networks.size()); }
  int node_count() const;
  void validate() const;

  // n x q matrix of vectorized networks (row i = subject i).
  Matrix design_matrix() const;
};

}  // namespace netclass
