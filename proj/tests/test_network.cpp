#include <doctest.h>

#include "netclass/network.hpp"
#include "netclass/rng.hpp"

using namespace netclass;

namespace {

AdjacencyMatrix random_symmetric(int v, RngStream& rng) {
  Matrix m = Matrix::Zero(v, v);
  for (int k = 0; k < v; ++k) {
    for (int l = k + 1; l < v; ++l) {
      const double value = rng.normal();
      m(k, l) = value;
      m(l, k) = value;
    }
  }
  return AdjacencyMatrix::from_dense(m);
}

}  // namespace

TEST_CASE("edge indexing follows row-major upper-triangular order") {
  CHECK(edge_count(1) == 0);
  CHECK(edge_count(3) == 3);
  CHECK(edge_count(25) == 300);
  CHECK(edge_index(3, 0, 1) == 0);
  CHECK(edge_index(3, 0, 2) == 1);
  CHECK(edge_index(3, 1, 2) == 2);
  int e = 0;
  for (int k = 0; k < 6; ++k) {
    for (int l = k + 1; l < 6; ++l) {
      CHECK(edge_index(6, k, l) == e);
      const auto [kk, ll] = edge_nodes(6, e);
      CHECK(kk == k);
      CHECK(ll == l);
      ++e;
    }
  }
  CHECK(edge_label(3, 0) == "1_2");
  CHECK(edge_label(3, 2) == "2_3");
}

TEST_CASE("vectorize_upper returns canonical ordering") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = m(1, 0) = 5.0;
  m(0, 2) = m(2, 0) = 7.0;
  m(1, 2) = m(2, 1) = 9.0;
  const EdgeVector v = vectorize_upper(AdjacencyMatrix::from_dense(m));
  REQUIRE(v.values.size() == 3);
  CHECK(v.values[0] == 5.0);
  CHECK(v.values[1] == 7.0);
  CHECK(v.values[2] == 9.0);
}

TEST_CASE("vectorize_upper of the zero matrix is the zero vector") {
  const EdgeVector v = vectorize_upper(AdjacencyMatrix::zero(4));
  REQUIRE(v.values.size() == 6);
  CHECK(v.values.isZero(0.0));
}

TEST_CASE("asymmetric or nonzero-diagonal input is rejected with indices") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = 1.0;
  m(1, 0) = 2.0;
  CHECK_THROWS_WITH_AS(AdjacencyMatrix::from_dense(m),
                       doctest::Contains("(1,2)"), ValidationError);
  Matrix d = Matrix::Zero(3, 3);
  d(1, 1) = 0.5;
  CHECK_THROWS_WITH_AS(AdjacencyMatrix::from_dense(d),
                       doctest::Contains("(2,2)"), ValidationError);
}

TEST_CASE("near-symmetric input inside tolerance is averaged") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0 + 5e-10;
  const AdjacencyMatrix a = AdjacencyMatrix::from_dense(m);
  CHECK(a(0, 1) == doctest::Approx(1.0 + 2.5e-10).epsilon(1e-12));
  CHECK(a(0, 1) == a(1, 0));
}

TEST_CASE("devectorize worked examples") {
  EdgeVector v;
  v.node_count = 3;
  v.values.resize(3);
  v.values << 5.0, 7.0, 9.0;
  const AdjacencyMatrix a = devectorize(v);
  CHECK(a.node_count() == 3);
  CHECK(a(0, 1) == 5.0);
  CHECK(a(1, 0) == 5.0);
  CHECK(a(0, 2) == 7.0);
  CHECK(a(1, 2) == 9.0);
  CHECK(a(0, 0) == 0.0);

  EdgeVector empty;
  empty.node_count = 1;
  empty.values.resize(0);
  const AdjacencyMatrix degenerate = devectorize(empty);
  CHECK(degenerate.node_count() == 1);
  CHECK(degenerate(0, 0) == 0.0);

  EdgeVector bad;
  bad.node_count = 4;
  bad.values = Vector::Zero(7);
  CHECK_THROWS_AS(devectorize(bad), ValidationError);
}

TEST_CASE("round trip devectorize(vectorize(A)) == A for V in 1..50") {
  RngStream rng(20240601, 0);
  for (int v = 1; v <= 50; ++v) {
    const AdjacencyMatrix a = random_symmetric(v, rng);
    const AdjacencyMatrix back = devectorize(vectorize_upper(a));
    CHECK(back.entries().isApprox(a.entries(), 0.0));
  }
}

TEST_CASE("linear predictor worked examples") {
  EdgeVector gamma;
  gamma.node_count = 3;
  gamma.values.resize(3);
  gamma.values << 0.5, -1.0, 0.25;

  SUBCASE("zero network returns the intercept") {
    CHECK(linear_predictor(AdjacencyMatrix::zero(3), 2.0, gamma) == 2.0);
  }
  SUBCASE("hand dot product") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 1) = m(1, 0) = 1.0;
    m(1, 2) = m(2, 1) = 1.0;
    const AdjacencyMatrix a = AdjacencyMatrix::from_dense(m);
    CHECK(linear_predictor(a, 0.0, gamma) == doctest::Approx(0.75));
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(linear_predictor(AdjacencyMatrix::zero(4), 0.0, gamma),
                    ValidationError);
  }
}

TEST_CASE("linear predictor equals the dense Frobenius inner product") {
  RngStream rng(7, 3);
  for (int rep = 0; rep < 20; ++rep) {
    const int v = 2 + static_cast<int>(rng.next_u64() % 9);
    const AdjacencyMatrix a = random_symmetric(v, rng);
    EdgeVector gamma;
    gamma.node_count = v;
    gamma.values.resize(edge_count(v));
    for (int e = 0; e < gamma.values.size(); ++e) gamma.values[e] = rng.normal();
    const double mu = rng.normal();

    // dense oracle: mu + sum_{k,l} A_{kl} G_{kl} with G = devectorize(gamma)/2
    const Matrix g = devectorize(gamma).entries() / 2.0;
    double frob = 0.0;
    for (int k = 0; k < v; ++k) {
      for (int l = 0; l < v; ++l) frob += a(k, l) * g(k, l);
    }
    const double direct = linear_predictor(a, mu, gamma);
    CHECK(direct == doctest::Approx(mu + frob).epsilon(1e-12));
  }
}

TEST_CASE("linear predictor is linear in mu and gamma") {
  RngStream rng(99, 0);
  const AdjacencyMatrix a = random_symmetric(5, rng);
  EdgeVector g1, g2;
  g1.node_count = g2.node_count = 5;
  g1.values.resize(10);
  g2.values.resize(10);
  for (int e = 0; e < 10; ++e) {
    g1.values[e] = rng.normal();
    g2.values[e] = rng.normal();
  }
  EdgeVector sum = g1;
  sum.values += 2.5 * g2.values;
  const double lhs = linear_predictor(a, 1.0 + 3.0, sum);
  const double rhs = linear_predictor(a, 1.0, g1) + 3.0 +
                     2.5 * linear_predictor(a, 0.0, g2);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("dataset validation catches shape and label problems") {
  NetworkDataset data;
  data.networks.push_back(AdjacencyMatrix::zero(3));
  data.networks.push_back(AdjacencyMatrix::zero(4));
  data.labels = {0, 1};
  CHECK_THROWS_AS(data.validate(), ValidationError);

  NetworkDataset bad_labels;
  bad_labels.networks.push_back(AdjacencyMatrix::zero(3));
  bad_labels.labels = {2};
  CHECK_THROWS_AS(bad_labels.validate(), ValidationError);

  NetworkDataset mismatch;
  mismatch.networks.push_back(AdjacencyMatrix::zero(3));
  mismatch.labels = {0, 1};
  CHECK_THROWS_AS(mismatch.validate(), ValidationError);
}
