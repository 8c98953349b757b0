#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "netclass/chain.hpp"
#include "netclass/io.hpp"
#include "netclass/simgen.hpp"

using namespace netclass;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("netclass_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int value = 0;
    return value;
  }
};

PosteriorSamples small_fit(std::uint64_t seed) {
  SimConfig cfg = sim_preset("sim1-case1");
  cfg.node_count = 4;
  cfg.n_subjects = 15;
  cfg.seed = seed;
  const SimulatedData sim = generate_dataset(cfg);
  PriorSpecLasso spec;
  spec.max_rank = 2;
  McmcConfig mcmc;
  mcmc.iterations = 300;
  mcmc.burnin = 100;
  mcmc.thin = 2;
  mcmc.seed = seed;
  return run_chain_bnlc(sim.dataset, spec, mcmc);
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -1.0, 0.1, 3.141592653589793, 1e-300, 1e300,
                   -2.2250738585072014e-308}) {
    const std::string text = format_double(v);
    CHECK(std::stod(text) == v);
  }
}

TEST_CASE("dataset write/read round trip with truth sidecar") {
  TempDir tmp;
  SimConfig cfg = sim_preset("sim1-case1");
  cfg.node_count = 5;
  cfg.n_subjects = 8;
  cfg.seed = 99;
  const SimulatedData sim = generate_dataset(cfg);
  write_dataset(tmp.path, sim.dataset, cfg.seed,
                TruthRecord::from(sim.truth));

  const DatasetBundle bundle = read_dataset(tmp.path);
  CHECK(bundle.seed == 99);
  REQUIRE(bundle.dataset.size() == 8);
  CHECK(bundle.dataset.labels == sim.dataset.labels);
  for (int i = 0; i < 8; ++i) {
    CHECK(bundle.dataset.networks[i].entries().isApprox(
        sim.dataset.networks[i].entries(), 0.0));
  }
  REQUIRE(bundle.truth.has_value());
  CHECK(bundle.truth->mu0 == sim.truth.mu0);
  CHECK(bundle.truth->active_nodes == sim.truth.active_nodes);
  CHECK(bundle.truth->active_residual_edges == sim.truth.active_residual_edges);
  CHECK(bundle.truth->gamma_true.isApprox(
      sim.truth.coefficient_vector().values, 0.0));
}

TEST_CASE("dataset loader rejects corrupted inputs") {
  TempDir tmp;
  SimConfig cfg = sim_preset("sim1-case1");
  cfg.node_count = 4;
  cfg.n_subjects = 3;
  cfg.seed = 5;
  const SimulatedData sim = generate_dataset(cfg);
  write_dataset(tmp.path, sim.dataset, cfg.seed, std::nullopt);

  SUBCASE("missing manifest") {
    fs::remove(tmp.path / "manifest.json");
    CHECK_THROWS_AS(read_dataset(tmp.path), ValidationError);
  }
  SUBCASE("wrong version") {
    std::ofstream out(tmp.path / "manifest.json");
    out << R"({"format_version": 99, "kind": "dataset"})";
    out.close();
    CHECK_THROWS_AS(read_dataset(tmp.path), ValidationError);
  }
  SUBCASE("row count mismatch") {
    // append a truncated row
    std::ofstream out(tmp.path / "edges.csv", std::ios::app);
    out << "1.0,2.0\n";
    out.close();
    CHECK_THROWS_AS(read_dataset(tmp.path), ValidationError);
  }
}

TEST_CASE("posterior samples binary round trip is lossless") {
  TempDir tmp;
  const PosteriorSamples samples = small_fit(1234);
  const fs::path path = tmp.path / "samples.bin";
  write_samples(path, samples);
  const PosteriorSamples loaded = read_samples(path);

  CHECK(loaded.node_count == samples.node_count);
  CHECK(loaded.max_rank == samples.max_rank);
  CHECK(loaded.chains == samples.chains);
  CHECK(loaded.draws_per_chain == samples.draws_per_chain);
  CHECK(loaded.prior.kind == samples.prior.kind);
  CHECK(loaded.prior.nu == samples.prior.nu);
  CHECK(loaded.config.seed == samples.config.seed);
  CHECK(loaded.config.iterations == samples.config.iterations);
  CHECK(loaded.intercept.isApprox(samples.intercept, 0.0));
  CHECK(loaded.edge_coef.isApprox(samples.edge_coef, 0.0));
  CHECK((loaded.node_active.cast<int>() - samples.node_active.cast<int>())
            .cwiseAbs()
            .maxCoeff() == 0);
  CHECK((loaded.rank_active.cast<int>() - samples.rank_active.cast<int>())
            .cwiseAbs()
            .maxCoeff() == 0);
}

TEST_CASE("samples loader rejects unknown magic and version") {
  TempDir tmp;
  const fs::path path = tmp.path / "samples.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "JUNKJUNKJUNK";
  }
  CHECK_THROWS_AS(read_samples(path), ValidationError);

  const PosteriorSamples samples = small_fit(77);
  write_samples(path, samples);
  // corrupt the version field
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(4);
  const std::uint32_t bad = 999;
  f.write(reinterpret_cast<const char*>(&bad), 4);
  f.close();
  CHECK_THROWS_AS(read_samples(path), ValidationError);
}

TEST_CASE("samples csv export has one row per draw") {
  TempDir tmp;
  const PosteriorSamples samples = small_fit(31);
  const fs::path path = tmp.path / "samples.csv";
  export_samples_csv(path, samples);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("mu,gamma_1_2,", 0) == 0);
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == samples.total_draws());
}

TEST_CASE("report, scores, metrics and roc writers produce versioned files") {
  TempDir tmp;
  const PosteriorSamples samples = small_fit(41);
  const InferenceReport report = build_inference_report(samples);
  write_inference_report(tmp.path / "report.json", report, samples.node_count,
                         41);
  std::ifstream in(tmp.path / "report.json");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"format_version\": 1") != std::string::npos);
  CHECK(text.find("effective_dimensionality") != std::string::npos);

  Vector scores(3);
  scores << 0.2, 0.8, 0.5;
  write_scores_csv(tmp.path / "scores.csv", scores, {0, 1, 1}, 41);
  std::ifstream sin(tmp.path / "scores.csv");
  std::string header;
  std::getline(sin, header);
  CHECK(header.find("format_version=1") != std::string::npos);

  std::vector<ExperimentCell> cells(1);
  cells[0].preset = "sim1-case1";
  cells[0].method = "bnlc";
  cells[0].metrics.mse = 0.5;
  write_metrics_csv(tmp.path / "table.csv", cells, 41);
  std::ifstream min(tmp.path / "table.csv");
  std::getline(min, header);
  CHECK(header.find("format_version=1") != std::string::npos);

  write_roc_csv(tmp.path / "roc.csv", {{0.0, 0.0, 1.0}, {1.0, 1.0, 0.0}}, 41);
  std::ifstream rin(tmp.path / "roc.csv");
  std::getline(rin, header);
  CHECK(header.find("format_version=1") != std::string::npos);
}

TEST_CASE("dataset round trip with random payloads is lossless") {
  RngStream rng(314, 0);
  for (int rep = 0; rep < 5; ++rep) {
    TempDir tmp;
    const int v = 2 + static_cast<int>(rng.next_u64() % 5);
    const int n = 1 + static_cast<int>(rng.next_u64() % 6);
    NetworkDataset data;
    for (int i = 0; i < n; ++i) {
      Matrix m = Matrix::Zero(v, v);
      for (int k = 0; k < v; ++k) {
        for (int l = k + 1; l < v; ++l) {
          // adversarial magnitudes to stress the decimal round trip
          const double value = rng.normal() * std::pow(10.0, (rng.next_u64() % 13) - 6.0);
          m(k, l) = value;
          m(l, k) = value;
        }
      }
      data.networks.push_back(AdjacencyMatrix::from_dense(m));
      data.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
    }
    write_dataset(tmp.path, data, rep, std::nullopt);
    const DatasetBundle bundle = read_dataset(tmp.path);
    for (int i = 0; i < n; ++i) {
      CHECK(bundle.dataset.networks[i].entries().isApprox(
          data.networks[i].entries(), 0.0));
    }
    CHECK(bundle.dataset.labels == data.labels);
  }
}
