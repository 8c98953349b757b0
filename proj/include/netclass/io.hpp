#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netclass/metrics.hpp"
#include "netclass/network.hpp"
#include "netclass/posterior.hpp"
#include "netclass/samples.hpp"
#include "netclass/simgen.hpp"

namespace netclass {

inline constexpr int kFormatVersion = 1;

// Lossless double -> decimal text (shortest round-trip form).
std::string format_double(double value);

// Ground-truth sidecar contents; matrices are reconstructed on demand.
struct TruthRecord {
  double mu0 = 2.0;
  int true_rank = 1;
  Vector gamma_true;                       // model-scale coefficients, length q
  std::vector<int> active_nodes;           // 0-based
  std::vector<int> active_residual_edges;  // 0-based edge indices

  std::vector<int> nonzero_edges() const;
  static TruthRecord from(const GroundTruth& truth);
};

// A dataset directory holds manifest.json, edges.csv (n rows x q columns
// in canonical edge order, "k_l" header names), labels.csv, and optionally
// truth.json. All node/edge ids in files are 1-based.
struct DatasetBundle {
  NetworkDataset dataset;
  std::optional<TruthRecord> truth;
  std::uint64_t seed = 0;
};

void write_dataset(const std::filesystem::path& dir, const NetworkDataset& data,
                   std::uint64_t seed,
                   const std::optional<TruthRecord>& truth = std::nullopt,
                   const std::string& config_echo_json = "");

DatasetBundle read_dataset(const std::filesystem::path& dir);

// Posterior samples: binary columnar file with an embedded JSON manifest.
// Layout: magic "NCPS", u32 version, u64 manifest length, manifest bytes,
// then little-endian doubles mu[L], gamma[L*q] and bytes xi[L*V],
// lambda[L*R]. Unknown versions are rejected.
void write_samples(const std::filesystem::path& path,
                   const PosteriorSamples& samples);
PosteriorSamples read_samples(const std::filesystem::path& path);

// Debug export of the samples as CSV (one row per draw).
void export_samples_csv(const std::filesystem::path& path,
                        const PosteriorSamples& samples);

void write_inference_report(const std::filesystem::path& path,
                            const InferenceReport& report, int node_count,
                            std::uint64_t seed);

void write_scores_csv(const std::filesystem::path& path, const Vector& scores,
                      const std::vector<int>& labels, std::uint64_t seed);

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<ExperimentCell>& cells,
                       std::uint64_t seed);

void write_roc_csv(const std::filesystem::path& path,
                   const std::vector<RocPoint>& curve, std::uint64_t seed);

}  // namespace netclass
