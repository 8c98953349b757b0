#include "netclass/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace netclass {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw ValidationError("failed to parse number '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  return in;
}

json prior_to_json(const ShrinkagePrior& prior) {
  json j{{"kind", to_string(prior.kind)},
         {"max_rank", prior.max_rank},
         {"nu", prior.nu},
         {"a_delta", prior.a_delta},
         {"b_delta", prior.b_delta},
         {"eta", prior.eta}};
  if (prior.kind == PriorKind::kLasso) {
    j["zeta"] = prior.zeta;
    j["iota"] = prior.iota;
  }
  return j;
}

ShrinkagePrior prior_from_json(const json& j) {
  ShrinkagePrior prior;
  prior.kind = prior_kind_from_string(j.at("kind").get<std::string>());
  prior.max_rank = j.at("max_rank").get<int>();
  prior.nu = j.at("nu").get<double>();
  prior.a_delta = j.at("a_delta").get<double>();
  prior.b_delta = j.at("b_delta").get<double>();
  prior.eta = j.at("eta").get<double>();
  if (prior.kind == PriorKind::kLasso) {
    prior.zeta = j.at("zeta").get<double>();
    prior.iota = j.at("iota").get<double>();
  }
  return prior;
}

json config_to_json(const McmcConfig& config) {
  json j{{"iterations", config.iterations}, {"burnin", config.burnin},
         {"thin", config.thin},             {"chains", config.chains},
         {"seed", config.seed},             {"warm_sweeps", config.warm_sweeps},
         {"latent_subsweeps", config.latent_subsweeps}};
  if (std::isfinite(config.mu_prior_var)) {
    j["mu_prior_var"] = config.mu_prior_var;
  }
  return j;
}

McmcConfig config_from_json(const json& j) {
  McmcConfig config;
  config.iterations = j.at("iterations").get<int>();
  config.burnin = j.at("burnin").get<int>();
  config.thin = j.at("thin").get<int>();
  config.chains = j.at("chains").get<int>();
  config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("mu_prior_var")) {
    config.mu_prior_var = j.at("mu_prior_var").get<double>();
  }
  if (j.contains("warm_sweeps")) {
    config.warm_sweeps = j.at("warm_sweeps").get<int>();
  }
  if (j.contains("latent_subsweeps")) {
    config.latent_subsweeps = j.at("latent_subsweeps").get<int>();
  }
  return config;
}

void require_version(const json& j, const std::string& what) {
  if (!j.contains("format_version") || j.at("format_version").get<int>() != kFormatVersion) {
    throw ValidationError(what + ": unknown or missing format version");
  }
}

json load_json(const fs::path& path) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw ValidationError(path.string() + ": invalid JSON (" + err.what() + ")");
  }
  return j;
}

}  // namespace

std::vector<int> TruthRecord::nonzero_edges() const {
  std::vector<int> out;
  for (int e = 0; e < gamma_true.size(); ++e) {
    if (gamma_true[e] != 0.0) out.push_back(e);
  }
  return out;
}

TruthRecord TruthRecord::from(const GroundTruth& truth) {
  TruthRecord record;
  record.mu0 = truth.mu0;
  record.true_rank = static_cast<int>(truth.u0.cols());
  record.gamma_true = truth.coefficient_vector().values;
  record.active_nodes = truth.active_nodes;
  record.active_residual_edges = truth.active_residual_edges;
  return record;
}

void write_dataset(const fs::path& dir, const NetworkDataset& data,
                   std::uint64_t seed, const std::optional<TruthRecord>& truth,
                   const std::string& config_echo_json) {
  data.validate();
  fs::create_directories(dir);
  const int n = data.size();
  const int v = n > 0 ? data.node_count() : 1;
  const int q = edge_count(v);

  {
    auto out = open_output(dir / "edges.csv");
    for (int e = 0; e < q; ++e) {
      if (e > 0) out << ',';
      out << "e_" << edge_label(v, e);
    }
    out << '\n';
    for (int i = 0; i < n; ++i) {
      const EdgeVector row = vectorize_upper(data.networks[i]);
      for (int e = 0; e < q; ++e) {
        if (e > 0) out << ',';
        out << format_double(row.values[e]);
      }
      out << '\n';
    }
  }
  {
    auto out = open_output(dir / "labels.csv");
    out << "label\n";
    for (int label : data.labels) out << label << '\n';
  }

  json manifest{{"format_version", kFormatVersion},
                {"kind", "dataset"},
                {"seed", seed},
                {"node_count", v},
                {"n_subjects", n},
                {"edge_dim", q},
                {"edge_order", "row-major-upper"},
                {"files", json{{"edges", "edges.csv"}, {"labels", "labels.csv"}}}};
  if (!config_echo_json.empty()) {
    manifest["config"] = json::parse(config_echo_json);
  }
  if (truth) {
    manifest["files"]["truth"] = "truth.json";
    json t{{"format_version", kFormatVersion},
           {"kind", "truth"},
           {"mu0", truth->mu0},
           {"true_rank", truth->true_rank}};
    json gamma = json::array();
    for (int e = 0; e < truth->gamma_true.size(); ++e) {
      gamma.push_back(truth->gamma_true[e]);
    }
    t["gamma_true"] = std::move(gamma);
    json nodes = json::array();
    for (int k : truth->active_nodes) nodes.push_back(k + 1);
    t["active_nodes"] = std::move(nodes);
    json edges = json::array();
    for (int e : truth->active_residual_edges) {
      const auto [k, l] = edge_nodes(node_count_for_edges(
                                         static_cast<int>(truth->gamma_true.size())),
                                     e);
      edges.push_back(json::array({k + 1, l + 1}));
    }
    t["active_residual_edges"] = std::move(edges);
    auto out = open_output(dir / "truth.json");
    out << t.dump(2) << '\n';
  }
  auto out = open_output(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

DatasetBundle read_dataset(const fs::path& dir) {
  const json manifest = load_json(dir / "manifest.json");
  require_version(manifest, "dataset manifest");
  if (manifest.at("kind").get<std::string>() != "dataset") {
    throw ValidationError("manifest kind is not 'dataset'");
  }
  const int v = manifest.at("node_count").get<int>();
  const int n = manifest.at("n_subjects").get<int>();
  const int q = manifest.at("edge_dim").get<int>();
  if (q != edge_count(v)) {
    throw ValidationError("dataset manifest: edge_dim " + std::to_string(q) +
                          " disagrees with node_count " + std::to_string(v));
  }

  DatasetBundle bundle;
  bundle.seed = manifest.at("seed").get<std::uint64_t>();

  {
    auto in = open_input(dir / "edges.csv");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("edges.csv is empty");
    const auto header = split_csv_line(line);
    if (static_cast<int>(header.size()) != q) {
      throw ValidationError("edges.csv has " + std::to_string(header.size()) +
                            " columns, expected " + std::to_string(q));
    }
    int row = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      if (static_cast<int>(fields.size()) != q) {
        throw ValidationError("edges.csv row " + std::to_string(row + 1) +
                              " has " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(q));
      }
      EdgeVector values;
      values.node_count = v;
      values.values.resize(q);
      for (int e = 0; e < q; ++e) values.values[e] = parse_double(fields[e]);
      bundle.dataset.networks.push_back(devectorize(values));
      ++row;
    }
    if (row != n) {
      throw ValidationError("edges.csv has " + std::to_string(row) +
                            " data rows, manifest says " + std::to_string(n));
    }
  }
  {
    auto in = open_input(dir / "labels.csv");
    std::string line;
    if (!std::getline(in, line) || line != "label") {
      throw ValidationError("labels.csv must start with a 'label' header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const double value = parse_double(line);
      bundle.dataset.labels.push_back(static_cast<int>(value));
    }
  }
  bundle.dataset.validate();

  const auto& files = manifest.at("files");
  if (files.contains("truth")) {
    const json t = load_json(dir / files.at("truth").get<std::string>());
    require_version(t, "truth sidecar");
    TruthRecord record;
    record.mu0 = t.at("mu0").get<double>();
    record.true_rank = t.at("true_rank").get<int>();
    const auto& gamma = t.at("gamma_true");
    record.gamma_true.resize(gamma.size());
    for (std::size_t e = 0; e < gamma.size(); ++e) {
      record.gamma_true[static_cast<int>(e)] = gamma[e].get<double>();
    }
    for (const auto& node : t.at("active_nodes")) {
      record.active_nodes.push_back(node.get<int>() - 1);
    }
    for (const auto& pair : t.at("active_residual_edges")) {
      const int k = pair.at(0).get<int>() - 1;
      const int l = pair.at(1).get<int>() - 1;
      record.active_residual_edges.push_back(edge_index(v, k, l));
    }
    bundle.truth = std::move(record);
  }
  return bundle;
}

namespace {

constexpr char kSamplesMagic[4] = {'N', 'C', 'P', 'S'};

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ValidationError("samples file truncated");
  return value;
}

}  // namespace

void write_samples(const fs::path& path, const PosteriorSamples& samples) {
  samples.validate();
  json manifest{{"format_version", kFormatVersion},
                {"kind", "posterior_samples"},
                {"seed", samples.config.seed},
                {"node_count", samples.node_count},
                {"max_rank", samples.max_rank},
                {"edge_dim", samples.edge_dim()},
                {"draws", samples.total_draws()},
                {"chains", samples.chains},
                {"draws_per_chain", samples.draws_per_chain},
                {"prior", prior_to_json(samples.prior)},
                {"mcmc", config_to_json(samples.config)},
                {"fields", json::array({"mu", "gamma", "xi", "lambda"})}};
  const std::string text = manifest.dump();

  auto out = open_output(path);
  out.write(kSamplesMagic, 4);
  write_raw(out, static_cast<std::uint32_t>(kFormatVersion));
  write_raw(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));

  const int total = samples.total_draws();
  const int q = samples.edge_dim();
  out.write(reinterpret_cast<const char*>(samples.intercept.data()),
            static_cast<std::streamsize>(sizeof(double) * total));
  for (int l = 0; l < total; ++l) {
    const Vector row = samples.edge_coef.row(l).transpose();
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * q));
  }
  for (int l = 0; l < total; ++l) {
    for (int k = 0; k < samples.node_count; ++k) {
      write_raw(out, samples.node_active(l, k));
    }
  }
  for (int l = 0; l < total; ++l) {
    for (int r = 0; r < samples.max_rank; ++r) {
      write_raw(out, samples.rank_active(l, r));
    }
  }
  if (!out) throw ValidationError("failed while writing " + path.string());
}

PosteriorSamples read_samples(const fs::path& path) {
  auto in = open_input(path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kSamplesMagic, 4) != 0) {
    throw ValidationError(path.string() + ": not a posterior samples file");
  }
  const auto version = read_raw<std::uint32_t>(in);
  if (version != static_cast<std::uint32_t>(kFormatVersion)) {
    throw ValidationError(path.string() + ": unsupported format version " +
                          std::to_string(version));
  }
  const auto manifest_len = read_raw<std::uint64_t>(in);
  std::string text(manifest_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw ValidationError(path.string() + ": truncated manifest");
  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::exception& err) {
    throw ValidationError(path.string() + ": bad manifest (" + err.what() + ")");
  }
  require_version(manifest, "samples manifest");

  PosteriorSamples samples;
  samples.node_count = manifest.at("node_count").get<int>();
  samples.max_rank = manifest.at("max_rank").get<int>();
  samples.chains = manifest.at("chains").get<int>();
  samples.draws_per_chain = manifest.at("draws_per_chain").get<int>();
  samples.prior = prior_from_json(manifest.at("prior"));
  samples.config = config_from_json(manifest.at("mcmc"));
  const int total = manifest.at("draws").get<int>();
  const int q = manifest.at("edge_dim").get<int>();
  if (q != edge_count(samples.node_count)) {
    throw ValidationError(path.string() + ": edge_dim disagrees with node_count");
  }

  samples.intercept.resize(total);
  in.read(reinterpret_cast<char*>(samples.intercept.data()),
          static_cast<std::streamsize>(sizeof(double) * total));
  samples.edge_coef.resize(total, q);
  for (int l = 0; l < total; ++l) {
    Vector row(q);
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * q));
    samples.edge_coef.row(l) = row.transpose();
  }
  samples.node_active.resize(total, samples.node_count);
  for (int l = 0; l < total; ++l) {
    for (int k = 0; k < samples.node_count; ++k) {
      samples.node_active(l, k) = read_raw<std::uint8_t>(in);
    }
  }
  samples.rank_active.resize(total, samples.max_rank);
  for (int l = 0; l < total; ++l) {
    for (int r = 0; r < samples.max_rank; ++r) {
      samples.rank_active(l, r) = read_raw<std::uint8_t>(in);
    }
  }
  if (!in) throw ValidationError(path.string() + ": truncated sample block");
  samples.validate();
  return samples;
}

void export_samples_csv(const fs::path& path, const PosteriorSamples& samples) {
  samples.validate();
  auto out = open_output(path);
  const int q = samples.edge_dim();
  out << "mu";
  for (int e = 0; e < q; ++e) out << ",gamma_" << edge_label(samples.node_count, e);
  for (int k = 0; k < samples.node_count; ++k) out << ",xi_" << (k + 1);
  for (int r = 0; r < samples.max_rank; ++r) out << ",lambda_" << (r + 1);
  out << '\n';
  for (int l = 0; l < samples.total_draws(); ++l) {
    out << format_double(samples.intercept[l]);
    for (int e = 0; e < q; ++e) out << ',' << format_double(samples.edge_coef(l, e));
    for (int k = 0; k < samples.node_count; ++k) {
      out << ',' << static_cast<int>(samples.node_active(l, k));
    }
    for (int r = 0; r < samples.max_rank; ++r) {
      out << ',' << static_cast<int>(samples.rank_active(l, r));
    }
    out << '\n';
  }
}

void write_inference_report(const fs::path& path, const InferenceReport& report,
                            int node_count, std::uint64_t seed) {
  json j{{"format_version", kFormatVersion},
         {"kind", "inference_report"},
         {"seed", seed},
         {"class_threshold", report.class_threshold}};

  json node_probs = json::array();
  for (int k = 0; k < report.nodes.probabilities.size(); ++k) {
    node_probs.push_back(report.nodes.probabilities[k]);
  }
  j["node_probabilities"] = std::move(node_probs);
  json selected_nodes = json::array();
  for (int k : report.nodes.selected) selected_nodes.push_back(k + 1);
  j["selected_nodes"] = std::move(selected_nodes);

  json exceedance = json::array();
  for (int e = 0; e < report.edges.exceedance.size(); ++e) {
    exceedance.push_back(report.edges.exceedance[e]);
  }
  j["edge_exceedance"] = std::move(exceedance);
  json selected_edges = json::array();
  for (int e : report.edges.selected) {
    const auto [k, l] = edge_nodes(node_count, e);
    selected_edges.push_back(json::array({k + 1, l + 1}));
  }
  j["selected_edges"] = std::move(selected_edges);
  j["edge_effect_threshold"] = report.edges.effect_threshold;
  j["fdr_level"] = report.edges.fdr_level;
  j["achieved_fdr_bound"] = report.edges.achieved_fdr;

  json reff = json::array();
  for (int r = 0; r < report.reff.distribution.size(); ++r) {
    reff.push_back(report.reff.distribution[r]);
  }
  j["effective_dimensionality"] = {
      {"distribution", std::move(reff)},
      {"mode", report.reff.mode},
      {"mean", report.reff.mean}};

  json mean = json::array();
  json lower = json::array();
  json upper = json::array();
  for (int e = 0; e < report.coefficients.mean.size(); ++e) {
    mean.push_back(report.coefficients.mean[e]);
    lower.push_back(report.coefficients.lower[e]);
    upper.push_back(report.coefficients.upper[e]);
  }
  j["coefficients"] = {{"mean", std::move(mean)},
                       {"lower", std::move(lower)},
                       {"upper", std::move(upper)},
                       {"level", report.coefficients.level}};

  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

void write_scores_csv(const fs::path& path, const Vector& scores,
                      const std::vector<int>& labels, std::uint64_t seed) {
  auto out = open_output(path);
  out << "# format_version=" << kFormatVersion << " seed=" << seed << '\n';
  out << "index,score,label\n";
  for (int i = 0; i < scores.size(); ++i) {
    out << (i + 1) << ',' << format_double(scores[i]) << ','
        << (i < static_cast<int>(labels.size()) ? labels[i] : -1) << '\n';
  }
}

void write_metrics_csv(const fs::path& path,
                       const std::vector<ExperimentCell>& cells,
                       std::uint64_t seed) {
  auto out = open_output(path);
  out << "# format_version=" << kFormatVersion << " seed=" << seed << '\n';
  out << "preset,method,status,mse,node_tpr,node_fpr,node_separation_auc,"
         "edge_tpr,edge_fpr,edge_empirical_fdr,auc,reff_mode,reff_mean,"
         "runtime_seconds,error\n";
  for (const auto& cell : cells) {
    out << cell.preset << ',' << cell.method << ','
        << (cell.failed ? "failed" : "ok") << ',';
    if (cell.failed) {
      out << ",,,,,,,,,,," << '"' << cell.error << '"' << '\n';
      continue;
    }
    const auto& m = cell.metrics;
    out << format_double(m.mse) << ',' << format_double(m.node_tpr) << ','
        << format_double(m.node_fpr) << ',' << format_double(m.node_separation_auc)
        << ',' << format_double(m.edge_tpr) << ',' << format_double(m.edge_fpr)
        << ',' << format_double(m.edge_empirical_fdr) << ','
        << format_double(m.auc) << ',' << m.reff_mode << ','
        << format_double(m.reff_mean) << ',' << format_double(m.runtime_seconds)
        << ",\n";
  }
}

void write_roc_csv(const fs::path& path, const std::vector<RocPoint>& curve,
                   std::uint64_t seed) {
  auto out = open_output(path);
  out << "# format_version=" << kFormatVersion << " seed=" << seed << '\n';
  out << "fpr,tpr,threshold\n";
  for (const auto& point : curve) {
    out << format_double(point.fpr) << ',' << format_double(point.tpr) << ','
        << format_double(point.threshold) << '\n';
  }
}

}  // namespace netclass
