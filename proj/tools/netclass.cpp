// netclass command-line front end: simulate | fit | infer | classify |
// evaluate | experiment. Every run can be driven by --config JSON, and every
// run writes back the effective config so it can be replayed exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "netclass/chain.hpp"
#include "netclass/io.hpp"
#include "netclass/metrics.hpp"
#include "netclass/posterior.hpp"
#include "netclass/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace netclass;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw ValidationError("config " + path + ": invalid JSON (" + err.what() + ")");
  }
  return j;
}

void write_config_file(const fs::path& path, const json& config) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write config " + path.string());
  out << config.dump(2) << '\n';
}

// Applies config-file values to options that were not set on the command
// line. `seen` marks flags the user gave explicitly.
template <typename T>
void merge_option(const json& config, const char* key, bool seen, T* value) {
  if (!seen && config.contains(key)) *value = config.at(key).get<T>();
}

struct FitFlags {
  std::string data_dir;
  std::string out_path;
  std::string export_csv;
  std::string prior = "bnlc";
  int rank = 2;
  double nu = 20.0;
  double a_delta = 1.0;
  double b_delta = 1.0;
  double zeta = 1.0;
  double iota = 1.0;
  double eta = 2.0;
  int iters = 50000;
  int burnin = 30000;
  int thin = 10;
  int chains = 1;
  int warm_sweeps = 1000;
  int latent_subsweeps = 3;
  std::uint64_t seed = 0;
  double mu_prior_var = 0.0;  // 0 means flat
};

ShrinkagePrior prior_from_flags(const FitFlags& flags) {
  if (prior_kind_from_string(flags.prior) == PriorKind::kLasso) {
    PriorSpecLasso spec;
    spec.max_rank = flags.rank;
    spec.nu = flags.nu;
    spec.a_delta = flags.a_delta;
    spec.b_delta = flags.b_delta;
    spec.zeta = flags.zeta;
    spec.iota = flags.iota;
    spec.eta = flags.eta;
    return ShrinkagePrior::from(spec);
  }
  PriorSpecHorseshoe spec;
  spec.max_rank = flags.rank;
  spec.nu = flags.nu;
  spec.a_delta = flags.a_delta;
  spec.b_delta = flags.b_delta;
  spec.eta = flags.eta;
  return ShrinkagePrior::from(spec);
}

McmcConfig mcmc_from_flags(const FitFlags& flags) {
  McmcConfig config;
  config.iterations = flags.iters;
  config.burnin = flags.burnin;
  config.thin = flags.thin;
  config.chains = flags.chains;
  config.warm_sweeps = flags.warm_sweeps;
  config.latent_subsweeps = flags.latent_subsweeps;
  config.seed = flags.seed;
  if (flags.mu_prior_var > 0.0) config.mu_prior_var = flags.mu_prior_var;
  return config;
}

json fit_flags_to_json(const FitFlags& flags) {
  return json{{"command", "fit"},
              {"data", flags.data_dir},
              {"out", flags.out_path},
              {"export_csv", flags.export_csv},
              {"prior", flags.prior},
              {"r", flags.rank},
              {"nu", flags.nu},
              {"a_delta", flags.a_delta},
              {"b_delta", flags.b_delta},
              {"zeta", flags.zeta},
              {"iota", flags.iota},
              {"eta", flags.eta},
              {"iters", flags.iters},
              {"burnin", flags.burnin},
              {"thin", flags.thin},
              {"chains", flags.chains},
              {"warm_sweeps", flags.warm_sweeps},
              {"latent_subsweeps", flags.latent_subsweeps},
              {"seed", flags.seed},
              {"mu_prior_var", flags.mu_prior_var}};
}

int run_fit(const FitFlags& flags) {
  const DatasetBundle bundle = read_dataset(flags.data_dir);
  const ShrinkagePrior prior = prior_from_flags(flags);
  const McmcConfig config = mcmc_from_flags(flags);
  const PosteriorSamples samples = run_chain(bundle.dataset, prior, config);
  write_samples(flags.out_path, samples);
  if (!flags.export_csv.empty()) export_samples_csv(flags.export_csv, samples);
  write_config_file(flags.out_path + ".run.json", fit_flags_to_json(flags));

  if (samples.draws_per_chain >= 4) {
    std::printf("%-24s %12s %10s %8s %8s\n", "summary", "mean", "ess", "rhat",
                "acf1");
    for (const auto& diag : diagnostics(samples)) {
      std::printf("%-24s %12.5f %10.1f %8.4f %8.4f\n", diag.name.c_str(),
                  diag.mean, diag.ess, diag.rhat, diag.lag1_autocorr);
      if (samples.chains > 1 && diag.rhat > 1.1) {
        std::fprintf(stderr, "warning: %s has rhat %.3f > 1.1\n",
                     diag.name.c_str(), diag.rhat);
      }
    }
  }
  std::printf("wrote %s (%d draws, %d chain%s)\n", flags.out_path.c_str(),
              samples.total_draws(), samples.chains,
              samples.chains == 1 ? "" : "s");
  return 0;
}

Vector read_scores_csv(const std::string& path, std::vector<int>* labels) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read scores " + path);
  std::vector<double> scores;
  labels->clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
    std::stringstream stream(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (fields.size() < 3) throw ValidationError("scores row needs index,score,label");
    scores.push_back(std::stod(fields[1]));
    labels->push_back(std::stoi(fields[2]));
  }
  Vector out(static_cast<int>(scores.size()));
  for (std::size_t i = 0; i < scores.size(); ++i) out[static_cast<int>(i)] = scores[i];
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian classification of subjects from network predictors"};
  app.require_subcommand(1);

  // ---------------------------------------------------------------- simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
  struct {
    std::string config_path;
    std::string preset = "sim1-case1";
    std::string out_dir;
    std::uint64_t seed = 0;
    int n_override = -1;
    int v_override = -1;
    bool no_truth = false;
  } sim_flags;
  simulate->add_option("--config", sim_flags.config_path, "JSON config to preload");
  auto* sim_preset_opt = simulate->add_option("--preset", sim_flags.preset,
                                              "scenario preset (sim1-case1 .. sim2-case4)");
  auto* sim_seed_opt = simulate->add_option("--seed", sim_flags.seed, "rng seed");
  auto* sim_n_opt = simulate->add_option("--n", sim_flags.n_override, "subject count override");
  auto* sim_v_opt = simulate->add_option("--v", sim_flags.v_override, "node count override (sim1 only)");
  auto* sim_out_opt = simulate->add_option("--out", sim_flags.out_dir, "output directory");
  auto* sim_notruth_opt = simulate->add_flag("--no-truth", sim_flags.no_truth,
                                             "skip the truth sidecar");

  simulate->callback([&] {
    if (!sim_flags.config_path.empty()) {
      const json cfg = load_config_file(sim_flags.config_path);
      merge_option(cfg, "preset", sim_preset_opt->count() > 0, &sim_flags.preset);
      merge_option(cfg, "seed", sim_seed_opt->count() > 0, &sim_flags.seed);
      merge_option(cfg, "n", sim_n_opt->count() > 0, &sim_flags.n_override);
      merge_option(cfg, "v", sim_v_opt->count() > 0, &sim_flags.v_override);
      merge_option(cfg, "out", sim_out_opt->count() > 0, &sim_flags.out_dir);
      merge_option(cfg, "no_truth", sim_notruth_opt->count() > 0, &sim_flags.no_truth);
    }
    if (sim_flags.out_dir.empty()) throw ValidationError("simulate: --out is required");
    SimConfig config = sim_preset(sim_flags.preset);
    config.seed = sim_flags.seed;
    if (sim_flags.n_override > 0) config.n_subjects = sim_flags.n_override;
    if (sim_flags.v_override > 0) config.node_count = sim_flags.v_override;
    config.validate();
    const SimulatedData sim = generate_dataset(config);
    const json echo{{"command", "simulate"},
                    {"preset", sim_flags.preset},
                    {"seed", sim_flags.seed},
                    {"n", config.n_subjects},
                    {"v", config.node_count},
                    {"no_truth", sim_flags.no_truth},
                    {"scenario", to_string(config.scenario)},
                    {"fitted_rank", config.fitted_rank}};
    std::optional<TruthRecord> truth;
    if (!sim_flags.no_truth) truth = TruthRecord::from(sim.truth);
    write_dataset(sim_flags.out_dir, sim.dataset, config.seed, truth, echo.dump());
    std::printf("wrote dataset (V=%d, n=%d) to %s\n", config.node_count,
                config.n_subjects, sim_flags.out_dir.c_str());
  });

  // --------------------------------------------------------------------- fit
  auto* fit = app.add_subcommand("fit", "run MCMC and store posterior samples");
  FitFlags fit_flags;
  std::string fit_config_path;
  fit->add_option("--config", fit_config_path, "JSON config to preload");
  auto* f_data = fit->add_option("--data", fit_flags.data_dir, "dataset directory");
  auto* f_out = fit->add_option("--out", fit_flags.out_path, "samples file to write");
  auto* f_export = fit->add_option("--export-csv", fit_flags.export_csv,
                                   "also export draws as CSV");
  auto* f_prior = fit->add_option("--prior", fit_flags.prior, "bnlc or bnhc");
  auto* f_r = fit->add_option("--r", fit_flags.rank, "max latent rank R");
  auto* f_nu = fit->add_option("--nu", fit_flags.nu, "inverse-Wishart df");
  auto* f_ad = fit->add_option("--a-delta", fit_flags.a_delta, "Beta shape a");
  auto* f_bd = fit->add_option("--b-delta", fit_flags.b_delta, "Beta shape b");
  auto* f_zeta = fit->add_option("--zeta", fit_flags.zeta, "Gamma shape (bnlc)");
  auto* f_iota = fit->add_option("--iota", fit_flags.iota, "Gamma rate (bnlc)");
  auto* f_eta = fit->add_option("--eta", fit_flags.eta, "rank penalty exponent");
  auto* f_iters = fit->add_option("--iters", fit_flags.iters, "total sweeps");
  auto* f_burn = fit->add_option("--burnin", fit_flags.burnin, "burn-in sweeps");
  auto* f_thin = fit->add_option("--thin", fit_flags.thin, "thinning stride");
  auto* f_chains = fit->add_option("--chains", fit_flags.chains, "chain count");
  auto* f_warm = fit->add_option("--warm-sweeps", fit_flags.warm_sweeps,
                                 "initialization sweeps with ranks held on");
  auto* f_sub = fit->add_option("--latent-subsweeps", fit_flags.latent_subsweeps,
                                "latent-layer passes per iteration");
  auto* f_seed = fit->add_option("--seed", fit_flags.seed, "rng seed");
  auto* f_mpv = fit->add_option("--mu-prior-var", fit_flags.mu_prior_var,
                                "intercept prior variance (0 = flat)");

  fit->callback([&] {
    if (!fit_config_path.empty()) {
      const json cfg = load_config_file(fit_config_path);
      merge_option(cfg, "data", f_data->count() > 0, &fit_flags.data_dir);
      merge_option(cfg, "out", f_out->count() > 0, &fit_flags.out_path);
      merge_option(cfg, "export_csv", f_export->count() > 0, &fit_flags.export_csv);
      merge_option(cfg, "prior", f_prior->count() > 0, &fit_flags.prior);
      merge_option(cfg, "r", f_r->count() > 0, &fit_flags.rank);
      merge_option(cfg, "nu", f_nu->count() > 0, &fit_flags.nu);
      merge_option(cfg, "a_delta", f_ad->count() > 0, &fit_flags.a_delta);
      merge_option(cfg, "b_delta", f_bd->count() > 0, &fit_flags.b_delta);
      merge_option(cfg, "zeta", f_zeta->count() > 0, &fit_flags.zeta);
      merge_option(cfg, "iota", f_iota->count() > 0, &fit_flags.iota);
      merge_option(cfg, "eta", f_eta->count() > 0, &fit_flags.eta);
      merge_option(cfg, "iters", f_iters->count() > 0, &fit_flags.iters);
      merge_option(cfg, "burnin", f_burn->count() > 0, &fit_flags.burnin);
      merge_option(cfg, "thin", f_thin->count() > 0, &fit_flags.thin);
      merge_option(cfg, "chains", f_chains->count() > 0, &fit_flags.chains);
      merge_option(cfg, "warm_sweeps", f_warm->count() > 0, &fit_flags.warm_sweeps);
      merge_option(cfg, "latent_subsweeps", f_sub->count() > 0,
                   &fit_flags.latent_subsweeps);
      merge_option(cfg, "seed", f_seed->count() > 0, &fit_flags.seed);
      merge_option(cfg, "mu_prior_var", f_mpv->count() > 0, &fit_flags.mu_prior_var);
    }
    if (fit_flags.data_dir.empty()) throw ValidationError("fit: --data is required");
    if (fit_flags.out_path.empty()) throw ValidationError("fit: --out is required");
    run_fit(fit_flags);
  });

  // ------------------------------------------------------------------- infer
  auto* infer = app.add_subcommand("infer", "inference report from samples");
  struct {
    std::string config_path;
    std::string samples_path;
    std::string out_path;
    double edge_threshold = 0.05;
    double fdr = 0.05;
    double level = 0.95;
  } infer_flags;
  infer->add_option("--config", infer_flags.config_path, "JSON config to preload");
  auto* i_samples = infer->add_option("--samples", infer_flags.samples_path, "samples file");
  auto* i_out = infer->add_option("--out", infer_flags.out_path, "report JSON to write");
  auto* i_thr = infer->add_option("--edge-threshold", infer_flags.edge_threshold,
                                  "coefficient magnitude threshold");
  auto* i_fdr = infer->add_option("--fdr", infer_flags.fdr, "FDR level");
  auto* i_level = infer->add_option("--level", infer_flags.level, "credible level");

  infer->callback([&] {
    if (!infer_flags.config_path.empty()) {
      const json cfg = load_config_file(infer_flags.config_path);
      merge_option(cfg, "samples", i_samples->count() > 0, &infer_flags.samples_path);
      merge_option(cfg, "out", i_out->count() > 0, &infer_flags.out_path);
      merge_option(cfg, "edge_threshold", i_thr->count() > 0, &infer_flags.edge_threshold);
      merge_option(cfg, "fdr", i_fdr->count() > 0, &infer_flags.fdr);
      merge_option(cfg, "level", i_level->count() > 0, &infer_flags.level);
    }
    if (infer_flags.samples_path.empty()) throw ValidationError("infer: --samples is required");
    if (infer_flags.out_path.empty()) throw ValidationError("infer: --out is required");
    const PosteriorSamples samples = read_samples(infer_flags.samples_path);
    const InferenceReport report = build_inference_report(
        samples, infer_flags.edge_threshold, infer_flags.fdr, infer_flags.level);
    write_inference_report(infer_flags.out_path, report, samples.node_count,
                           samples.config.seed);
    std::printf("selected %zu nodes, %zu edges (fdr bound %.4f); R_eff mode %d\n",
                report.nodes.selected.size(), report.edges.selected.size(),
                report.edges.achieved_fdr, report.reff.mode);
  });

  // ---------------------------------------------------------------- classify
  auto* classify_cmd = app.add_subcommand("classify", "score new networks");
  struct {
    std::string config_path;
    std::string samples_path;
    std::string data_dir;
    std::string out_path;
  } cls_flags;
  classify_cmd->add_option("--config", cls_flags.config_path, "JSON config to preload");
  auto* c_samples = classify_cmd->add_option("--samples", cls_flags.samples_path, "samples file");
  auto* c_data = classify_cmd->add_option("--data", cls_flags.data_dir, "dataset directory");
  auto* c_out = classify_cmd->add_option("--out", cls_flags.out_path, "scores CSV to write");

  classify_cmd->callback([&] {
    if (!cls_flags.config_path.empty()) {
      const json cfg = load_config_file(cls_flags.config_path);
      merge_option(cfg, "samples", c_samples->count() > 0, &cls_flags.samples_path);
      merge_option(cfg, "data", c_data->count() > 0, &cls_flags.data_dir);
      merge_option(cfg, "out", c_out->count() > 0, &cls_flags.out_path);
    }
    if (cls_flags.samples_path.empty() || cls_flags.data_dir.empty() ||
        cls_flags.out_path.empty()) {
      throw ValidationError("classify: --samples, --data and --out are required");
    }
    const PosteriorSamples samples = read_samples(cls_flags.samples_path);
    const DatasetBundle bundle = read_dataset(cls_flags.data_dir);
    Vector scores(bundle.dataset.size());
    for (int i = 0; i < bundle.dataset.size(); ++i) {
      scores[i] = classify(samples, bundle.dataset.networks[i]).probability;
    }
    write_scores_csv(cls_flags.out_path, scores, bundle.dataset.labels,
                     samples.config.seed);
    std::printf("scored %d networks -> %s\n", bundle.dataset.size(),
                cls_flags.out_path.c_str());
  });

  // ---------------------------------------------------------------- evaluate
  auto* evaluate = app.add_subcommand("evaluate", "metrics against truth/labels");
  struct {
    std::string config_path;
    std::string samples_path;
    std::string data_dir;
    std::string scores_path;
    std::string out_path;
    double edge_threshold = 0.05;
    double fdr = 0.05;
    int cv_folds = 0;
    FitFlags cv_fit;  // prior/mcmc settings when --cv is used
  } eval_flags;
  evaluate->add_option("--config", eval_flags.config_path, "JSON config to preload");
  auto* e_samples = evaluate->add_option("--samples", eval_flags.samples_path, "samples file");
  auto* e_data = evaluate->add_option("--data", eval_flags.data_dir, "dataset directory");
  auto* e_scores = evaluate->add_option("--scores", eval_flags.scores_path,
                                        "external scores CSV (index,score,label)");
  auto* e_out = evaluate->add_option("--out", eval_flags.out_path, "metrics CSV to write");
  auto* e_thr = evaluate->add_option("--edge-threshold", eval_flags.edge_threshold,
                                     "coefficient magnitude threshold");
  auto* e_fdr = evaluate->add_option("--fdr", eval_flags.fdr, "FDR level");
  auto* e_cv = evaluate->add_option("--cv", eval_flags.cv_folds,
                                    "run k-fold cross-validation instead");
  evaluate->add_option("--prior", eval_flags.cv_fit.prior, "bnlc or bnhc (with --cv)");
  evaluate->add_option("--r", eval_flags.cv_fit.rank, "max latent rank (with --cv)");
  evaluate->add_option("--iters", eval_flags.cv_fit.iters, "sweeps (with --cv)");
  evaluate->add_option("--burnin", eval_flags.cv_fit.burnin, "burn-in (with --cv)");
  evaluate->add_option("--thin", eval_flags.cv_fit.thin, "thinning (with --cv)");
  evaluate->add_option("--seed", eval_flags.cv_fit.seed, "seed (with --cv)");

  evaluate->callback([&] {
    if (!eval_flags.config_path.empty()) {
      const json cfg = load_config_file(eval_flags.config_path);
      merge_option(cfg, "samples", e_samples->count() > 0, &eval_flags.samples_path);
      merge_option(cfg, "data", e_data->count() > 0, &eval_flags.data_dir);
      merge_option(cfg, "scores", e_scores->count() > 0, &eval_flags.scores_path);
      merge_option(cfg, "out", e_out->count() > 0, &eval_flags.out_path);
      merge_option(cfg, "edge_threshold", e_thr->count() > 0, &eval_flags.edge_threshold);
      merge_option(cfg, "fdr", e_fdr->count() > 0, &eval_flags.fdr);
      merge_option(cfg, "cv", e_cv->count() > 0, &eval_flags.cv_folds);
    }
    if (eval_flags.out_path.empty()) throw ValidationError("evaluate: --out is required");

    // external score files evaluate to an AUC row on their own
    if (!eval_flags.scores_path.empty()) {
      std::vector<int> labels;
      const Vector scores = read_scores_csv(eval_flags.scores_path, &labels);
      const RocResult roc = roc_auc(scores, labels);
      std::ofstream out(eval_flags.out_path);
      if (!out) throw ValidationError("cannot write " + eval_flags.out_path);
      out << "# format_version=" << kFormatVersion << "\nauc\n"
          << format_double(roc.auc) << '\n';
      std::printf("external scores AUC %.4f\n", roc.auc);
      return;
    }

    if (eval_flags.data_dir.empty()) throw ValidationError("evaluate: --data is required");
    const DatasetBundle bundle = read_dataset(eval_flags.data_dir);

    if (eval_flags.cv_folds > 0) {
      const ShrinkagePrior prior = prior_from_flags(eval_flags.cv_fit);
      const McmcConfig config = mcmc_from_flags(eval_flags.cv_fit);
      const CvResult cv = kfold_cv(bundle.dataset, prior, config, eval_flags.cv_folds);
      write_scores_csv(eval_flags.out_path, cv.scores, cv.labels, config.seed);
      std::printf("%d-fold CV AUC %.4f\n", eval_flags.cv_folds, cv.auc);
      return;
    }

    if (eval_flags.samples_path.empty()) {
      throw ValidationError("evaluate: --samples is required (or use --cv/--scores)");
    }
    const PosteriorSamples samples = read_samples(eval_flags.samples_path);
    if (!bundle.truth) {
      throw ValidationError("evaluate: dataset has no truth sidecar; "
                            "use --scores or --cv instead");
    }
    // rebuild a GroundTruth view from the sidecar
    GroundTruth truth;
    truth.mu0 = bundle.truth->mu0;
    truth.active_nodes = bundle.truth->active_nodes;
    truth.active_residual_edges = bundle.truth->active_residual_edges;
    EdgeVector gamma;
    gamma.node_count = samples.node_count;
    gamma.values = bundle.truth->gamma_true / 2.0;
    truth.combined = devectorize(gamma);
    truth.low_rank = truth.combined;
    truth.residual = AdjacencyMatrix::zero(samples.node_count);
    truth.u0 = Matrix::Zero(samples.node_count, bundle.truth->true_rank);

    // in-sample classification scores for the AUC column
    MetricsReport report =
        evaluate_fit(samples, truth, bundle.dataset.networks,
                     bundle.dataset.labels, eval_flags.edge_threshold,
                     eval_flags.fdr);
    ExperimentCell cell;
    cell.preset = eval_flags.data_dir;
    cell.method = to_string(samples.prior.kind);
    cell.metrics = report;
    write_metrics_csv(eval_flags.out_path, {cell}, samples.config.seed);
    std::printf("mse %.4f edge tpr/fpr %.3f/%.3f auc %.4f reff mode %d\n",
                report.mse, report.edge_tpr, report.edge_fpr, report.auc,
                report.reff_mode);
  });

  // -------------------------------------------------------------- experiment
  auto* experiment = app.add_subcommand("experiment", "simulate/fit/evaluate grid");
  struct {
    std::string config_path;
    std::vector<std::string> presets{"sim1-case1"};
    std::vector<std::string> methods{"bnlc"};
    std::string out_dir;
    int iters = 50000;
    int burnin = 30000;
    int thin = 10;
    int test_n = 100;
    std::uint64_t seed = 1;
  } exp_flags;
  experiment->add_option("--config", exp_flags.config_path, "JSON config to preload");
  auto* x_presets = experiment->add_option("--presets", exp_flags.presets,
                                           "comma-separated scenario presets")
                        ->delimiter(',');
  auto* x_methods = experiment->add_option("--methods", exp_flags.methods,
                                           "comma-separated methods (bnlc,bnhc)")
                        ->delimiter(',');
  auto* x_out = experiment->add_option("--out", exp_flags.out_dir, "output directory");
  auto* x_iters = experiment->add_option("--iters", exp_flags.iters, "sweeps per fit");
  auto* x_burn = experiment->add_option("--burnin", exp_flags.burnin, "burn-in sweeps");
  auto* x_thin = experiment->add_option("--thin", exp_flags.thin, "thinning stride");
  auto* x_test = experiment->add_option("--test-n", exp_flags.test_n,
                                        "held-out subjects per cell");
  auto* x_seed = experiment->add_option("--seed", exp_flags.seed, "base seed");

  experiment->callback([&] {
    if (!exp_flags.config_path.empty()) {
      const json cfg = load_config_file(exp_flags.config_path);
      merge_option(cfg, "presets", x_presets->count() > 0, &exp_flags.presets);
      merge_option(cfg, "methods", x_methods->count() > 0, &exp_flags.methods);
      merge_option(cfg, "out", x_out->count() > 0, &exp_flags.out_dir);
      merge_option(cfg, "iters", x_iters->count() > 0, &exp_flags.iters);
      merge_option(cfg, "burnin", x_burn->count() > 0, &exp_flags.burnin);
      merge_option(cfg, "thin", x_thin->count() > 0, &exp_flags.thin);
      merge_option(cfg, "test_n", x_test->count() > 0, &exp_flags.test_n);
      merge_option(cfg, "seed", x_seed->count() > 0, &exp_flags.seed);
    }
    if (exp_flags.out_dir.empty()) throw ValidationError("experiment: --out is required");
    ExperimentOptions options;
    options.mcmc.iterations = exp_flags.iters;
    options.mcmc.burnin = exp_flags.burnin;
    options.mcmc.thin = exp_flags.thin;
    options.mcmc.seed = exp_flags.seed;
    options.test_subjects = exp_flags.test_n;
    options.data_seed = exp_flags.seed;

    const auto cells =
        experiment_table(exp_flags.presets, exp_flags.methods, options);
    fs::create_directories(exp_flags.out_dir);
    write_metrics_csv(fs::path(exp_flags.out_dir) / "table.csv", cells,
                      exp_flags.seed);
    for (const auto& cell : cells) {
      if (cell.failed || cell.metrics.roc.empty()) continue;
      write_roc_csv(fs::path(exp_flags.out_dir) /
                        ("roc_" + cell.preset + "_" + cell.method + ".csv"),
                    cell.metrics.roc, exp_flags.seed);
    }
    const json echo{{"command", "experiment"},
                    {"presets", exp_flags.presets},
                    {"methods", exp_flags.methods},
                    {"iters", exp_flags.iters},
                    {"burnin", exp_flags.burnin},
                    {"thin", exp_flags.thin},
                    {"test_n", exp_flags.test_n},
                    {"seed", exp_flags.seed},
                    {"out", exp_flags.out_dir}};
    write_config_file(fs::path(exp_flags.out_dir) / "run.json", echo);
    for (const auto& cell : cells) {
      if (cell.failed) {
        std::printf("%-12s %-6s FAILED: %s\n", cell.preset.c_str(),
                    cell.method.c_str(), cell.error.c_str());
      } else {
        std::printf("%-12s %-6s mse %.4f auc %.4f reff %d\n", cell.preset.c_str(),
                    cell.method.c_str(), cell.metrics.mse, cell.metrics.auc,
                    cell.metrics.reff_mode);
      }
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitValidation;
  } catch (const ValidationError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitValidation;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitRuntime;
  }
  return 0;
}
