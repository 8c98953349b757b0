#include "netclass/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "netclass/special_rand.hpp"
#include "netclass/util.hpp"

namespace netclass {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) {
  return std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
}

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

// log density of x ~ InvGamma(shape, rate), up to the normalizing constant
double log_inv_gamma_kernel(double x, double shape, double rate) {
  return -(shape + 1.0) * std::log(x) - rate / x;
}

double lower_triangular_logdet(const Eigen::LLT<Matrix>& llt) {
  const Matrix lower = llt.matrixL();
  double logdet = 0.0;
  for (int i = 0; i < lower.rows(); ++i) logdet += 2.0 * std::log(lower(i, i));
  return logdet;
}

}  // namespace

int ChainState::active_node_count() const {
  int count = 0;
  for (auto flag : node_active) count += flag;
  return count;
}

int ChainState::active_rank_count() const {
  int count = 0;
  for (auto flag : rank_active) count += flag;
  return count;
}

GibbsSampler::GibbsSampler(const NetworkDataset& data,
                           const ShrinkagePrior& prior, double mu_prior_var)
    : GibbsSampler(data.networks.empty() ? 1 : data.node_count(), data, prior,
                   mu_prior_var) {}

GibbsSampler::GibbsSampler(int node_count, const NetworkDataset& data,
                           const ShrinkagePrior& prior, double mu_prior_var)
    : prior_(prior), mu_prior_var_(mu_prior_var) {
  prior_.validate();
  if (!(mu_prior_var_ > 0.0)) {
    throw ValidationError("sampler: intercept prior variance must be positive");
  }
  data.validate();
  if (node_count < 1) throw ValidationError("sampler: node count must be >= 1");
  if (!data.networks.empty() && data.node_count() != node_count) {
    throw ValidationError("sampler: explicit node count disagrees with data");
  }
  n_ = data.size();
  v_ = node_count;
  q_ = edge_count(v_);
  if (n_ > 0) {
    design_ = data.design_matrix();
  } else {
    design_ = Matrix::Zero(0, q_);
  }
  set_labels(data.labels);
}

void GibbsSampler::set_labels(const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != n_) {
    throw ValidationError("sampler: label count mismatch");
  }
  labels_ = labels;
  resp_shift_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw ValidationError("sampler: labels must be binary");
    }
    resp_shift_[i] = labels[i] - 0.5;
  }
}

ChainState GibbsSampler::flat_initial_state(RngStream& rng) const {
  const int r = prior_.max_rank;
  ChainState s;
  // intercept starts at the logit of the label mean, guarded for
  // single-class and empty data
  if (n_ > 0) {
    double mean = 0.0;
    for (int label : labels_) mean += label;
    mean /= n_;
    const double lo = 1.0 / (n_ + 1.0);
    mean = std::min(1.0 - lo, std::max(lo, mean));
    s.intercept = std::log(mean / (1.0 - mean));
  }
  s.edge_coef = Vector::Zero(q_);
  s.latent_pos.resize(v_, r);
  for (int k = 0; k < v_; ++k)
    for (int j = 0; j < r; ++j) s.latent_pos(k, j) = rng.normal(0.0, std::sqrt(0.1));
  s.node_active.assign(v_, 1);
  s.rank_active.assign(r, 1);
  s.rank_prob = Vector::Constant(r, 0.5);
  s.local_var = Vector::Ones(q_);
  s.node_prob = 0.5;
  s.latent_cov = Matrix::Identity(r, r);
  s.global_rate = 1.0;
  s.global_var = 1.0;
  s.local_aux = Vector::Ones(q_);
  s.global_aux = 1.0;
  s.pg_weight.resize(n_);
  const Vector psi = linear_predictors(s);
  for (int i = 0; i < n_; ++i) {
    s.pg_weight[i] = sample_polya_gamma(1, psi[i], rng);
  }
  return s;
}

ChainState GibbsSampler::initial_state(RngStream& rng) const {
  ChainState s = flat_initial_state(rng);
  if (n_ == 0 || q_ == 0) return s;

  // iteratively reweighted ridge: the deterministic skeleton of the
  // omega/mu/gamma sweep, enough to land in the basin the chain samples
  Vector gamma = Vector::Zero(q_);
  double mu = s.intercept;
  for (int pass = 0; pass < 8; ++pass) {
    Vector psi = Vector::Constant(n_, mu);
    psi.noalias() += design_ * gamma;
    Vector weight(n_);
    for (int i = 0; i < n_; ++i) {
      const double p = std::abs(psi[i]);
      // E[PG(1, psi)] = tanh(psi/2) / (2 psi)
      weight[i] = p < 1e-4 ? 0.25 : std::tanh(p / 2.0) / (2.0 * p);
    }
    Matrix penalized = Matrix::Zero(q_, q_);
    Matrix scaled = design_;
    for (int i = 0; i < n_; ++i) scaled.row(i) *= std::sqrt(weight[i]);
    penalized.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    penalized.diagonal().array() += 1.0;  // unit ridge
    Vector rhs(n_);
    for (int i = 0; i < n_; ++i) rhs[i] = resp_shift_[i] - mu * weight[i];
    gamma = Eigen::LLT<Matrix>(penalized).solve(design_.transpose() * rhs);
    const double wsum = weight.sum();
    double linear = 0.0;
    const Vector xg = design_ * gamma;
    for (int i = 0; i < n_; ++i) linear += resp_shift_[i] - weight[i] * xg[i];
    if (wsum > 0.0) mu = linear / wsum;
  }
  s.intercept = mu;
  s.edge_coef = gamma;

  // seed the latent positions with the leading nonnegative eigenpairs of
  // the implied symmetric coefficient matrix
  const int r = prior_.max_rank;
  Matrix coef = Matrix::Zero(v_, v_);
  int e = 0;
  for (int k = 0; k < v_; ++k) {
    for (int l = k + 1; l < v_; ++l) {
      coef(k, l) = gamma[e];
      coef(l, k) = gamma[e];
      ++e;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eigen(coef);
  s.latent_pos.setZero();
  for (int j = 0; j < r; ++j) {
    const int top = v_ - 1 - j;  // eigenvalues sorted ascending
    if (top < 0) break;
    const double value = eigen.eigenvalues()[top];
    if (value <= 0.0) break;
    s.latent_pos.col(j) = std::sqrt(value) * eigen.eigenvectors().col(top);
  }
  // tiny jitter keeps exact zeros out of active rows
  for (int k = 0; k < v_; ++k) {
    for (int j = 0; j < r; ++j) {
      s.latent_pos(k, j) += rng.normal(0.0, 0.01);
    }
  }
  Matrix scatter = prior_.latent_scale() * Matrix::Identity(r, r);
  for (int k = 0; k < v_; ++k) {
    scatter.noalias() += s.latent_pos.row(k).transpose() * s.latent_pos.row(k);
  }
  const double divisor = prior_.nu + v_ - r - 1.0;
  s.latent_cov = scatter / std::max(divisor, 1.0);

  const Vector psi = linear_predictors(s);
  for (int i = 0; i < n_; ++i) {
    s.pg_weight[i] = sample_polya_gamma(1, psi[i], rng);
  }
  return s;
}

ChainState GibbsSampler::sample_prior_state(RngStream& rng) const {
  if (!std::isfinite(mu_prior_var_)) {
    throw ValidationError(
        "prior-state draw needs a proper (finite-variance) intercept prior");
  }
  const int r = prior_.max_rank;
  ChainState s;
  s.latent_cov = sample_inverse_wishart(
      prior_.nu, prior_.latent_scale() * Matrix::Identity(r, r), rng);
  s.node_prob = rng.beta(prior_.a_delta, prior_.b_delta);
  s.node_active.assign(v_, 0);
  s.latent_pos = Matrix::Zero(v_, r);
  const Eigen::LLT<Matrix> cov_llt =
      cholesky_with_jitter(s.latent_cov, "latent covariance");
  for (int k = 0; k < v_; ++k) {
    if (rng.bernoulli(s.node_prob)) {
      s.node_active[k] = 1;
      Vector z(r);
      for (int j = 0; j < r; ++j) z[j] = rng.normal();
      s.latent_pos.row(k) = (cov_llt.matrixL() * z).transpose();
    }
  }
  s.rank_prob.resize(r);
  s.rank_active.assign(r, 0);
  for (int j = 0; j < r; ++j) {
    s.rank_prob[j] = rng.beta(1.0, std::pow(j + 1.0, prior_.eta));
    s.rank_active[j] = rng.bernoulli(s.rank_prob[j]) ? 1 : 0;
  }
  s.local_var.resize(q_);
  if (prior_.kind == PriorKind::kLasso) {
    s.global_rate = rng.gamma(prior_.zeta, prior_.iota);
    for (int e = 0; e < q_; ++e) {
      s.local_var[e] = rng.exponential() / (s.global_rate / 2.0);
    }
  } else {
    s.local_aux.resize(q_);
    for (int e = 0; e < q_; ++e) {
      s.local_aux[e] = rng.inverse_gamma(0.5, 1.0);
      s.local_var[e] = rng.inverse_gamma(0.5, 1.0 / s.local_aux[e]);
    }
    s.global_aux = rng.inverse_gamma(0.5, 1.0);
    s.global_var = rng.inverse_gamma(0.5, 1.0 / s.global_aux);
  }
  const Vector mean = rank_means(s);
  const Vector var = edge_variances(s);
  s.edge_coef.resize(q_);
  for (int e = 0; e < q_; ++e) {
    s.edge_coef[e] = rng.normal(mean[e], std::sqrt(var[e]));
  }
  s.intercept = rng.normal(0.0, std::sqrt(mu_prior_var_));
  s.pg_weight.resize(n_);
  const Vector psi = linear_predictors(s);
  for (int i = 0; i < n_; ++i) {
    s.pg_weight[i] = sample_polya_gamma(1, psi[i], rng);
  }
  return s;
}

std::vector<int> GibbsSampler::draw_labels(const ChainState& state,
                                           RngStream& rng) const {
  const Vector psi = linear_predictors(state);
  std::vector<int> labels(n_);
  for (int i = 0; i < n_; ++i) {
    labels[i] = rng.bernoulli(logistic(psi[i])) ? 1 : 0;
  }
  return labels;
}

Vector GibbsSampler::linear_predictors(const ChainState& state) const {
  Vector psi = Vector::Constant(n_, state.intercept);
  if (q_ > 0 && n_ > 0) psi.noalias() += design_ * state.edge_coef;
  return psi;
}

Vector GibbsSampler::rank_means(const ChainState& state) const {
  Matrix masked = state.latent_pos;
  for (int j = 0; j < prior_.max_rank; ++j) {
    if (!state.rank_active[j]) masked.col(j).setZero();
  }
  Vector mean(q_);
  int e = 0;
  for (int k = 0; k < v_; ++k) {
    for (int l = k + 1; l < v_; ++l) {
      mean[e++] = masked.row(k).dot(state.latent_pos.row(l));
    }
  }
  return mean;
}

Vector GibbsSampler::edge_variances(const ChainState& state) const {
  if (prior_.kind == PriorKind::kHorseshoe) {
    return state.global_var * state.local_var;
  }
  return state.local_var;
}

void GibbsSampler::update_omega(ChainState& state, RngStream& rng) const {
  const Vector psi = linear_predictors(state);
  for (int i = 0; i < n_; ++i) {
    state.pg_weight[i] = sample_polya_gamma(1, psi[i], rng);
  }
}

void GibbsSampler::update_mu(ChainState& state, RngStream& rng) const {
  // conjugate Gaussian: precision 1'Omega 1 (+ prior), linear term
  // 1'Omega(t - X gamma) = sum(k_i - omega_i x_i'gamma)
  double precision = std::isfinite(mu_prior_var_) ? 1.0 / mu_prior_var_ : 0.0;
  double linear = 0.0;
  if (n_ > 0) {
    Vector xg = Vector::Zero(n_);
    if (q_ > 0) xg.noalias() = design_ * state.edge_coef;
    for (int i = 0; i < n_; ++i) {
      precision += state.pg_weight[i];
      linear += resp_shift_[i] - state.pg_weight[i] * xg[i];
    }
  }
  if (precision <= 0.0) return;  // flat prior, no data: conditional improper
  state.intercept = rng.normal(linear / precision, std::sqrt(1.0 / precision));
}

Vector GibbsSampler::gamma_draw_dense(const ChainState& state,
                                      const Vector& prior_mean,
                                      const Vector& prior_var,
                                      RngStream& rng) const {
  Matrix post_precision = Matrix::Zero(q_, q_);
  Vector linear = prior_mean.cwiseQuotient(prior_var);
  if (n_ > 0) {
    Matrix scaled = design_;
    for (int i = 0; i < n_; ++i) {
      scaled.row(i) *= std::sqrt(state.pg_weight[i]);
    }
    post_precision.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    post_precision = post_precision.selfadjointView<Eigen::Lower>();
    // X' Omega (t - mu 1) = X'(k - mu omega)
    Vector resid(n_);
    for (int i = 0; i < n_; ++i) {
      resid[i] = resp_shift_[i] - state.intercept * state.pg_weight[i];
    }
    linear.noalias() += design_.transpose() * resid;
  }
  post_precision.diagonal() += prior_var.cwiseInverse();
  return sample_mvn_precision(linear, post_precision, rng);
}

Vector GibbsSampler::gamma_draw_aux(const ChainState& state,
                                    const Vector& prior_mean,
                                    const Vector& prior_var,
                                    RngStream& rng) const {
  // q >> n sampler: one n x n factorization instead of q x q.
  Vector sqrt_w(n_);
  for (int i = 0; i < n_; ++i) sqrt_w[i] = std::sqrt(state.pg_weight[i]);
  const Matrix phi = sqrt_w.asDiagonal() * design_;
  Vector alpha(n_);
  for (int i = 0; i < n_; ++i) {
    alpha[i] = (resp_shift_[i] - state.intercept * state.pg_weight[i]) / sqrt_w[i];
  }
  alpha.noalias() -= phi * prior_mean;

  Vector prior_draw(q_);
  for (int e = 0; e < q_; ++e) {
    prior_draw[e] = rng.normal(0.0, std::sqrt(prior_var[e]));
  }
  Vector noise(n_);
  for (int i = 0; i < n_; ++i) noise[i] = rng.normal();

  Matrix gram = Matrix::Identity(n_, n_);
  const Matrix phi_scaled = phi * prior_var.cwiseSqrt().asDiagonal();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(phi_scaled);
  gram = gram.selfadjointView<Eigen::Lower>();

  const Eigen::LLT<Matrix> llt = cholesky_with_jitter(gram, "gamma gram matrix");
  const Vector correction = llt.solve(alpha - phi * prior_draw - noise);
  return prior_mean + prior_draw +
         prior_var.cwiseProduct(phi.transpose() * correction);
}

void GibbsSampler::update_gamma(ChainState& state, RngStream& rng) const {
  if (q_ == 0) return;
  const Vector prior_mean = rank_means(state);
  const Vector prior_var = edge_variances(state);
  // dense Cholesky when the precision is small enough to factor each
  // sweep; otherwise the auxiliary-variable route that costs O(n^2 q)
  if (q_ <= 1024 || q_ <= n_) {
    state.edge_coef = gamma_draw_dense(state, prior_mean, prior_var, rng);
  } else {
    state.edge_coef = gamma_draw_aux(state, prior_mean, prior_var, rng);
  }
}

void GibbsSampler::update_local_scales(ChainState& state, RngStream& rng) const {
  const Vector mean = rank_means(state);
  for (int e = 0; e < q_; ++e) {
    const double resid = state.edge_coef[e] - mean[e];
    GigParams params;
    params.p = 0.5;
    params.a = resid * resid;
    params.b = state.global_rate;
    state.local_var[e] = sample_gig(params, rng);
  }
  const double shape = prior_.zeta + q_;
  const double rate = prior_.iota + 0.5 * state.local_var.sum();
  state.global_rate = rng.gamma(shape, rate);
}

void GibbsSampler::update_local_scales_hs(ChainState& state,
                                          RngStream& rng) const {
  const Vector mean = rank_means(state);
  for (int e = 0; e < q_; ++e) {
    const double resid = state.edge_coef[e] - mean[e];
    const double rate =
        1.0 / state.local_aux[e] + resid * resid / (2.0 * state.global_var);
    state.local_var[e] = rng.inverse_gamma(1.0, rate);
    state.local_aux[e] = rng.inverse_gamma(1.0, 1.0 + 1.0 / state.local_var[e]);
  }
}

void GibbsSampler::update_global_scale_hs(ChainState& state,
                                          RngStream& rng) const {
  const Vector mean = rank_means(state);
  double rate = 1.0 / state.global_aux;
  for (int e = 0; e < q_; ++e) {
    const double resid = state.edge_coef[e] - mean[e];
    rate += resid * resid / (2.0 * state.local_var[e]);
  }
  const double shape = 0.5 + 0.5 * q_;
  state.global_var = rng.inverse_gamma(shape, rate);
  state.global_aux = rng.inverse_gamma(1.0, 1.0 + 1.0 / state.global_var);
}

NodeConditional GibbsSampler::node_conditional(int node,
                                               const ChainState& state) const {
  const int r = prior_.max_rank;
  const int m = v_ - 1;
  // horseshoe scales the slab by the global variance; lasso does not
  const double scale =
      prior_.kind == PriorKind::kHorseshoe ? state.global_var : 1.0;

  Matrix others(m, r);   // rows: lambda ⊙ u_j for j != node
  Vector incident(m);    // gamma over edges touching node
  Vector inv_var(m);     // 1/s^2 over the same edges
  int row = 0;
  for (int j = 0; j < v_; ++j) {
    if (j == node) continue;
    for (int c = 0; c < r; ++c) {
      others(row, c) = state.rank_active[c] ? state.latent_pos(j, c) : 0.0;
    }
    const int e = j < node ? edge_index(v_, j, node) : edge_index(v_, node, j);
    incident[row] = state.edge_coef[e];
    inv_var[row] = 1.0 / state.local_var[e];
    ++row;
  }

  Eigen::LLT<Matrix> cov_llt(state.latent_cov);
  if (cov_llt.info() != Eigen::Success) {
    throw NumericalError("node " + std::to_string(node + 1) +
                         ": latent covariance is not positive-definite");
  }
  const Matrix cov_inv = cov_llt.solve(Matrix::Identity(r, r));
  const double logdet_cov = lower_triangular_logdet(cov_llt);

  Matrix slab_precision = cov_inv;
  const Matrix weighted = inv_var.asDiagonal() * others;  // H^{-1} U*
  slab_precision.noalias() += others.transpose() * weighted / scale;
  slab_precision = 0.5 * (slab_precision + slab_precision.transpose()).eval();
  const Vector shifted = weighted.transpose() * incident / scale;  // U*'H^{-1}g/scale

  Eigen::LLT<Matrix> prec_llt(slab_precision);
  if (prec_llt.info() != Eigen::Success) {
    throw NumericalError("node " + std::to_string(node + 1) +
                         ": slab precision factorization failed");
  }
  const double logdet_prec = lower_triangular_logdet(prec_llt);

  // marginal log-densities of the incident coefficients under spike
  // (N(0, scale*H)) and slab (N(0, scale*H + U* Q U*')), via the
  // determinant and Woodbury identities so only R x R factors appear
  double log_quad_base = 0.0;
  double logdet_base = 0.0;
  for (int i = 0; i < m; ++i) {
    const double var = scale / inv_var[i];
    logdet_base += std::log(var);
    log_quad_base += incident[i] * incident[i] / var;
  }
  const double log_spike = -0.5 * (m * kLog2Pi + logdet_base + log_quad_base);
  const Vector solved = prec_llt.solve(shifted);
  const double quad_slab = log_quad_base - shifted.dot(solved);
  const double logdet_slab = logdet_base + logdet_cov + logdet_prec;
  const double log_slab = -0.5 * (m * kLog2Pi + logdet_slab + quad_slab);

  const double log_w_spike = std::log1p(-state.node_prob) + log_spike;
  const double log_w_slab = std::log(state.node_prob) + log_slab;
  const double shift = std::max(log_w_spike, log_w_slab);

  NodeConditional out;
  const double spike_term = std::exp(log_w_spike - shift);
  const double slab_term = std::exp(log_w_slab - shift);
  out.spike_prob = clamp_prob(spike_term / (spike_term + slab_term));
  out.slab_precision = slab_precision;
  out.slab_mean = solved;
  return out;
}

void GibbsSampler::update_latent_positions(ChainState& state,
                                           RngStream& rng) const {
  const int r = prior_.max_rank;
  for (int k = 0; k < v_; ++k) {
    const NodeConditional cond = node_conditional(k, state);
    if (rng.bernoulli(1.0 - cond.spike_prob)) {
      state.node_active[k] = 1;
      const Eigen::LLT<Matrix> llt =
          cholesky_with_jitter(cond.slab_precision, "slab precision");
      Vector z(r);
      for (int c = 0; c < r; ++c) z[c] = rng.normal();
      state.latent_pos.row(k) =
          (cond.slab_mean + llt.matrixU().solve(z)).transpose();
    } else {
      state.node_active[k] = 0;
      state.latent_pos.row(k).setZero();
    }
  }
}

void GibbsSampler::update_node_sparsity(ChainState& state,
                                        RngStream& rng) const {
  const int active = state.active_node_count();
  state.node_prob =
      rng.beta(prior_.a_delta + active, prior_.b_delta + (v_ - active));
}

void GibbsSampler::update_latent_cov(ChainState& state, RngStream& rng) const {
  const int r = prior_.max_rank;
  Matrix scale = prior_.latent_scale() * Matrix::Identity(r, r);
  int active = 0;
  for (int k = 0; k < v_; ++k) {
    if (!state.node_active[k]) continue;
    ++active;
    scale.noalias() +=
        state.latent_pos.row(k).transpose() * state.latent_pos.row(k);
  }
  state.latent_cov = sample_inverse_wishart(prior_.nu + active, scale, rng);
}

double GibbsSampler::rank_log_odds(int rank, const ChainState& state) const {
  const Vector var = edge_variances(state);
  // W with this rank forced off, plus the rank's contribution
  ChainState probe = state;  // cheap view would do; states are small
  probe.rank_active[rank] = 0;
  const Vector base = rank_means(probe);
  Vector bump(q_);
  int e = 0;
  for (int k = 0; k < v_; ++k) {
    for (int l = k + 1; l < v_; ++l) {
      bump[e++] = state.latent_pos(k, rank) * state.latent_pos(l, rank);
    }
  }
  double log_on = std::log(state.rank_prob[rank]);
  double log_off = std::log1p(-state.rank_prob[rank]);
  for (int j = 0; j < q_; ++j) {
    log_on += log_normal_pdf(state.edge_coef[j], base[j] + bump[j], var[j]);
    log_off += log_normal_pdf(state.edge_coef[j], base[j], var[j]);
  }
  return log_on - log_off;
}

void GibbsSampler::update_rank_indicators(ChainState& state,
                                          RngStream& rng) const {
  for (int rank = 0; rank < prior_.max_rank; ++rank) {
    const double odds = rank_log_odds(rank, state);
    const double p_on = clamp_prob(logistic(odds));
    state.rank_active[rank] = rng.bernoulli(p_on) ? 1 : 0;
    const double on = state.rank_active[rank] ? 1.0 : 0.0;
    state.rank_prob[rank] =
        rng.beta(on + 1.0, 1.0 - on + std::pow(rank + 1.0, prior_.eta));
  }
}

void GibbsSampler::sweep(ChainState& state, RngStream& rng) const {
  update_omega(state, rng);
  update_mu(state, rng);
  update_gamma(state, rng);
  if (prior_.kind == PriorKind::kLasso) {
    update_local_scales(state, rng);
  } else {
    update_local_scales_hs(state, rng);
    update_global_scale_hs(state, rng);
  }
  update_latent_positions(state, rng);
  update_node_sparsity(state, rng);
  update_latent_cov(state, rng);
  update_rank_indicators(state, rng);
}

double GibbsSampler::log_joint(const ChainState& state) const {
  double lp = 0.0;
  const Vector psi = linear_predictors(state);
  for (int i = 0; i < n_; ++i) {
    lp += labels_[i] * psi[i] - log1p_exp(psi[i]);
  }
  const Vector mean = rank_means(state);
  const Vector var = edge_variances(state);
  for (int e = 0; e < q_; ++e) {
    lp += log_normal_pdf(state.edge_coef[e], mean[e], var[e]);
  }
  if (prior_.kind == PriorKind::kLasso) {
    const double half_rate = state.global_rate / 2.0;
    for (int e = 0; e < q_; ++e) {
      lp += std::log(half_rate) - half_rate * state.local_var[e];
    }
    lp += (prior_.zeta - 1.0) * std::log(state.global_rate) -
          prior_.iota * state.global_rate;
  } else {
    for (int e = 0; e < q_; ++e) {
      // s^2 | nu ~ IG(1/2, 1/nu), nu ~ IG(1/2, 1); keep the 1/nu factor
      // from the conditional's normalizer so exponents stay exact
      lp += log_inv_gamma_kernel(state.local_var[e], 0.5,
                                 1.0 / state.local_aux[e]) -
            0.5 * std::log(state.local_aux[e]) +
            log_inv_gamma_kernel(state.local_aux[e], 0.5, 1.0);
    }
    lp += log_inv_gamma_kernel(state.global_var, 0.5, 1.0 / state.global_aux) -
          0.5 * std::log(state.global_aux) +
          log_inv_gamma_kernel(state.global_aux, 0.5, 1.0);
  }
  const Eigen::LLT<Matrix> cov_llt(state.latent_cov);
  if (cov_llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  const int r = prior_.max_rank;
  const double logdet_cov = lower_triangular_logdet(cov_llt);
  for (int k = 0; k < v_; ++k) {
    if (state.node_active[k]) {
      const Vector u = state.latent_pos.row(k).transpose();
      lp += -0.5 * (r * kLog2Pi + logdet_cov + u.dot(cov_llt.solve(u)));
      lp += std::log(state.node_prob);
    } else {
      lp += std::log1p(-state.node_prob);
    }
  }
  // inverse-Wishart kernel and Beta priors
  lp += -0.5 * (prior_.nu + r + 1.0) * logdet_cov -
        0.5 * prior_.latent_scale() *
            cov_llt.solve(Matrix::Identity(r, r)).trace();
  lp += (prior_.a_delta - 1.0) * std::log(state.node_prob) +
        (prior_.b_delta - 1.0) * std::log1p(-state.node_prob);
  for (int j = 0; j < r; ++j) {
    lp += state.rank_active[j] ? std::log(state.rank_prob[j])
                               : std::log1p(-state.rank_prob[j]);
    lp += (std::pow(j + 1.0, prior_.eta) - 1.0) * std::log1p(-state.rank_prob[j]);
  }
  if (std::isfinite(mu_prior_var_)) {
    lp += log_normal_pdf(state.intercept, 0.0, mu_prior_var_);
  }
  return lp;
}

void GibbsSampler::check_state(const ChainState& state) const {
  for (int k = 0; k < v_; ++k) {
    const bool zero_row = state.latent_pos.row(k).isZero(0.0);
    if (static_cast<bool>(state.node_active[k]) == zero_row) {
      throw NumericalError("state check: node " + std::to_string(k + 1) +
                           " activity flag disagrees with its position row");
    }
  }
  if (!(state.local_var.minCoeff() > 0.0)) {
    throw NumericalError("state check: nonpositive local variance");
  }
  if (n_ > 0 && !(state.pg_weight.minCoeff() > 0.0)) {
    throw NumericalError("state check: nonpositive augmentation weight");
  }
  if (prior_.kind == PriorKind::kLasso && !(state.global_rate > 0.0)) {
    throw NumericalError("state check: nonpositive global rate");
  }
  if (prior_.kind == PriorKind::kHorseshoe &&
      (!(state.global_var > 0.0) || !(state.global_aux > 0.0) ||
       !(state.local_aux.minCoeff() > 0.0))) {
    throw NumericalError("state check: nonpositive horseshoe scale");
  }
  const Eigen::LLT<Matrix> llt(state.latent_cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("state check: latent covariance lost definiteness");
  }
  const double lp = log_joint(state);
  if (!std::isfinite(lp)) {
    throw NumericalError("state check: log joint density is not finite");
  }
}

namespace {

struct ChainResult {
  Vector intercept;
  Matrix edge_coef;
  ByteMatrix node_active;
  ByteMatrix rank_active;
};

ChainResult run_single_chain(const GibbsSampler& sampler,
                             const McmcConfig& config, std::uint64_t stream) {
  const int kept = (config.iterations - config.burnin) / config.thin;
  ChainResult out;
  out.intercept.resize(kept);
  out.edge_coef.resize(kept, sampler.edge_dim());
  out.node_active.resize(kept, sampler.node_count());
  out.rank_active.resize(kept, sampler.max_rank());

  RngStream rng(config.seed, stream);
  ChainState state = sampler.initial_state(rng);
  // warm phase: ranks held on while the latent columns align
  for (int warm = 0; warm < config.warm_sweeps; ++warm) {
    sampler.sweep(state, rng);
    std::fill(state.rank_active.begin(), state.rank_active.end(), 1);
  }
  int row = 0;
  for (int iter = 1; iter <= config.iterations; ++iter) {
    try {
      sampler.sweep(state, rng);
      for (int repeat = 1; repeat < config.latent_subsweeps; ++repeat) {
        sampler.update_latent_positions(state, rng);
        sampler.update_node_sparsity(state, rng);
        sampler.update_latent_cov(state, rng);
        sampler.update_rank_indicators(state, rng);
      }
      if (iter > config.burnin && (iter - config.burnin) % config.thin == 0 &&
          row < kept) {
        sampler.check_state(state);
        out.intercept[row] = state.intercept;
        out.edge_coef.row(row) = state.edge_coef.transpose();
        for (int k = 0; k < sampler.node_count(); ++k) {
          out.node_active(row, k) = state.node_active[k];
        }
        for (int r = 0; r < sampler.max_rank(); ++r) {
          out.rank_active(row, r) = state.rank_active[r];
        }
        ++row;
      }
    } catch (const std::exception& err) {
      throw NumericalError("chain " + std::to_string(stream) + ", iteration " +
                           std::to_string(iter) + ": " + err.what());
    }
  }
  return out;
}

}  // namespace

PosteriorSamples run_chain(const NetworkDataset& data,
                           const ShrinkagePrior& prior,
                           const McmcConfig& config) {
  config.validate();
  const GibbsSampler sampler(data, prior, config.mu_prior_var);
  const int kept = (config.iterations - config.burnin) / config.thin;
  if (kept < 1) {
    throw ValidationError("mcmc: configuration retains no draws");
  }

  std::vector<ChainResult> results(config.chains);
  run_parallel(config.chains, [&](int chain) {
    results[chain] = run_single_chain(sampler, config, chain);
  });

  PosteriorSamples samples;
  samples.node_count = sampler.node_count();
  samples.max_rank = sampler.max_rank();
  samples.prior = prior;
  samples.config = config;
  samples.chains = config.chains;
  samples.draws_per_chain = kept;
  const int total = kept * config.chains;
  samples.intercept.resize(total);
  samples.edge_coef.resize(total, sampler.edge_dim());
  samples.node_active.resize(total, sampler.node_count());
  samples.rank_active.resize(total, sampler.max_rank());
  for (int chain = 0; chain < config.chains; ++chain) {
    const int offset = chain * kept;
    samples.intercept.segment(offset, kept) = results[chain].intercept;
    samples.edge_coef.middleRows(offset, kept) = results[chain].edge_coef;
    samples.node_active.middleRows(offset, kept) = results[chain].node_active;
    samples.rank_active.middleRows(offset, kept) = results[chain].rank_active;
  }
  samples.validate();
  return samples;
}

PosteriorSamples run_chain_bnlc(const NetworkDataset& data,
                                const PriorSpecLasso& prior,
                                const McmcConfig& config) {
  return run_chain(data, ShrinkagePrior::from(prior), config);
}

PosteriorSamples run_chain_bnhc(const NetworkDataset& data,
                                const PriorSpecHorseshoe& prior,
                                const McmcConfig& config) {
  return run_chain(data, ShrinkagePrior::from(prior), config);
}

}  // namespace netclass
