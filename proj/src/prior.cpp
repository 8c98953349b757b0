#include "netclass/prior.hpp"

namespace netclass {

std::string to_string(PriorKind kind) {
  return kind == PriorKind::kLasso ? "bnlc" : "bnhc";
}

PriorKind prior_kind_from_string(const std::string& name) {
  if (name == "bnlc" || name == "lasso") return PriorKind::kLasso;
  if (name == "bnhc" || name == "horseshoe") return PriorKind::kHorseshoe;
  throw ValidationError("unknown prior kind '" + name + "' (want bnlc or bnhc)");
}

namespace {

void check_common(int max_rank, double nu, double a_delta, double b_delta,
                  double eta) {
  if (max_rank < 1) throw ValidationError("prior: max rank must be >= 1");
  if (!(nu > max_rank - 1)) {
    throw ValidationError("prior: nu must exceed R - 1 (nu=" + std::to_string(nu) +
                          ", R=" + std::to_string(max_rank) + ")");
  }
  if (!(a_delta > 0.0) || !(b_delta > 0.0)) {
    throw ValidationError("prior: Beta shapes for delta must be positive");
  }
  if (!(eta > 1.0)) throw ValidationError("prior: eta must exceed 1");
}

}  // namespace

void PriorSpecLasso::validate() const {
  check_common(max_rank, nu, a_delta, b_delta, eta);
  if (!(zeta > 0.0) || !(iota > 0.0)) {
    throw ValidationError("prior: zeta and iota must be positive");
  }
}

void PriorSpecHorseshoe::validate() const {
  check_common(max_rank, nu, a_delta, b_delta, eta);
}

ShrinkagePrior ShrinkagePrior::from(const PriorSpecLasso& spec) {
  spec.validate();
  ShrinkagePrior p;
  p.kind = PriorKind::kLasso;
  p.max_rank = spec.max_rank;
  p.nu = spec.nu;
  p.a_delta = spec.a_delta;
  p.b_delta = spec.b_delta;
  p.eta = spec.eta;
  p.zeta = spec.zeta;
  p.iota = spec.iota;
  return p;
}

ShrinkagePrior ShrinkagePrior::from(const PriorSpecHorseshoe& spec) {
  spec.validate();
  ShrinkagePrior p;
  p.kind = PriorKind::kHorseshoe;
  p.max_rank = spec.max_rank;
  p.nu = spec.nu;
  p.a_delta = spec.a_delta;
  p.b_delta = spec.b_delta;
  p.eta = spec.eta;
  return p;
}

void ShrinkagePrior::validate() const {
  check_common(max_rank, nu, a_delta, b_delta, eta);
  if (kind == PriorKind::kLasso && (!(zeta > 0.0) || !(iota > 0.0))) {
    throw ValidationError("prior: zeta and iota must be positive");
  }
}

void McmcConfig::validate() const {
  if (iterations < 1) throw ValidationError("mcmc: iterations must be >= 1");
  if (burnin < 0 || burnin >= iterations) {
    throw ValidationError("mcmc: burn-in must lie in [0, iterations)");
  }
  if (thin < 1) throw ValidationError("mcmc: thinning stride must be >= 1");
  if (chains < 1) throw ValidationError("mcmc: chain count must be >= 1");
  if (!(mu_prior_var > 0.0)) {
    throw ValidationError("mcmc: intercept prior variance must be positive");
  }
  if (warm_sweeps < 0) throw ValidationError("mcmc: warm sweeps must be >= 0");
  if (latent_subsweeps < 1) {
    throw ValidationError("mcmc: latent subsweeps must be >= 1");
  }
}

}  // namespace netclass
