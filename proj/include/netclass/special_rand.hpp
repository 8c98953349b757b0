#pragma once

#include "netclass/rng.hpp"
#include "netclass/types.hpp"

namespace netclass {

// Exact Polya-Gamma PG(1, c) draw by the alternating-series accept/reject
// scheme (Devroye-type; Windle Algorithm 6). Only b = 1 is supported.
// E[PG(1, c)] = tanh(c/2) / (2c), with limit 1/4 at c = 0.
double sample_polya_gamma(int b_param, double c, RngStream& rng);

// Generalized inverse Gaussian under the density convention
//   f(x) ∝ x^{p-1} exp(-(a/x + b x)/2),  x > 0,
// with a the coefficient of 1/x and b the coefficient of x.
struct GigParams {
  double p = 0.5;
  double a = 0.0;
  double b = 0.0;

  void validate() const;
};

// Only p = 1/2 is implemented (all the model needs): X = 1/Y with
// Y ~ InverseGaussian(sqrt(b/a), b). The a = 0 boundary (exact prior-mean
// hit) degenerates to Gamma(p, b/2), which is the b-only limit of the GIG.
double sample_gig(const GigParams& params, RngStream& rng);

// Inverse-Wishart draw under the convention E[draw] = scale/(df - d - 1)
// for df > d + 1. Requires df > d - 1 and a symmetric positive-definite
// scale. Output is symmetric positive-definite by construction.
Matrix sample_inverse_wishart(double df, const Matrix& scale, RngStream& rng);

// Multivariate normal via Cholesky of the covariance. Near-singular
// covariances get diagonal jitter of 1e-10 x mean-diagonal, escalated
// tenfold up to 1e-6 before giving up with condition diagnostics.
// An exactly zero covariance returns the mean.
Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng);

// Draw from N(P^{-1} b, P^{-1}) given the precision matrix P, using one
// Cholesky factorization. Same jitter policy as sample_mvn.
Vector sample_mvn_precision(const Vector& b, const Matrix& precision,
                            RngStream& rng);

// Cholesky with the shared jitter-escalation policy; returns the lower
// factor. `label` names the matrix in error diagnostics.
Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& m, const char* label);

}  // namespace netclass
