#include "netclass/special_rand.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace netclass {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPiSq = kPi * kPi;
// Truncation point splitting the two tail representations of the Jacobi
// density; any value in [(log 3)/pi^2, 4/log 3] works, 0.64 is customary.
constexpr double kPgTrunc = 0.64;

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// log Phi(x), stable in the left tail.
double log_std_normal_cdf(double x) {
  if (x > -8.0) return std::log(std_normal_cdf(x));
  // asymptotic phi(x)/|x| expansion
  const double x2 = x * x;
  return -0.5 * x2 - 0.5 * std::log(2.0 * kPi) - std::log(-x) +
         std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Coefficient a_n(x) of the alternating series for the Jacobi density,
// piecewise in x around the truncation point.
double pg_series_coef(int n, double x) {
  const double h = n + 0.5;
  if (x > kPgTrunc) {
    return kPi * h * std::exp(-h * h * kPiSq * x / 2.0);
  }
  return kPi * h * std::pow(2.0 / (kPi * x), 1.5) * std::exp(-2.0 * h * h / x);
}

// Probability that the proposal draws from the truncated-exponential
// branch rather than the truncated-inverse-Gaussian branch.
double pg_exponential_branch_prob(double z) {
  const double t = kPgTrunc;
  const double k = kPiSq / 8.0 + z * z / 2.0;
  const double log_p = std::log(kPi / (2.0 * k)) - k * t;
  // q = 2 exp(-z) * IG-CDF(t; mu = 1/z, lambda = 1), in logs for large z
  const double sqrt_inv_t = 1.0 / std::sqrt(t);
  const double log_q1 = -z + std::log(2.0) + log_std_normal_cdf(sqrt_inv_t * (t * z - 1.0));
  const double log_q2 = z + std::log(2.0) + log_std_normal_cdf(-sqrt_inv_t * (t * z + 1.0));
  const double m = std::max({log_p, log_q1, log_q2});
  const double p = std::exp(log_p - m);
  const double q = std::exp(log_q1 - m) + std::exp(log_q2 - m);
  return p / (p + q);
}

// Inverse-Gaussian IG(1/z, 1) restricted to (0, t]. Handles z = 0 (the
// proposal becomes the one-sided stable tail).
double pg_truncated_inv_gauss(double z, RngStream& rng) {
  const double t = kPgTrunc;
  if (z < 1.0 / t) {
    // mean beyond the truncation point: rejection from the inverse
    // chi-square shaped proposal, thinned by the IG tilt
    for (;;) {
      double e1, e2;
      do {
        e1 = rng.exponential();
        e2 = rng.exponential();
      } while (e1 * e1 > 2.0 * e2 / t);
      const double x = t / ((1.0 + t * e1) * (1.0 + t * e1));
      if (std::log(rng.uniform()) <= -z * z * x / 2.0) return x;
    }
  }
  // mean inside (0, t]: draw IG until it lands in the window
  const double mu = 1.0 / z;
  for (;;) {
    const double x = rng.inverse_gaussian(mu, 1.0);
    if (x <= t) return x;
  }
}

}  // namespace

double sample_polya_gamma(int b_param, double c, RngStream& rng) {
  if (b_param != 1) {
    throw ValidationError("polya-gamma: only b = 1 is supported, got b = " +
                          std::to_string(b_param));
  }
  // PG(1, c) = J*(1, c/2) / 4, and the law is even in c.
  const double z = std::abs(c) / 2.0;
  const double k = kPiSq / 8.0 + z * z / 2.0;
  const double p_exp = pg_exponential_branch_prob(z);
  for (;;) {
    double x;
    if (rng.uniform() < p_exp) {
      x = kPgTrunc + rng.exponential() / k;
    } else {
      x = pg_truncated_inv_gauss(z, rng);
    }
    // squeeze on the alternating partial sums
    double s = pg_series_coef(0, x);
    const double y = rng.uniform() * s;
    int n = 0;
    for (;;) {
      ++n;
      if (n % 2 == 1) {
        s -= pg_series_coef(n, x);
        if (y <= s) return x / 4.0;
      } else {
        s += pg_series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

void GigParams::validate() const {
  if (a < 0.0 || b < 0.0) {
    throw ValidationError("GIG: a and b must be nonnegative");
  }
  if (p > 0.0 && b <= 0.0) {
    throw ValidationError("GIG: b must be positive when p > 0");
  }
  if (p < 0.0 && a <= 0.0) {
    throw ValidationError("GIG: a must be positive when p < 0");
  }
  if (p == 0.0 && (a <= 0.0 || b <= 0.0)) {
    throw ValidationError("GIG: p = 0 requires both a and b positive");
  }
}

double sample_gig(const GigParams& params, RngStream& rng) {
  params.validate();
  if (params.p != 0.5) {
    throw ValidationError("GIG: only p = 1/2 is implemented, got p = " +
                          std::to_string(params.p));
  }
  if (params.a == 0.0) {
    // b-only limit: Gamma(p, b/2)
    return rng.gamma(params.p, params.b / 2.0);
  }
  // X ~ GIG(1/2, a, b)  <=>  1/X ~ GIG(-1/2, b, a) = IG(sqrt(b/a), b)
  const double mu = std::sqrt(params.b / params.a);
  const double y = rng.inverse_gaussian(mu, params.b);
  return 1.0 / y;
}

Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& m, const char* label) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const double mean_diag = m.diagonal().mean();
  double jitter = 1e-10 * mean_diag;
  const double jitter_cap = 1e-6 * mean_diag;
  while (jitter > 0.0 && jitter <= jitter_cap) {
    Matrix jittered = m;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt;
    jitter *= 10.0;
  }
  throw NumericalError(std::string(label) +
                       ": Cholesky failed after jitter escalation (dim=" +
                       std::to_string(m.rows()) + ", mean diag=" +
                       std::to_string(mean_diag) + ", min diag=" +
                       std::to_string(m.diagonal().minCoeff()) + ", max|entry|=" +
                       std::to_string(m.cwiseAbs().maxCoeff()) + ")");
}

Matrix sample_inverse_wishart(double df, const Matrix& scale, RngStream& rng) {
  const int d = static_cast<int>(scale.rows());
  if (scale.rows() != scale.cols() || d < 1) {
    throw ValidationError("inverse-wishart: scale must be square");
  }
  if (!(df > d - 1)) {
    throw ValidationError("inverse-wishart: df must exceed dim - 1, got df=" +
                          std::to_string(df) + ", dim=" + std::to_string(d));
  }
  if (!scale.isApprox(scale.transpose(), 1e-10)) {
    throw ValidationError("inverse-wishart: scale must be symmetric");
  }
  Eigen::LLT<Matrix> scale_llt(scale);
  if (scale_llt.info() != Eigen::Success) {
    throw ValidationError("inverse-wishart: scale is not positive-definite");
  }

  // W ~ Wishart(df, scale^{-1}) by Bartlett; return W^{-1}. With
  // scale = L L', the Wishart factor is L'^{-1} A where A is the Bartlett
  // lower triangle, so W^{-1} = L A'^{-1} A^{-1} L'.
  Matrix bartlett = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_square(df - i));
    for (int j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  const Matrix lower = scale_llt.matrixL();
  // solve A Z = L'  =>  Z = A^{-1} L'
  const Matrix z = bartlett.triangularView<Eigen::Lower>().solve(
      Matrix(lower.transpose()));
  Matrix draw = z.transpose() * z;
  // enforce exact symmetry against round-off
  draw = 0.5 * (draw + draw.transpose()).eval();
  return draw;
}

Vector sample_mvn(const Vector& mean, const Matrix& cov, RngStream& rng) {
  const int d = static_cast<int>(mean.size());
  if (cov.rows() != d || cov.cols() != d) {
    throw ValidationError("mvn: covariance is " + std::to_string(cov.rows()) +
                          "x" + std::to_string(cov.cols()) + " but mean has dim " +
                          std::to_string(d));
  }
  if (cov.cwiseAbs().maxCoeff() == 0.0) return mean;  // degenerate point mass
  const Eigen::LLT<Matrix> llt = cholesky_with_jitter(cov, "mvn covariance");
  Vector z(d);
  for (int i = 0; i < d; ++i) z[i] = rng.normal();
  return mean + llt.matrixL() * z;
}

Vector sample_mvn_precision(const Vector& b, const Matrix& precision,
                            RngStream& rng) {
  const int d = static_cast<int>(b.size());
  if (precision.rows() != d || precision.cols() != d) {
    throw ValidationError("mvn precision: dimension mismatch");
  }
  const Eigen::LLT<Matrix> llt = cholesky_with_jitter(precision, "mvn precision");
  // mean solves P m = b; draw adds L'^{-1} z
  Vector mean = llt.solve(b);
  Vector z(d);
  for (int i = 0; i < d; ++i) z[i] = rng.normal();
  return mean + llt.matrixU().solve(z);
}

}  // namespace netclass
