#include "netclass/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace netclass {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // Mix seed and stream id through splitmix64 so nearby ids land far apart.
  std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  for (auto& word : state_) word = splitmix64(sm);
  if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) {
    state_[0] = 1;  // xoshiro state must not be all zero
  }
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  // 53-bit mantissa, shifted into (0, 1] so log(u) is always finite.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * m;
  has_spare_ = true;
  return u * m;
}

double RngStream::normal(double mean, double sd) { return mean + sd * normal(); }

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost to shape+1, then scale back.
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::gamma(double shape, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("gamma: rate must be > 0");
  return gamma(shape) / rate;
}

double RngStream::inverse_gamma(double shape, double rate) {
  return 1.0 / gamma(shape, rate);
}

double RngStream::chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

double RngStream::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

bool RngStream::bernoulli(double p) { return uniform() <= p; }

double RngStream::inverse_gaussian(double mu, double lambda) {
  const double z = normal();
  const double w = mu * z * z;
  // smaller root of the MSH quadratic, in rationalized form so large w
  // cannot cancel the leading terms to a negative value
  const double s = w + std::sqrt(w * (w + 4.0 * lambda));
  const double x = w == 0.0 ? mu : 4.0 * mu * lambda * w / (s * s);
  if (uniform() > mu / (mu + x)) return mu * mu / x;
  return x;
}

}  // namespace netclass
