#include "hmmix/random.hpp"

#include <cmath>
#include <numeric>

#include "hmmix/error.hpp"

namespace hmmix {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::string_view name) {
  // FNV-1a; std::hash is not stable across implementations.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(master ^ splitmix64(h));
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(master ^ splitmix64(a + 0x632be59bd9b4e019ULL)) ^ b);
}

Rng make_substream(std::uint64_t master, std::string_view name) {
  return Rng(substream_seed(master, name));
}

double uniform01(Rng& rng) {
  // 53 random bits in [0, 1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double normal(Rng& rng, double mean, double sd) { return mean + sd * standard_normal(rng); }

double gamma_shape_rate(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw ParameterError("gamma draw needs positive shape and rate");
  }
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double gamma_mean_shape(Rng& rng, double mean, double shape) {
  return gamma_shape_rate(rng, shape, shape / mean);
}

double inverse_gamma(Rng& rng, double shape, double scale) {
  return scale / gamma_shape_rate(rng, shape, 1.0);
}

bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out[k] = gamma_shape_rate(rng, alpha[k], 1.0);
    total += out[k];
  }
  for (double& x : out) x /= total;
  return out;
}

std::size_t categorical(Rng& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DomainError("categorical draw needs a positive finite total weight");
  }
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  // Rounding left u at the top edge; return the last positive-weight cell.
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0.0) return k;
  }
  return weights.size() - 1;
}

namespace {

// Standard normal truncated to [lower, inf), lower may be any real.
double lower_truncated_standard(Rng& rng, double lower) {
  if (lower < 0.45) {
    // Acceptance probability at least 1 - Phi(0.45) ~ 0.33.
    for (;;) {
      const double z = standard_normal(rng);
      if (z >= lower) return z;
    }
  }
  // Robert (1995) exponential proposal with the optimal rate.
  const double alpha = 0.5 * (lower + std::sqrt(lower * lower + 4.0));
  for (;;) {
    const double z = lower - std::log1p(-uniform01(rng)) / alpha;
    const double diff = z - alpha;
    if (uniform01(rng) <= std::exp(-0.5 * diff * diff)) return z;
  }
}

}  // namespace

double truncated_normal_unit(Rng& rng, double mean, bool positive) {
  if (positive) {
    // V > 0  <=>  V - mean > -mean
    double v = mean + lower_truncated_standard(rng, -mean);
    // z >= lower is closed; nudge the measure-zero boundary into the open set.
    if (v <= 0.0) v = std::nextafter(0.0, 1.0);
    return v;
  }
  // V <= 0  <=>  -(V - mean) >= mean
  return mean - lower_truncated_standard(rng, mean);
}

}  // namespace hmmix
