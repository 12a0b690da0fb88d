#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace hmmix {

using Rng = std::mt19937_64;

// Seed derivation. Every random stream in the library is derived from one
// master seed so results never depend on scheduling or thread count.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t master, std::string_view name);
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);
Rng make_substream(std::uint64_t master, std::string_view name);

// Distribution helpers. Distribution objects are constructed per call so the
// only sampler state is the engine itself (needed for exact checkpoint resume).
double uniform01(Rng& rng);
double standard_normal(Rng& rng);
double normal(Rng& rng, double mean, double sd);
double gamma_shape_rate(Rng& rng, double shape, double rate);
double gamma_mean_shape(Rng& rng, double mean, double shape);
double inverse_gamma(Rng& rng, double shape, double scale);
bool bernoulli(Rng& rng, double p);
std::vector<double> dirichlet(Rng& rng, std::span<const double> alpha);

// Index drawn with probability proportional to weights (need not be
// normalized; must have positive total).
std::size_t categorical(Rng& rng, std::span<const double> weights);

// N(mean, 1) truncated to (0, inf) when positive is true, else (-inf, 0].
double truncated_normal_unit(Rng& rng, double mean, bool positive);

}  // namespace hmmix
