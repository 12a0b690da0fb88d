#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmmix/data.hpp"
#include "hmmix/model.hpp"
#include "hmmix/random.hpp"

namespace hmmix {

// Generative model and brute-force references used by tests and acceptance.

struct SyntheticTruth {
  MixtureParams mix;
  MarkovParams markov;
  LatentState latent;  // z and w realized by the simulation; v left NaN
};

struct SyntheticDataset {
  Dataset data;
  SyntheticTruth truth;
};

struct ChromosomeLayout {
  std::string chromosome;
  std::vector<std::int64_t> positions;  // strictly increasing, positive
};

// Positions with log-uniform gaps in [1, max_gap], starting at 1.
std::vector<std::int64_t> random_positions(std::size_t n, std::int64_t max_gap, Rng& rng);

// Ancestral sampling: W_i ~ Ber(Phi(beta0 + beta1 d_i)) (W fixed 0 at the
// first location of each chromosome), Z_i from q0 or the Q row of Z_{i-1},
// X_i from component Z_i. Distances use one global scale.
SyntheticDataset simulate_dataset(const MixtureParams& mix, const MarkovParams& markov,
                                  const std::vector<ChromosomeLayout>& layout, Rng& rng);

// Draws X for given allocations (used to plant known structure).
std::vector<double> simulate_expressions(const MixtureParams& mix, std::span<const std::uint8_t> z, Rng& rng);

// Exact full conditional of (Z, W) for one chromosome by enumeration.
// Configuration index = sum_i z_i (K+1)^i + (K+1)^n * sum_{i>=1} w_i 2^(i-1).
class ExactLaw {
 public:
  ExactLaw(std::size_t n, std::size_t components, std::vector<double> prob);

  std::size_t n() const { return n_; }
  std::size_t components() const { return K1_; }
  std::size_t size() const { return prob_.size(); }
  const std::vector<double>& probabilities() const { return prob_; }

  std::size_t encode(std::span<const std::uint8_t> z, std::span<const std::uint8_t> w) const;
  void decode(std::size_t index, std::span<std::uint8_t> z, std::span<std::uint8_t> w) const;

  std::vector<double> marginal_z(std::size_t i) const;
  double marginal_w(std::size_t i) const;  // P(W_i = 1)

 private:
  std::size_t n_, K1_, z_cells_;
  std::vector<double> prob_;
};

inline constexpr std::size_t kMaxEnumerationSites = 6;
inline constexpr std::size_t kMaxEnumerationGammas = 2;

// Throws CapacityError beyond n = 6 or K = 2.
ExactLaw enumerate_zw_posterior(const ChromosomeSeries& series, const MixtureParams& mix, const MarkovParams& markov);

// Half the L1 distance. Sizes must match (DomainError otherwise).
double tv_distance(std::span<const double> p, std::span<const double> q);
std::vector<double> empirical_law(std::span<const std::size_t> counts);

}  // namespace hmmix
