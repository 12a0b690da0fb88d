#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hmmix/data.hpp"
#include "hmmix/model.hpp"
#include "hmmix/random.hpp"

namespace hmmix {

// Backward-filtering / forward-sampling for the joint block (Z, W) of one
// chromosome with V integrated out.
//
// Backward quantities, with c_{n+1} = 1:
//   a_i    = sum_k c_{i+1,k} f_k(x_i) q0_k
//   b_{ij} = sum_k c_{i+1,k} f_k(x_i) Q_{jk}
//   c_{ij} = b_{ij} Phi(+m_i) + a_i Phi(-m_i),   m_i = beta0 + beta1 d_i
// c_{ij} is the likelihood of x_i..x_n given Z_{i-1} = j. Each site works in
// its own scale (relative to the largest f_k c_{i+1,k}) and c_i is
// renormalized to max 1 before being handed to site i-1; every forward
// probability is a ratio within one site, so the scales cancel.
class FilterCache {
 public:
  std::size_t size() const { return n_; }
  std::size_t components() const { return K1_; }

  // Free sites carry a random dependence indicator; site 0 and any forced
  // break have W fixed at 0.
  bool is_free(std::size_t i) const { return free_[i] != 0; }

  // Logs of a_i, b_{ij}, c_{ij} up to the site-local scale. Within a site they
  // share one scale, so differences are exact log-ratios. log_c(n, j) = 0.
  double log_a(std::size_t i) const;
  double log_b(std::size_t i, std::size_t j) const;
  double log_c(std::size_t i, std::size_t j) const;

  // Same quantities on the absolute scale of the unnormalized recursion.
  double absolute_log_a(std::size_t i) const { return log_a(i) + downstream_shift_[i]; }
  double absolute_log_b(std::size_t i, std::size_t j) const { return log_b(i, j) + downstream_shift_[i]; }
  double absolute_log_c(std::size_t i, std::size_t j) const { return log_c(i, j) + downstream_shift_[i]; }

  // log p(x_1..x_n | parameters), V and (Z, W) marginalized.
  double log_evidence() const { return log_evidence_; }

  // Law of Z_1 (q0*).
  std::vector<double> first_allocation() const;
  // P(W_i = 1 | Z_{i-1} = j, ...) (p*_{ij}). Zero at fixed sites.
  double dependence_probability(std::size_t i, std::size_t prev) const;
  // Law of Z_i given W_i = dependent and Z_{i-1} = prev (q*_{(i,j,l)}).
  std::vector<double> allocation(std::size_t i, std::size_t prev, bool dependent) const;

 private:
  friend FilterCache backward_filter(const ChromosomeSeries&, const MixtureParams&, const MarkovParams&,
                                     std::span<const std::uint8_t>);
  friend void forward_sample(const FilterCache&, Rng&, std::span<std::uint8_t>, std::span<std::uint8_t>);

  // Unnormalized weights of Z_i = k: f_k(x_i) c_{i+1,k} relative to the site
  // scale, times q0_k (no dependence) or Q_{jk} (dependence from j).
  void allocation_weights(std::size_t i, std::size_t prev, bool dependent, std::span<double> out) const;

  std::size_t n_ = 0;
  std::size_t K1_ = 0;
  std::vector<double> emit_;        // n x K1: f_k(x_i) c_{i+1,k} / exp(scale_i)
  std::vector<double> a_;           // n, linear, relative to scale_i
  std::vector<double> b_;           // n x K1
  std::vector<double> c_;           // (n+1) x K1, normalized to max 1; row n is all ones
  std::vector<double> c_raw_;       // n x K1, c before normalization, same scale as a_, b_
  std::vector<double> scale_;       // n, log scale of site i
  std::vector<double> downstream_shift_;  // n, log normalizations applied to c_{i+1..n}
  std::vector<double> phi_plus_, phi_minus_;
  std::vector<std::uint8_t> free_;
  std::vector<double> q0_;
  std::vector<double> Q_;
  double log_evidence_ = 0.0;
};

// forced_breaks (optional, length n): nonzero entries force W_i = 0 as if a
// new chromosome started at i.
FilterCache backward_filter(const ChromosomeSeries& series, const MixtureParams& mix, const MarkovParams& markov,
                            std::span<const std::uint8_t> forced_breaks = {});

// Draws Z_1, W_2, Z_2, ..., W_n, Z_n from the cache. Consumes exactly one
// uniform per allocation and one per free dependence indicator.
// The cache keeps its own copy of q0 and Q.
void forward_sample(const FilterCache& cache, Rng& rng, std::span<std::uint8_t> z, std::span<std::uint8_t> w);

}  // namespace hmmix
