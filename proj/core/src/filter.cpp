#include "hmmix/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hmmix/error.hpp"

namespace hmmix {

namespace {

constexpr double kSumTolerance = 1e-8;

void check_normalized(std::span<const double> p, const char* what, std::size_t site) {
  double total = 0.0;
  for (double x : p) total += x;
  if (!(std::abs(total - 1.0) <= kSumTolerance)) {
    throw FilterInconsistencyError(std::string(what) + " at location " + std::to_string(site + 1) +
                                   " sums to " + std::to_string(total));
  }
}

}  // namespace

double FilterCache::log_a(std::size_t i) const { return scale_[i] + std::log(a_[i]); }

double FilterCache::log_b(std::size_t i, std::size_t j) const { return scale_[i] + std::log(b_[i * K1_ + j]); }

double FilterCache::log_c(std::size_t i, std::size_t j) const {
  if (i == n_) return 0.0;
  return scale_[i] + std::log(c_raw_[i * K1_ + j]);
}

void FilterCache::allocation_weights(std::size_t i, std::size_t prev, bool dependent, std::span<double> out) const {
  const double* e = &emit_[i * K1_];
  const double* base = dependent ? &Q_[prev * K1_] : q0_.data();
  for (std::size_t k = 0; k < K1_; ++k) out[k] = e[k] * base[k];
}

std::vector<double> FilterCache::first_allocation() const {
  std::vector<double> p(K1_);
  allocation_weights(0, 0, false, p);
  for (double& x : p) x /= a_[0];
  return p;
}

double FilterCache::dependence_probability(std::size_t i, std::size_t prev) const {
  if (!free_[i]) return 0.0;
  const double c = c_raw_[i * K1_ + prev];
  return b_[i * K1_ + prev] * phi_plus_[i] / c;
}

std::vector<double> FilterCache::allocation(std::size_t i, std::size_t prev, bool dependent) const {
  std::vector<double> p(K1_);
  allocation_weights(i, prev, dependent, p);
  const double denom = dependent ? b_[i * K1_ + prev] : a_[i];
  for (double& x : p) x /= denom;
  return p;
}

FilterCache backward_filter(const ChromosomeSeries& series, const MixtureParams& mix, const MarkovParams& markov,
                            std::span<const std::uint8_t> forced_breaks) {
  const std::size_t n = series.size();
  const std::size_t K = mix.K();
  const std::size_t K1 = K + 1;
  if (n == 0) throw DomainError("backward_filter needs a nonempty series");
  if (!forced_breaks.empty() && forced_breaks.size() != n) {
    throw DomainError("forced_breaks must match the series length");
  }

  FilterCache cache;
  cache.n_ = n;
  cache.K1_ = K1;
  cache.emit_.assign(n * K1, 0.0);
  cache.a_.assign(n, 0.0);
  cache.b_.assign(n * K1, 0.0);
  cache.c_.assign((n + 1) * K1, 0.0);
  cache.c_raw_.assign(n * K1, 0.0);
  cache.scale_.assign(n, 0.0);
  cache.downstream_shift_.assign(n, 0.0);
  cache.phi_plus_.assign(n, 0.0);
  cache.phi_minus_.assign(n, 1.0);
  cache.free_.assign(n, 0);
  cache.q0_ = markov.q0;
  cache.Q_ = markov.Q.values();

  // Per-component constants of the log densities.
  std::vector<double> gamma_const(K), gamma_rate(K);
  for (std::size_t k = 0; k < K; ++k) {
    gamma_rate[k] = mix.eta[k] / mix.theta[k];
    gamma_const[k] = mix.eta[k] * std::log(gamma_rate[k]) - std::lgamma(mix.eta[k]);
  }
  const double normal_const = -0.5 * std::log(2.0 * std::numbers::pi * mix.sigma2);
  const double inv_two_var = 0.5 / mix.sigma2;

  for (std::size_t i = 0; i < n; ++i) {
    const bool fixed = (i == 0) || (!forced_breaks.empty() && forced_breaks[i]);
    cache.free_[i] = fixed ? 0 : 1;
    if (!fixed) {
      const double m = markov.beta[0] + markov.beta[1] * series.d[i];
      cache.phi_plus_[i] = 0.5 * std::erfc(-m / std::numbers::sqrt2);
      cache.phi_minus_[i] = 0.5 * std::erfc(m / std::numbers::sqrt2);
    }
  }

  std::fill(cache.c_.begin() + static_cast<std::ptrdiff_t>(n * K1), cache.c_.end(), 1.0);
  std::vector<double> u(K1);
  double shift = 0.0;  // total normalization removed from c_{i+1}
  for (std::size_t i = n; i-- > 0;) {
    const double x = series.x[i];
    const double log_x = x > 0.0 ? std::log(x) : 0.0;
    const double* c_next = &cache.c_[(i + 1) * K1];
    double lf_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K1; ++k) {
      if (k < K) {
        u[k] = x > 0.0 ? gamma_const[k] + (mix.eta[k] - 1.0) * log_x - gamma_rate[k] * x
                       : -std::numeric_limits<double>::infinity();
      } else {
        const double z = x - mix.mu;
        u[k] = normal_const - z * z * inv_two_var;
      }
      lf_max = std::max(lf_max, u[k]);
    }
    if (!std::isfinite(lf_max)) {
      throw FilterDegeneracyError("all mixture components have zero likelihood at location " +
                                  std::to_string(i + 1) + " of chromosome " + series.chromosome);
    }
    double* e = &cache.emit_[i * K1];
    double e_max = 0.0;
    for (std::size_t k = 0; k < K1; ++k) {
      e[k] = std::exp(u[k] - lf_max) * c_next[k];
      e_max = std::max(e_max, e[k]);
    }
    double site_scale = lf_max;
    if (e_max < 1e-200) {
      // The best-fitting component carries a negligible backward message; redo
      // the site fully in log space so nothing underflows.
      double u_max = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < K1; ++k) {
        u[k] = c_next[k] > 0.0 ? u[k] + std::log(c_next[k]) : -std::numeric_limits<double>::infinity();
        u_max = std::max(u_max, u[k]);
      }
      if (!std::isfinite(u_max)) {
        throw FilterDegeneracyError("backward message vanished at location " + std::to_string(i + 1) +
                                    " of chromosome " + series.chromosome);
      }
      for (std::size_t k = 0; k < K1; ++k) e[k] = std::exp(u[k] - u_max);
      site_scale = u_max;
    }
    cache.scale_[i] = site_scale;
    cache.downstream_shift_[i] = shift;

    double a = 0.0;
    for (std::size_t k = 0; k < K1; ++k) a += e[k] * markov.q0[k];
    cache.a_[i] = a;

    double c_max = 0.0;
    double* b = &cache.b_[i * K1];
    double* c_raw = &cache.c_raw_[i * K1];
    for (std::size_t j = 0; j < K1; ++j) {
      const double* row = &cache.Q_[j * K1];
      double bj = 0.0;
      for (std::size_t k = 0; k < K1; ++k) bj += e[k] * row[k];
      b[j] = bj;
      c_raw[j] = cache.free_[i] ? bj * cache.phi_plus_[i] + a * cache.phi_minus_[i] : a;
      c_max = std::max(c_max, c_raw[j]);
    }
    if (!(c_max > 0.0) || !std::isfinite(c_max)) {
      throw FilterDegeneracyError("backward message vanished at location " + std::to_string(i + 1) +
                                  " of chromosome " + series.chromosome);
    }
    double* c = &cache.c_[i * K1];
    for (std::size_t j = 0; j < K1; ++j) c[j] = c_raw[j] / c_max;
    shift += site_scale + std::log(c_max);
  }
  cache.log_evidence_ = cache.absolute_log_a(0);
  if (!std::isfinite(cache.log_evidence_)) {
    throw FilterDegeneracyError("zero evidence for chromosome " + series.chromosome);
  }
  return cache;
}

void forward_sample(const FilterCache& cache, Rng& rng, std::span<std::uint8_t> z, std::span<std::uint8_t> w) {
  const std::size_t n = cache.size();
  const std::size_t K1 = cache.components();
  if (z.size() != n || w.size() != n) throw DomainError("forward_sample output spans have the wrong length");

  std::vector<double> p(K1);
  cache.allocation_weights(0, 0, false, p);
  for (double& x : p) x /= cache.a_[0];
  check_normalized(p, "first allocation law", 0);
  z[0] = static_cast<std::uint8_t>(categorical(rng, p));
  w[0] = 0;

  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t prev = z[i - 1];
    bool dependent = false;
    if (cache.free_[i]) {
      const double b = cache.b_[i * K1 + prev];
      const double plus = b * cache.phi_plus_[i];
      const double minus = cache.a_[i] * cache.phi_minus_[i];
      const double c = cache.c_raw_[i * K1 + prev];
      if (!(std::abs(plus + minus - c) <= kSumTolerance * c)) {
        throw FilterInconsistencyError("dependence law at location " + std::to_string(i + 1) +
                                       " does not sum to 1");
      }
      dependent = uniform01(rng) * c < plus;
    }
    w[i] = dependent ? 1 : 0;
    cache.allocation_weights(i, prev, dependent, p);
    const double denom = dependent ? cache.b_[i * K1 + prev] : cache.a_[i];
    for (double& x : p) x /= denom;
    check_normalized(p, "allocation law", i);
    z[i] = static_cast<std::uint8_t>(categorical(rng, p));
  }
}

}  // namespace hmmix
