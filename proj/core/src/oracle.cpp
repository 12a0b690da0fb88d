#include "hmmix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hmmix/error.hpp"

namespace hmmix {

std::vector<std::int64_t> random_positions(std::size_t n, std::int64_t max_gap, Rng& rng) {
  std::vector<std::int64_t> pos;
  pos.reserve(n);
  std::int64_t current = 1;
  const double log_max = std::log(static_cast<double>(std::max<std::int64_t>(max_gap, 2)));
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      auto gap = static_cast<std::int64_t>(std::floor(std::exp(uniform01(rng) * log_max)));
      current += std::clamp<std::int64_t>(gap, 1, max_gap);
    }
    pos.push_back(current);
  }
  return pos;
}

std::vector<double> simulate_expressions(const MixtureParams& mix, std::span<const std::uint8_t> z, Rng& rng) {
  std::vector<double> x(z.size());
  const std::size_t K = mix.K();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const std::size_t k = z[i];
    x[i] = k < K ? gamma_mean_shape(rng, mix.theta[k], mix.eta[k]) : normal(rng, mix.mu, std::sqrt(mix.sigma2));
  }
  return x;
}

SyntheticDataset simulate_dataset(const MixtureParams& mix, const MarkovParams& markov,
                                  const std::vector<ChromosomeLayout>& layout, Rng& rng) {
  mix.validate();
  markov.validate(mix.components());
  std::vector<std::vector<std::int64_t>> all_positions;
  for (const auto& c : layout) all_positions.push_back(c.positions);
  const std::int64_t g_max = max_gap(all_positions);

  SyntheticDataset out;
  out.truth.mix = mix;
  out.truth.markov = markov;
  std::size_t total = 0;
  for (const auto& c : layout) total += c.positions.size();
  out.truth.latent.resize(total);

  std::size_t g = 0;
  for (const auto& c : layout) {
    ChromosomeSeries s;
    s.chromosome = c.chromosome;
    s.positions = c.positions;
    s.d = rescale_distances(c.positions, g_max);
    std::vector<std::uint8_t> z(c.positions.size());
    for (std::size_t i = 0; i < c.positions.size(); ++i, ++g) {
      bool dependent = false;
      if (i > 0) dependent = bernoulli(rng, rho(markov.beta, s.d[i]));
      const auto law = dependent ? markov.Q.row(z[i - 1]) : std::span<const double>(markov.q0);
      z[i] = static_cast<std::uint8_t>(categorical(rng, law));
      out.truth.latent.z[g] = z[i];
      out.truth.latent.w[g] = dependent ? 1 : 0;
    }
    s.x = simulate_expressions(mix, z, rng);
    for (std::size_t i = 0; i < s.size(); ++i) s.probe_ids.push_back(c.chromosome + "_" + std::to_string(i + 1));
    out.data.series.push_back(std::move(s));
  }
  return out;
}

ExactLaw::ExactLaw(std::size_t n, std::size_t components, std::vector<double> prob)
    : n_(n), K1_(components), z_cells_(1), prob_(std::move(prob)) {
  for (std::size_t i = 0; i < n_; ++i) z_cells_ *= K1_;
}

std::size_t ExactLaw::encode(std::span<const std::uint8_t> z, std::span<const std::uint8_t> w) const {
  std::size_t zc = 0, mult = 1;
  for (std::size_t i = 0; i < n_; ++i, mult *= K1_) zc += z[i] * mult;
  std::size_t wc = 0;
  for (std::size_t i = 1; i < n_; ++i) wc |= static_cast<std::size_t>(w[i] & 1u) << (i - 1);
  return zc + z_cells_ * wc;
}

void ExactLaw::decode(std::size_t index, std::span<std::uint8_t> z, std::span<std::uint8_t> w) const {
  std::size_t zc = index % z_cells_;
  const std::size_t wc = index / z_cells_;
  for (std::size_t i = 0; i < n_; ++i) {
    z[i] = static_cast<std::uint8_t>(zc % K1_);
    zc /= K1_;
  }
  w[0] = 0;
  for (std::size_t i = 1; i < n_; ++i) w[i] = static_cast<std::uint8_t>((wc >> (i - 1)) & 1u);
}

std::vector<double> ExactLaw::marginal_z(std::size_t i) const {
  std::vector<double> out(K1_, 0.0);
  std::vector<std::uint8_t> z(n_), w(n_);
  for (std::size_t idx = 0; idx < prob_.size(); ++idx) {
    decode(idx, z, w);
    out[z[i]] += prob_[idx];
  }
  return out;
}

double ExactLaw::marginal_w(std::size_t i) const {
  double out = 0.0;
  std::vector<std::uint8_t> z(n_), w(n_);
  for (std::size_t idx = 0; idx < prob_.size(); ++idx) {
    decode(idx, z, w);
    if (w[i]) out += prob_[idx];
  }
  return out;
}

ExactLaw enumerate_zw_posterior(const ChromosomeSeries& series, const MixtureParams& mix, const MarkovParams& markov) {
  const std::size_t n = series.size();
  const std::size_t K = mix.K();
  if (n == 0) throw DomainError("enumeration needs at least one location");
  if (n > kMaxEnumerationSites || K > kMaxEnumerationGammas) {
    throw CapacityError("exact enumeration is limited to n <= 6 and K <= 2");
  }
  const std::size_t K1 = K + 1;
  std::size_t z_cells = 1;
  for (std::size_t i = 0; i < n; ++i) z_cells *= K1;
  const std::size_t total = z_cells << (n - 1);

  // Densities through the public kernels, not the filter's inlined copies.
  std::vector<double> log_f(n * K1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < K; ++k) log_f[i * K1 + k] = std::log(gamma_pdf(series.x[i], mix.theta[k], mix.eta[k]));
    log_f[i * K1 + K] = std::log(normal_pdf(series.x[i], mix.mu, mix.sigma2));
  }
  std::vector<double> log_plus(n, 0.0), log_minus(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double r = rho(markov.beta, series.d[i]);
    log_plus[i] = std::log(r);
    log_minus[i] = std::log1p(-r);
  }

  ExactLaw shape(n, K1, {});
  std::vector<double> logk(total);
  std::vector<std::uint8_t> z(n), w(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    shape.decode(idx, z, w);
    double lk = log_f[z[0]] + std::log(markov.q0[z[0]]);
    for (std::size_t i = 1; i < n; ++i) {
      lk += log_f[i * K1 + z[i]];
      if (w[i]) {
        lk += std::log(markov.Q(z[i - 1], z[i])) + log_plus[i];
      } else {
        lk += std::log(markov.q0[z[i]]) + log_minus[i];
      }
    }
    logk[idx] = lk;
  }
  const double mx = *std::max_element(logk.begin(), logk.end());
  std::vector<double> prob(total);
  double sum = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    prob[idx] = std::isfinite(mx) ? std::exp(logk[idx] - mx) : 0.0;
    sum += prob[idx];
  }
  if (!(sum > 0.0)) throw DomainError("enumerated kernel is identically zero");
  for (double& p : prob) p /= sum;
  return ExactLaw(n, K1, std::move(prob));
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("laws are defined on different supports");
  double out = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) out += std::abs(p[i] - q[i]);
  return 0.5 * out;
}

std::vector<double> empirical_law(std::span<const std::size_t> counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  if (!(total > 0.0)) throw DomainError("empirical law of zero draws");
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / total;
  return out;
}

}  // namespace hmmix
