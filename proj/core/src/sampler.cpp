#include "hmmix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "hmmix/error.hpp"
#include "hmmix/filter.hpp"

namespace hmmix {

// --- V ---------------------------------------------------------------------

void sample_v(LatentState& latent, const MarkovParams& markov, const Dataset& data, Rng& rng) {
  std::size_t g = 0;
  for (const auto& s : data.series) {
    latent.v[g] = std::nan("");
    ++g;
    for (std::size_t i = 1; i < s.size(); ++i, ++g) {
      const double mean = markov.beta[0] + markov.beta[1] * s.d[i];
      latent.v[g] = truncated_normal_unit(rng, mean, latent.w[g] == 1);
    }
  }
}

// --- q0, Q -------------------------------------------------------------------

std::vector<double> q0_posterior(const LatentState& latent, const Dataset& data, const Priors& priors) {
  std::vector<double> alpha = priors.r0;
  const std::size_t n = data.total_n();
  for (std::size_t i = 0; i < n; ++i) {
    if (latent.w[i] == 0) alpha[latent.z[i]] += 1.0;
  }
  return alpha;
}

Matrix Q_posterior(const LatentState& latent, const Dataset& data, const Priors& priors) {
  Matrix alpha = priors.r;
  std::size_t g = 0;
  for (const auto& s : data.series) {
    ++g;
    for (std::size_t i = 1; i < s.size(); ++i, ++g) {
      if (latent.w[g] == 1) alpha(latent.z[g - 1], latent.z[g]) += 1.0;
    }
  }
  return alpha;
}

std::vector<double> sample_q0(const LatentState& latent, const Dataset& data, const Priors& priors, Rng& rng) {
  return dirichlet(rng, q0_posterior(latent, data, priors));
}

Matrix sample_Q(const LatentState& latent, const Dataset& data, const Priors& priors, Rng& rng) {
  const Matrix alpha = Q_posterior(latent, data, priors);
  Matrix out(alpha.rows(), alpha.cols());
  for (std::size_t j = 0; j < alpha.rows(); ++j) {
    const auto row = dirichlet(rng, alpha.row(j));
    std::copy(row.begin(), row.end(), out.row(j).begin());
  }
  return out;
}

// --- beta --------------------------------------------------------------------

namespace {

Mat2 inverse2(const Mat2& m, const char* what) {
  const double det = m[0] * m[3] - m[1] * m[2];
  const double scale = std::abs(m[0] * m[3]) + std::abs(m[1] * m[2]);
  if (!(std::abs(det) > 1e-14 * scale) || !std::isfinite(det)) {
    throw LinearAlgebraError(std::string(what) + " is numerically singular");
  }
  return {m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
}

}  // namespace

GaussianPosterior2 beta_posterior(const LatentState& latent, const Dataset& data, const Priors& priors) {
  Mat2 precision = inverse2(priors.Sigma0, "prior covariance of beta");
  Vec2 rhs{precision[0] * priors.mu0[0] + precision[1] * priors.mu0[1],
           precision[2] * priors.mu0[0] + precision[3] * priors.mu0[1]};
  std::size_t g = 0;
  for (const auto& s : data.series) {
    ++g;
    for (std::size_t i = 1; i < s.size(); ++i, ++g) {
      const double v = latent.v[g];
      if (std::isnan(v)) continue;
      const double d = s.d[i];
      precision[0] += 1.0;
      precision[1] += d;
      precision[2] += d;
      precision[3] += d * d;
      rhs[0] += v;
      rhs[1] += v * d;
    }
  }
  GaussianPosterior2 post;
  post.cov = inverse2(precision, "posterior precision of beta");
  post.mean = {post.cov[0] * rhs[0] + post.cov[1] * rhs[1], post.cov[2] * rhs[0] + post.cov[3] * rhs[1]};
  return post;
}

Vec2 sample_beta(const LatentState& latent, const Dataset& data, const Priors& priors, Rng& rng) {
  const auto post = beta_posterior(latent, data, priors);
  const double l11 = std::sqrt(post.cov[0]);
  const double l21 = post.cov[2] / l11;
  const double schur = post.cov[3] - l21 * l21;
  if (!(l11 > 0.0) || !(schur > 0.0)) throw LinearAlgebraError("posterior covariance of beta is not positive-definite");
  const double l22 = std::sqrt(schur);
  const double u0 = standard_normal(rng);
  const double u1 = standard_normal(rng);
  return {post.mean[0] + l11 * u0, post.mean[1] + l21 * u0 + l22 * u1};
}

// --- psi ---------------------------------------------------------------------

PsiPosterior psi_posterior(const LatentState& latent, std::span<const double> x, std::span<const double> eta,
                           const Priors& priors) {
  const std::size_t K = priors.K();
  std::vector<double> count(K + 1, 0.0), sum(K + 1, 0.0);
  double sum_sq_gauss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t k = latent.z[i];
    count[k] += 1.0;
    sum[k] += x[i];
    if (k == K) sum_sq_gauss += x[i] * x[i];
  }
  PsiPosterior post;
  const double nG = count[K];
  const double SX = sum[K];
  const double denom = 1.0 + priors.v * nG;
  post.s1 = priors.s1 + 0.5 * nG;
  const double lin = priors.m / priors.v + SX;
  post.s2 = priors.s2 + 0.5 * (priors.m * priors.m / priors.v + sum_sq_gauss - priors.v / denom * lin * lin);
  post.v_scale = priors.v / denom;
  post.m = (priors.m + priors.v * SX) / denom;
  post.t1.resize(K);
  post.t2.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    post.t1[k] = priors.t1[k] + eta[k] * count[k];
    post.t2[k] = priors.t2[k] + eta[k] * sum[k];
  }
  return post;
}

MixtureParams sample_psi(const PsiPosterior& post, const MixtureParams& current, std::size_t cap, Rng& rng) {
  const std::size_t K = post.t1.size();
  MixtureParams out = current;
  for (std::size_t attempt = 0; attempt < cap; ++attempt) {
    out.sigma2 = inverse_gamma(rng, post.s1, post.s2);
    out.mu = normal(rng, post.m, std::sqrt(out.sigma2 * post.v_scale));
    for (std::size_t k = 0; k < K; ++k) out.theta[k] = inverse_gamma(rng, post.t1[k], post.t2[k]);
    if (out.ordered()) return out;
  }
  std::string detail = "component means overlap: posterior modes";
  for (std::size_t k = 0; k < K; ++k) {
    detail += " theta_" + std::to_string(k + 1) + "~" + std::to_string(post.t2[k] / (post.t1[k] + 1.0));
  }
  detail += " mu~" + std::to_string(post.m);
  throw OrderingFailureError("ordering constraint not met after " + std::to_string(cap) + " attempts; " + detail);
}

// --- eta ---------------------------------------------------------------------

std::vector<GammaStats> gamma_stats(const LatentState& latent, std::span<const double> x, std::size_t K) {
  std::vector<GammaStats> stats(K);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t k = latent.z[i];
    if (k >= K) continue;
    stats[k].count += 1;
    stats[k].sum_x += x[i];
    stats[k].sum_log_x += std::log(x[i]);
  }
  return stats;
}

double eta_log_target(double eta, double theta, const GammaStats& stats, double prior_mean, double prior_shape) {
  if (!(eta > 0.0)) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(stats.count);
  const double rate = eta / theta;
  const double loglik = n * (eta * std::log(rate) - std::lgamma(eta)) + (eta - 1.0) * stats.sum_log_x - rate * stats.sum_x;
  return loglik + log_gamma_mean_shape(eta, prior_mean, prior_shape);
}

double eta_acceptance_probability(double current, double proposal, double theta, const GammaStats& stats,
                                  double prior_mean, double prior_shape) {
  if (!(proposal > 0.0)) return 0.0;
  if (proposal == current) return 1.0;
  const double log_ratio = eta_log_target(proposal, theta, stats, prior_mean, prior_shape) -
                           eta_log_target(current, theta, stats, prior_mean, prior_shape);
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

EtaDraw eta_mh_step(double current, double proposal, double theta, const GammaStats& stats, double prior_mean,
                    double prior_shape, double uniform) {
  const double alpha = eta_acceptance_probability(current, proposal, theta, stats, prior_mean, prior_shape);
  if (uniform < alpha) return {proposal, true};
  return {current, false};
}

EtaDraw sample_eta_k(std::size_t k, const GammaStats& stats, const MixtureParams& mix, const Priors& priors,
                     double proposal_sd, Rng& rng) {
  const double current = mix.eta[k];
  const double proposal = current + proposal_sd * standard_normal(rng);
  const double u = uniform01(rng);
  return eta_mh_step(current, proposal, mix.theta[k], stats, priors.e1[k], priors.e2[k], u);
}

// --- Sweep -------------------------------------------------------------------

namespace {

void sample_zw(ChainState& state, const Dataset& data, std::size_t threads, std::uint64_t key) {
  const auto offsets = data.offsets();
  const std::size_t C = data.series.size();
  auto run_one = [&](std::size_t c) {
    const auto& s = data.series[c];
    Rng sub(substream_seed(key, c));
    const auto cache = backward_filter(s, state.mix, state.markov);
    std::span<std::uint8_t> z(state.latent.z.data() + offsets[c], s.size());
    std::span<std::uint8_t> w(state.latent.w.data() + offsets[c], s.size());
    forward_sample(cache, sub, z, w);
  };

  const std::size_t workers = std::min(threads, C);
  if (workers <= 1) {
    for (std::size_t c = 0; c < C; ++c) run_one(c);
    return;
  }
  std::vector<std::exception_ptr> errors(C);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < C; c += workers) {
          try {
            run_one(c);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

SweepResult gibbs_sweep(ChainState& state, const Dataset& data, const Priors& priors, const ChainConfig& config,
                        Rng& rng) {
  const std::size_t K = state.mix.K();
  if (!config.clamp.zw) {
    const std::uint64_t key = rng();
    sample_zw(state, data, config.threads, key);
  }
  if (!config.clamp.v) sample_v(state.latent, state.markov, data, rng);

  const std::vector<double> x = data.all_x();
  if (!config.clamp.q0) state.markov.q0 = sample_q0(state.latent, data, priors, rng);
  if (!config.clamp.Q) state.markov.Q = sample_Q(state.latent, data, priors, rng);
  if (!config.clamp.beta) state.markov.beta = sample_beta(state.latent, data, priors, rng);
  if (!config.clamp.psi) {
    const auto post = psi_posterior(state.latent, x, state.mix.eta, priors);
    state.mix = sample_psi(post, state.mix, config.psi_rejection_cap, rng);
  }

  SweepResult result;
  result.eta_accepted.assign(K, 0);
  if (!config.clamp.eta) {
    const auto stats = gamma_stats(state.latent, x, K);
    for (std::size_t k = 0; k < K; ++k) {
      const auto draw = sample_eta_k(k, stats[k], state.mix, priors, state.proposal_sd[k], rng);
      state.mix.eta[k] = draw.value;
      result.eta_accepted[k] = draw.accepted ? 1 : 0;
    }
  }

  state.mix.validate();
  state.markov.validate(K + 1);
  // A clamped V next to a free (Z, W) block is allowed to disagree in sign.
  if (!config.clamp.v || config.clamp.zw) validate(state.latent, data, K + 1);
  return result;
}

// --- Initialization ------------------------------------------------------------

MixtureParams initial_mixture(std::span<const double> x, std::size_t K) {
  if (x.empty()) throw DomainError("cannot initialize from an empty dataset");
  if (K == 0) throw ConfigError("K must be at least 1");
  const std::size_t bins = K + 1;
  double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  lo = std::max(lo, std::min(hi, 0.0) + 1e-6);
  double width = (hi - lo) / static_cast<double>(bins);
  if (!(width > 0.0)) width = std::max(std::abs(hi), 1.0) / static_cast<double>(bins);

  std::vector<double> count(bins, 0.0), sum(bins, 0.0), sum_sq(bins, 0.0);
  for (double v : x) {
    if (v < lo) continue;
    auto b = static_cast<std::size_t>((v - lo) / width);
    b = std::min(b, bins - 1);
    count[b] += 1.0;
    sum[b] += v;
    sum_sq[b] += v * v;
  }

  MixtureParams mix;
  mix.theta.resize(K);
  mix.eta.resize(K);
  for (std::size_t b = 0; b < bins; ++b) {
    const double mid = lo + (static_cast<double>(b) + 0.5) * width;
    double mean = mid, var = width * width / 12.0;
    if (count[b] >= 2.0) {
      mean = sum[b] / count[b];
      const double sv = (sum_sq[b] - count[b] * mean * mean) / (count[b] - 1.0);
      if (sv > 0.0) var = sv;
    } else if (count[b] == 1.0) {
      mean = sum[b];
    }
    if (b < K) {
      mix.theta[b] = mean;
      mix.eta[b] = mean * mean / var;
    } else {
      mix.mu = mean;
      mix.sigma2 = var;
    }
  }
  return mix;
}

ChainState initial_state(const Dataset& data, const Priors& priors, const ChainConfig& config) {
  const std::size_t K = priors.K();
  ChainState state;
  state.mix = config.initial_mix ? *config.initial_mix : initial_mixture(data.all_x(), K);
  if (state.mix.K() != K) throw ConfigError("initial mixture and priors disagree on K");
  state.mix.validate();
  if (config.initial_markov) {
    state.markov = *config.initial_markov;
  } else {
    state.markov.q0.assign(K + 1, 1.0 / static_cast<double>(K + 1));
    state.markov.Q = Matrix(K + 1, K + 1, 1.0 / static_cast<double>(K + 1));
    state.markov.beta = priors.mu0;
  }
  state.markov.validate(K + 1);
  state.latent.resize(data.total_n());
  state.proposal_sd.resize(K);
  for (std::size_t k = 0; k < K; ++k) state.proposal_sd[k] = config.initial_proposal_cv * state.mix.eta[k];
  state.accepted.assign(K, 0);
  state.attempted.assign(K, 0);
  return state;
}

// --- Posterior sample ----------------------------------------------------------

std::vector<std::string> parameter_names(std::size_t K) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < K; ++k) names.push_back("theta_" + std::to_string(k + 1));
  for (std::size_t k = 0; k < K; ++k) names.push_back("eta_" + std::to_string(k + 1));
  names.push_back("mu");
  names.push_back("sigma2");
  names.push_back("beta_0");
  names.push_back("beta_1");
  for (std::size_t k = 0; k <= K; ++k) names.push_back("q0_" + std::to_string(k + 1));
  for (std::size_t j = 0; j <= K; ++j)
    for (std::size_t k = 0; k <= K; ++k) names.push_back("Q_" + std::to_string(j + 1) + "_" + std::to_string(k + 1));
  return names;
}

std::vector<double> flatten_parameters(const MixtureParams& mix, const MarkovParams& markov) {
  std::vector<double> out;
  out.insert(out.end(), mix.theta.begin(), mix.theta.end());
  out.insert(out.end(), mix.eta.begin(), mix.eta.end());
  out.push_back(mix.mu);
  out.push_back(mix.sigma2);
  out.push_back(markov.beta[0]);
  out.push_back(markov.beta[1]);
  out.insert(out.end(), markov.q0.begin(), markov.q0.end());
  out.insert(out.end(), markov.Q.values().begin(), markov.Q.values().end());
  return out;
}

std::vector<double> PosteriorSample::column(std::size_t param) const {
  std::vector<double> out(M());
  for (std::size_t m = 0; m < M(); ++m) out[m] = value(m, param);
  return out;
}

std::size_t PosteriorSample::parameter_index(const std::string& name) const {
  const auto it = std::find(parameter_names.begin(), parameter_names.end(), name);
  if (it == parameter_names.end()) throw DomainError("unknown parameter '" + name + "'");
  return static_cast<std::size_t>(it - parameter_names.begin());
}

std::size_t PosteriorSample::chromosome_of(std::size_t site) const {
  if (site >= n()) throw DomainError("location index out of range");
  const auto it = std::upper_bound(offsets.begin(), offsets.end(), site);
  return static_cast<std::size_t>(it - offsets.begin()) - 1;
}

ChainFailure::ChainFailure(std::size_t iteration, ChainState snapshot, const std::string& what)
    : SamplerError("iteration " + std::to_string(iteration) + ": " + what),
      iteration_(iteration),
      snapshot_(std::move(snapshot)) {}

// --- Chain ---------------------------------------------------------------------

Chain::Chain(const Dataset& data, Priors priors, ChainConfig config, std::uint64_t seed)
    : data_(&data), priors_(std::move(priors)), config_(std::move(config)), seed_(seed), rng_(seed) {
  config_.validate();
  priors_.validate();
  validate(data);
  if (data.total_n() == 0) throw DomainError("dataset is empty");
  state_ = initial_state(data, priors_, config_);

  const std::size_t K = priors_.K();
  sample_.K = K;
  sample_.offsets = data.offsets();
  for (const auto& s : data.series) {
    sample_.chromosomes.push_back(s.chromosome);
    sample_.positions.insert(sample_.positions.end(), s.positions.begin(), s.positions.end());
  }
  sample_.parameter_names = parameter_names(K);
  sample_.allocation_counts.assign(data.total_n() * (K + 1), 0);
  sample_.z_thin = config_.z_thin;
  sample_.eta_accepted.assign(K, 0);
  sample_.eta_attempted.assign(K, 0);
  sample_.proposal_sd = state_.proposal_sd;
}

void Chain::step() {
  if (done()) return;
  ChainState before = state_;
  SweepResult sweep;
  try {
    sweep = gibbs_sweep(state_, *data_, priors_, config_, rng_);
  } catch (const Error& e) {
    throw ChainFailure(before.iteration + 1, std::move(before), e.what());
  }
  state_.iteration += 1;
  const std::size_t t = state_.iteration;
  const std::size_t K = state_.mix.K();
  if (!config_.clamp.eta) {
    if (t <= config_.burn_in) {
      if (config_.adapt) {
        const double gain = std::pow(static_cast<double>(t) + 1.0, -0.6);
        for (std::size_t k = 0; k < K; ++k) {
          const double acc = sweep.eta_accepted[k] ? 1.0 : 0.0;
          state_.proposal_sd[k] *= std::exp(gain * (acc - config_.target_acceptance));
        }
      }
    } else {
      for (std::size_t k = 0; k < K; ++k) {
        state_.attempted[k] += 1;
        state_.accepted[k] += sweep.eta_accepted[k];
      }
    }
  }
  if (t > config_.burn_in) record(sweep);
}

void Chain::record(const SweepResult&) {
  const std::size_t K1 = state_.mix.components();
  auto row = flatten_parameters(state_.mix, state_.markov);
  sample_.trace.insert(sample_.trace.end(), row.begin(), row.end());
  sample_.iterations.push_back(state_.iteration);
  const std::size_t n = state_.latent.size();
  for (std::size_t i = 0; i < n; ++i) sample_.allocation_counts[i * K1 + state_.latent.z[i]] += 1;
  const std::size_t retained = state_.iteration - config_.burn_in - 1;
  if (retained % config_.z_thin == 0) {
    std::vector<std::uint8_t> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = state_.latent.z[i] == K1 - 1 ? 1 : 0;
    sample_.gaussian_draws.push_back(std::move(g));
  }
  sample_.eta_accepted = state_.accepted;
  sample_.eta_attempted = state_.attempted;
  sample_.proposal_sd = state_.proposal_sd;
}

void Chain::run_until(std::size_t iteration) {
  while (!done() && state_.iteration < iteration) step();
}

void Chain::restore(ChainState state, Rng rng, PosteriorSample sample) {
  state_ = std::move(state);
  rng_ = std::move(rng);
  sample_ = std::move(sample);
}

PosteriorSample run_mcmc(const Dataset& data, const Priors& priors, const ChainConfig& config, std::uint64_t seed) {
  Chain chain(data, priors, config, seed);
  chain.run_until(config.iterations);
  return chain.sample();
}

}  // namespace hmmix
