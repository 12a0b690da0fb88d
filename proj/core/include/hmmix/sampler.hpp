#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hmmix/config.hpp"
#include "hmmix/error.hpp"
#include "hmmix/data.hpp"
#include "hmmix/model.hpp"
#include "hmmix/random.hpp"

namespace hmmix {

struct ChainState {
  LatentState latent;
  MixtureParams mix;
  MarkovParams markov;
  std::size_t iteration = 0;  // completed sweeps

  // Random-walk proposal sd for each eta_k and post-burn-in acceptance tallies.
  std::vector<double> proposal_sd;
  std::vector<std::size_t> accepted;
  std::vector<std::size_t> attempted;
};

// --- Conditional updates ----------------------------------------------------

// V_i ~ N(beta'(1, d_i), 1) truncated by the sign W_i encodes, at every free
// location. First-of-chromosome entries are left as NaN.
void sample_v(LatentState& latent, const MarkovParams& markov, const Dataset& data, Rng& rng);

// Dirichlet concentrations of the q0 and Q full conditionals.
std::vector<double> q0_posterior(const LatentState& latent, const Dataset& data, const Priors& priors);
Matrix Q_posterior(const LatentState& latent, const Dataset& data, const Priors& priors);
std::vector<double> sample_q0(const LatentState& latent, const Dataset& data, const Priors& priors, Rng& rng);
Matrix sample_Q(const LatentState& latent, const Dataset& data, const Priors& priors, Rng& rng);

struct GaussianPosterior2 {
  Vec2 mean;
  Mat2 cov;
};
// Sums run over locations where V is defined.
GaussianPosterior2 beta_posterior(const LatentState& latent, const Dataset& data, const Priors& priors);
Vec2 sample_beta(const LatentState& latent, const Dataset& data, const Priors& priors, Rng& rng);

// Unconstrained conditional of psi = (theta, mu, sigma2):
//   sigma2 ~ IG(s1*, s2*),  mu | sigma2 ~ N(m*, sigma2 * v_scale),
//   theta_k ~ IG(t1k*, t2k*).
struct PsiPosterior {
  double s1 = 0.0, s2 = 0.0;
  double m = 0.0, v_scale = 0.0;
  std::vector<double> t1, t2;
};
PsiPosterior psi_posterior(const LatentState& latent, std::span<const double> x, std::span<const double> eta,
                           const Priors& priors);

// Draws psi from the conditional restricted to theta_1 < ... < theta_K < mu by
// repeat-until-ordered. Throws OrderingFailureError after `cap` attempts.
// eta is copied from `current`.
MixtureParams sample_psi(const PsiPosterior& post, const MixtureParams& current, std::size_t cap, Rng& rng);

// Sufficient statistics of the locations allocated to one gamma component.
struct GammaStats {
  std::size_t count = 0;
  double sum_x = 0.0;
  double sum_log_x = 0.0;
};
std::vector<GammaStats> gamma_stats(const LatentState& latent, std::span<const double> x, std::size_t K);

// log of prod_{i: Z_i = k} f_k(x_i | eta, theta) * pi(eta), -inf for eta <= 0.
double eta_log_target(double eta, double theta, const GammaStats& stats, double prior_mean, double prior_shape);

struct EtaDraw {
  double value = 0.0;
  bool accepted = false;
};
// Gaussian random-walk Metropolis-Hastings step for eta_k.
EtaDraw sample_eta_k(std::size_t k, const GammaStats& stats, const MixtureParams& mix, const Priors& priors,
                     double proposal_sd, Rng& rng);
// Same step with the proposal supplied (for deterministic checks).
EtaDraw eta_mh_step(double current, double proposal, double theta, const GammaStats& stats, double prior_mean,
                    double prior_shape, double uniform);
double eta_acceptance_probability(double current, double proposal, double theta, const GammaStats& stats,
                                  double prior_mean, double prior_shape);

// --- Sweeps ------------------------------------------------------------------

struct SweepResult {
  std::vector<std::uint8_t> eta_accepted;
};

// One pass over the blocks (Z,W) ; V ; (q0, Q, beta, psi) ; eta. (Z, W) is
// drawn per chromosome with V integrated out; chromosome c uses an engine
// derived from one key drawn from `rng` and c, so the result does not depend
// on `threads`.
SweepResult gibbs_sweep(ChainState& state, const Dataset& data, const Priors& priors, const ChainConfig& config,
                        Rng& rng);

// Starting values: q0 and Q uniform, beta at the prior mean, and (theta, mu,
// eta, sigma2) from K+1 equal-width bins over [min x, max x].
MixtureParams initial_mixture(std::span<const double> x, std::size_t K);
ChainState initial_state(const Dataset& data, const Priors& priors, const ChainConfig& config);

// --- Posterior sample ----------------------------------------------------------

struct PosteriorSample {
  std::size_t K = 0;
  std::vector<std::string> chromosomes;
  std::vector<std::size_t> offsets;  // per chromosome, plus total at the end
  std::vector<std::int64_t> positions;

  std::vector<std::string> parameter_names;
  std::vector<double> trace;  // M rows of parameter_names.size() values
  std::vector<std::size_t> iterations;

  std::vector<std::uint32_t> allocation_counts;  // n x (K+1) tallies over all M draws
  std::size_t z_thin = 1;
  std::vector<std::vector<std::uint8_t>> gaussian_draws;  // thinned Z_{i,K+1} draws

  std::vector<std::size_t> eta_accepted, eta_attempted;
  std::vector<double> proposal_sd;

  std::size_t M() const { return iterations.size(); }
  std::size_t n() const { return positions.size(); }
  std::size_t parameters() const { return parameter_names.size(); }
  double value(std::size_t draw, std::size_t param) const { return trace[draw * parameter_names.size() + param]; }
  std::vector<double> column(std::size_t param) const;
  std::size_t parameter_index(const std::string& name) const;
  std::size_t chromosome_of(std::size_t site) const;
};

std::vector<std::string> parameter_names(std::size_t K);
std::vector<double> flatten_parameters(const MixtureParams& mix, const MarkovParams& markov);

// Sampler failure annotated with the sweep and the state before that sweep.
class ChainFailure : public SamplerError {
 public:
  ChainFailure(std::size_t iteration, ChainState snapshot, const std::string& what);
  std::size_t iteration() const { return iteration_; }
  const ChainState& snapshot() const { return snapshot_; }

 private:
  std::size_t iteration_;
  ChainState snapshot_;
};

// A resumable chain: the full sampler state, its engine and the retained
// sample so far. run_mcmc drives one from start to finish.
class Chain {
 public:
  Chain(const Dataset& data, Priors priors, ChainConfig config, std::uint64_t seed);

  bool done() const { return state_.iteration >= config_.iterations; }
  // Runs one sweep and records it. Throws ChainFailure.
  void step();
  void run_until(std::size_t iteration);

  const ChainState& state() const { return state_; }
  const PosteriorSample& sample() const { return sample_; }
  const ChainConfig& config() const { return config_; }
  const Priors& priors() const { return priors_; }
  std::uint64_t seed() const { return seed_; }
  const Rng& rng() const { return rng_; }

  // Restores everything step() touches (used by checkpoint loading).
  void restore(ChainState state, Rng rng, PosteriorSample sample);

 private:
  void record(const SweepResult& sweep);

  const Dataset* data_;
  Priors priors_;
  ChainConfig config_;
  std::uint64_t seed_;
  Rng rng_;
  ChainState state_;
  PosteriorSample sample_;
};

PosteriorSample run_mcmc(const Dataset& data, const Priors& priors, const ChainConfig& config, std::uint64_t seed);

}  // namespace hmmix
