#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hmmix/model.hpp"

namespace hmmix {

// Blocks of the sweep that may be held fixed. Used by tests and diagnostics
// to isolate a single conditional update; production fits clamp nothing.
struct ClampMask {
  bool zw = false;
  bool v = false;
  bool q0 = false;
  bool Q = false;
  bool beta = false;
  bool psi = false;
  bool eta = false;
};

struct ChainConfig {
  std::size_t iterations = 15000;
  std::size_t burn_in = 5000;
  std::size_t z_thin = 10;        // keep every z_thin-th post-burn-in Gaussian-indicator draw
  std::size_t threads = 1;        // per-chromosome filtering workers
  bool adapt = true;              // Robbins-Monro on log proposal sd, burn-in only
  double target_acceptance = 0.44;
  double initial_proposal_cv = 0.1;  // tau_k starts at this fraction of eta_k
  std::size_t psi_rejection_cap = 10000;
  ClampMask clamp;

  std::optional<MixtureParams> initial_mix;
  std::optional<MarkovParams> initial_markov;

  void validate() const;
};

ChainConfig default_chain_config();

// Plain-text `key = value` configuration; `#` starts a comment. Vector values
// are comma-separated; matrices are row-major.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  void set(const std::string& key, double value);
  void set(const std::string& key, const std::vector<double>& values);
  // Entries from other override entries here.
  void merge(const KeyValueConfig& other);

  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Keys: prior.r0, prior.r, prior.t1, prior.t2, prior.e1, prior.e2, prior.m,
// prior.v, prior.s1, prior.s2, prior.mu0, prior.Sigma0.
void write_priors(KeyValueConfig& kv, const Priors& priors);
// Starts from `base` and overrides whatever keys are present.
Priors read_priors(const KeyValueConfig& kv, Priors base);
// True when kv carries a complete prior block for K components.
bool has_complete_priors(const KeyValueConfig& kv);

// Keys: chain.iterations, chain.burn_in, chain.z_thin, chain.adapt,
// chain.target_acceptance, chain.initial_proposal_cv, chain.psi_rejection_cap,
// init.theta, init.eta, init.mu, init.sigma2, init.q0, init.Q, init.beta.
void write_chain_config(KeyValueConfig& kv, const ChainConfig& config);
ChainConfig read_chain_config(const KeyValueConfig& kv, ChainConfig base);

}  // namespace hmmix
