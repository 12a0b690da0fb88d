#include "hmmix/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "hmmix/error.hpp"
#include "hmmix/text.hpp"

namespace hmmix {

void ChainConfig::validate() const {
  if (iterations == 0) throw ConfigError("iterations must be positive");
  if (burn_in >= iterations) {
    throw ConfigError("burn-in (" + std::to_string(burn_in) + ") must be smaller than iterations (" +
                      std::to_string(iterations) + ")");
  }
  if (z_thin == 0) throw ConfigError("z_thin must be at least 1");
  if (threads == 0) throw ConfigError("threads must be at least 1");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw ConfigError("target acceptance must lie in (0,1)");
  }
  if (!(initial_proposal_cv > 0.0)) throw ConfigError("initial proposal cv must be positive");
  if (psi_rejection_cap == 0) throw ConfigError("psi rejection cap must be positive");
}

ChainConfig default_chain_config() { return ChainConfig{}; }

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = text::trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv.values_[std::string(key)] = std::string(text::trim(body.substr(eq + 1)));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in);
}

void KeyValueConfig::write(std::ostream& out) const {
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

void KeyValueConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  write(out);
}

const std::string& KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void KeyValueConfig::set(const std::string& key, double value) { values_[key] = text::format_double(value); }

void KeyValueConfig::set(const std::string& key, const std::vector<double>& values) {
  values_[key] = text::join_doubles(values);
}

void KeyValueConfig::merge(const KeyValueConfig& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const auto v = text::parse_double(get(key));
  if (!v) throw ConfigError("config key '" + key + "' is not a number");
  return *v;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const auto v = text::parse_int(get(key));
  if (!v) throw ConfigError("config key '" + key + "' is not an integer");
  return *v;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  const auto v = text::parse_double_list(get(key));
  if (!v) throw ConfigError("config key '" + key + "' is not a list of numbers");
  return *v;
}

namespace {

std::size_t get_count(const KeyValueConfig& kv, const std::string& key) {
  const auto v = kv.get_int(key);
  if (v < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

bool get_bool(const KeyValueConfig& kv, const std::string& key) {
  const auto& s = kv.get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key '" + key + "' is not a boolean");
}

Matrix square_matrix(const std::vector<double>& flat, const std::string& key) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
  if (side * side != flat.size() || side == 0) {
    throw ConfigError("config key '" + key + "' must hold a square matrix (row-major)");
  }
  Matrix m(side, side);
  m.values() = flat;
  return m;
}

const char* const kPriorKeys[] = {"prior.r0", "prior.r",  "prior.t1", "prior.t2",  "prior.e1",  "prior.e2",
                                  "prior.m",  "prior.v",  "prior.s1", "prior.s2", "prior.mu0", "prior.Sigma0"};

}  // namespace

void write_priors(KeyValueConfig& kv, const Priors& p) {
  kv.set("prior.r0", p.r0);
  kv.set("prior.r", p.r.values());
  kv.set("prior.t1", p.t1);
  kv.set("prior.t2", p.t2);
  kv.set("prior.e1", p.e1);
  kv.set("prior.e2", p.e2);
  kv.set("prior.m", p.m);
  kv.set("prior.v", p.v);
  kv.set("prior.s1", p.s1);
  kv.set("prior.s2", p.s2);
  kv.set("prior.mu0", std::vector<double>(p.mu0.begin(), p.mu0.end()));
  kv.set("prior.Sigma0", std::vector<double>(p.Sigma0.begin(), p.Sigma0.end()));
}

bool has_complete_priors(const KeyValueConfig& kv) {
  for (const char* key : kPriorKeys) {
    if (!kv.has(key)) return false;
  }
  return true;
}

Priors read_priors(const KeyValueConfig& kv, Priors p) {
  if (kv.has("prior.r0")) p.r0 = kv.get_doubles("prior.r0");
  if (kv.has("prior.r")) p.r = square_matrix(kv.get_doubles("prior.r"), "prior.r");
  if (kv.has("prior.t1")) p.t1 = kv.get_doubles("prior.t1");
  if (kv.has("prior.t2")) p.t2 = kv.get_doubles("prior.t2");
  if (kv.has("prior.e1")) p.e1 = kv.get_doubles("prior.e1");
  if (kv.has("prior.e2")) p.e2 = kv.get_doubles("prior.e2");
  if (kv.has("prior.m")) p.m = kv.get_double("prior.m");
  if (kv.has("prior.v")) p.v = kv.get_double("prior.v");
  if (kv.has("prior.s1")) p.s1 = kv.get_double("prior.s1");
  if (kv.has("prior.s2")) p.s2 = kv.get_double("prior.s2");
  if (kv.has("prior.mu0")) {
    const auto v = kv.get_doubles("prior.mu0");
    if (v.size() != 2) throw ConfigError("prior.mu0 needs two values");
    p.mu0 = {v[0], v[1]};
  }
  if (kv.has("prior.Sigma0")) {
    const auto v = kv.get_doubles("prior.Sigma0");
    if (v.size() != 4) throw ConfigError("prior.Sigma0 needs four values (row-major 2x2)");
    p.Sigma0 = {v[0], v[1], v[2], v[3]};
  }
  p.validate();
  return p;
}

void write_chain_config(KeyValueConfig& kv, const ChainConfig& c) {
  kv.set("chain.iterations", std::to_string(c.iterations));
  kv.set("chain.burn_in", std::to_string(c.burn_in));
  kv.set("chain.z_thin", std::to_string(c.z_thin));
  kv.set("chain.adapt", c.adapt ? "true" : "false");
  kv.set("chain.target_acceptance", c.target_acceptance);
  kv.set("chain.initial_proposal_cv", c.initial_proposal_cv);
  kv.set("chain.psi_rejection_cap", std::to_string(c.psi_rejection_cap));
  if (c.initial_mix) {
    kv.set("init.theta", c.initial_mix->theta);
    kv.set("init.eta", c.initial_mix->eta);
    kv.set("init.mu", c.initial_mix->mu);
    kv.set("init.sigma2", c.initial_mix->sigma2);
  }
  if (c.initial_markov) {
    kv.set("init.q0", c.initial_markov->q0);
    kv.set("init.Q", c.initial_markov->Q.values());
    kv.set("init.beta", std::vector<double>(c.initial_markov->beta.begin(), c.initial_markov->beta.end()));
  }
}

ChainConfig read_chain_config(const KeyValueConfig& kv, ChainConfig c) {
  if (kv.has("chain.iterations")) c.iterations = get_count(kv, "chain.iterations");
  if (kv.has("chain.burn_in")) c.burn_in = get_count(kv, "chain.burn_in");
  if (kv.has("chain.z_thin")) c.z_thin = get_count(kv, "chain.z_thin");
  if (kv.has("chain.adapt")) c.adapt = get_bool(kv, "chain.adapt");
  if (kv.has("chain.target_acceptance")) c.target_acceptance = kv.get_double("chain.target_acceptance");
  if (kv.has("chain.initial_proposal_cv")) c.initial_proposal_cv = kv.get_double("chain.initial_proposal_cv");
  if (kv.has("chain.psi_rejection_cap")) c.psi_rejection_cap = get_count(kv, "chain.psi_rejection_cap");

  const bool any_mix = kv.has("init.theta") || kv.has("init.eta") || kv.has("init.mu") || kv.has("init.sigma2");
  if (any_mix) {
    if (!(kv.has("init.theta") && kv.has("init.eta") && kv.has("init.mu") && kv.has("init.sigma2"))) {
      throw ConfigError("init.theta, init.eta, init.mu and init.sigma2 must be given together");
    }
    MixtureParams m;
    m.theta = kv.get_doubles("init.theta");
    m.eta = kv.get_doubles("init.eta");
    m.mu = kv.get_double("init.mu");
    m.sigma2 = kv.get_double("init.sigma2");
    c.initial_mix = m;
  }
  const bool any_markov = kv.has("init.q0") || kv.has("init.Q") || kv.has("init.beta");
  if (any_markov) {
    if (!(kv.has("init.q0") && kv.has("init.Q") && kv.has("init.beta"))) {
      throw ConfigError("init.q0, init.Q and init.beta must be given together");
    }
    MarkovParams mk;
    mk.q0 = kv.get_doubles("init.q0");
    mk.Q = square_matrix(kv.get_doubles("init.Q"), "init.Q");
    const auto b = kv.get_doubles("init.beta");
    if (b.size() != 2) throw ConfigError("init.beta needs two values");
    mk.beta = {b[0], b[1]};
    c.initial_markov = mk;
  }
  return c;
}

}  // namespace hmmix
