#include "hmmix/checkpoint.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hmmix/error.hpp"

namespace hmmix {

namespace {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;

json kv_to_json(const KeyValueConfig& kv) {
  json j = json::object();
  for (const auto& [k, v] : kv.entries()) j[k] = v;
  return j;
}

KeyValueConfig kv_from_json(const json& j) {
  KeyValueConfig kv;
  for (auto it = j.begin(); it != j.end(); ++it) kv.set(it.key(), it.value().get<std::string>());
  return kv;
}

// NaN marks undefined V entries; JSON has no NaN so they become null.
json doubles_to_json(const std::vector<double>& v) {
  json j = json::array();
  for (double x : v) {
    if (std::isnan(x)) {
      j.push_back(nullptr);
    } else {
      j.push_back(x);
    }
  }
  return j;
}

std::vector<double> doubles_from_json(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
  return v;
}

json matrix_to_json(const Matrix& m) { return json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.values()}}; }

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.values() = j.at("values").get<std::vector<double>>();
  if (m.values().size() != m.rows() * m.cols()) throw SchemaError("checkpoint matrix has the wrong size");
  return m;
}

json mix_to_json(const MixtureParams& m) {
  return json{{"theta", m.theta}, {"eta", m.eta}, {"mu", m.mu}, {"sigma2", m.sigma2}};
}

MixtureParams mix_from_json(const json& j) {
  MixtureParams m;
  m.theta = j.at("theta").get<std::vector<double>>();
  m.eta = j.at("eta").get<std::vector<double>>();
  m.mu = j.at("mu").get<double>();
  m.sigma2 = j.at("sigma2").get<double>();
  return m;
}

json markov_to_json(const MarkovParams& m) {
  return json{{"q0", m.q0}, {"Q", matrix_to_json(m.Q)}, {"beta", m.beta}};
}

MarkovParams markov_from_json(const json& j) {
  MarkovParams m;
  m.q0 = j.at("q0").get<std::vector<double>>();
  m.Q = matrix_from_json(j.at("Q"));
  m.beta = j.at("beta").get<Vec2>();
  return m;
}

json state_to_json(const ChainState& s) {
  return json{{"z", s.latent.z},
              {"w", s.latent.w},
              {"v", doubles_to_json(s.latent.v)},
              {"mix", mix_to_json(s.mix)},
              {"markov", markov_to_json(s.markov)},
              {"iteration", s.iteration},
              {"proposal_sd", s.proposal_sd},
              {"accepted", s.accepted},
              {"attempted", s.attempted}};
}

ChainState state_from_json(const json& j) {
  ChainState s;
  s.latent.z = j.at("z").get<std::vector<std::uint8_t>>();
  s.latent.w = j.at("w").get<std::vector<std::uint8_t>>();
  s.latent.v = doubles_from_json(j.at("v"));
  s.mix = mix_from_json(j.at("mix"));
  s.markov = markov_from_json(j.at("markov"));
  s.iteration = j.at("iteration").get<std::size_t>();
  s.proposal_sd = j.at("proposal_sd").get<std::vector<double>>();
  s.accepted = j.at("accepted").get<std::vector<std::size_t>>();
  s.attempted = j.at("attempted").get<std::vector<std::size_t>>();
  return s;
}

// Gaussian draws are packed as '0'/'1' strings to keep the file compact.
json draws_to_json(const std::vector<std::vector<std::uint8_t>>& draws) {
  json j = json::array();
  std::string buf;
  for (const auto& d : draws) {
    buf.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) buf[i] = d[i] ? '1' : '0';
    j.push_back(buf);
  }
  return j;
}

std::vector<std::vector<std::uint8_t>> draws_from_json(const json& j) {
  std::vector<std::vector<std::uint8_t>> draws;
  for (const auto& s : j) {
    const auto str = s.get<std::string>();
    std::vector<std::uint8_t> d(str.size());
    for (std::size_t i = 0; i < str.size(); ++i) d[i] = str[i] == '1';
    draws.push_back(std::move(d));
  }
  return draws;
}

json sample_to_json(const PosteriorSample& s) {
  return json{{"K", s.K},
              {"chromosomes", s.chromosomes},
              {"offsets", s.offsets},
              {"positions", s.positions},
              {"parameter_names", s.parameter_names},
              {"trace", s.trace},
              {"iterations", s.iterations},
              {"allocation_counts", s.allocation_counts},
              {"z_thin", s.z_thin},
              {"gaussian_draws", draws_to_json(s.gaussian_draws)},
              {"eta_accepted", s.eta_accepted},
              {"eta_attempted", s.eta_attempted},
              {"proposal_sd", s.proposal_sd}};
}

PosteriorSample sample_from_json(const json& j) {
  PosteriorSample s;
  s.K = j.at("K").get<std::size_t>();
  s.chromosomes = j.at("chromosomes").get<std::vector<std::string>>();
  s.offsets = j.at("offsets").get<std::vector<std::size_t>>();
  s.positions = j.at("positions").get<std::vector<std::int64_t>>();
  s.parameter_names = j.at("parameter_names").get<std::vector<std::string>>();
  s.trace = j.at("trace").get<std::vector<double>>();
  s.iterations = j.at("iterations").get<std::vector<std::size_t>>();
  s.allocation_counts = j.at("allocation_counts").get<std::vector<std::uint32_t>>();
  s.z_thin = j.at("z_thin").get<std::size_t>();
  s.gaussian_draws = draws_from_json(j.at("gaussian_draws"));
  s.eta_accepted = j.at("eta_accepted").get<std::vector<std::size_t>>();
  s.eta_attempted = j.at("eta_attempted").get<std::vector<std::size_t>>();
  s.proposal_sd = j.at("proposal_sd").get<std::vector<double>>();
  return s;
}

}  // namespace

Checkpoint make_checkpoint(const Chain& chain, const KeyValueConfig& manifest) {
  Checkpoint cp;
  cp.seed = chain.seed();
  cp.config = chain.config();
  cp.priors = chain.priors();
  cp.state = chain.state();
  std::ostringstream rng;
  rng << chain.rng();
  cp.rng_state = rng.str();
  cp.sample = chain.sample();
  cp.manifest = manifest;
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& cp) {
  KeyValueConfig config, priors;
  write_chain_config(config, cp.config);
  config.set("chain.threads", std::to_string(cp.config.threads));
  write_priors(priors, cp.priors);
  const json j{{"format", kFormatVersion},
               {"seed", cp.seed},
               {"config", kv_to_json(config)},
               {"priors", kv_to_json(priors)},
               {"state", state_to_json(cp.state)},
               {"rng", cp.rng_state},
               {"sample", sample_to_json(cp.sample)},
               {"manifest", kv_to_json(cp.manifest)}};
  // Write then rename so an interrupted save never leaves a torn file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw SchemaError("cannot write checkpoint '" + tmp.string() + "'");
    out << j.dump() << '\n';
    if (!out) throw SchemaError("failed writing checkpoint '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read checkpoint '" + path.string() + "'");
  try {
    const json j = json::parse(in);
    if (j.at("format").get<int>() != kFormatVersion) throw SchemaError("unsupported checkpoint format");
    Checkpoint cp;
    cp.seed = j.at("seed").get<std::uint64_t>();
    const auto config = kv_from_json(j.at("config"));
    cp.config = read_chain_config(config, ChainConfig{});
    if (config.has("chain.threads")) cp.config.threads = static_cast<std::size_t>(config.get_int("chain.threads"));
    cp.priors = read_priors(kv_from_json(j.at("priors")), Priors{});
    cp.state = state_from_json(j.at("state"));
    cp.rng_state = j.at("rng").get<std::string>();
    cp.sample = sample_from_json(j.at("sample"));
    cp.manifest = kv_from_json(j.at("manifest"));
    return cp;
  } catch (const json::exception& e) {
    throw SchemaError("malformed checkpoint '" + path.string() + "': " + e.what());
  }
}

Chain resume_chain(const Dataset& data, const Checkpoint& cp) {
  Chain chain(data, cp.priors, cp.config, cp.seed);
  if (cp.state.latent.size() != data.total_n() || cp.sample.n() != data.total_n()) {
    throw SchemaError("checkpoint does not match the dataset (" + std::to_string(cp.state.latent.size()) +
                      " locations vs " + std::to_string(data.total_n()) + ")");
  }
  validate(cp.state.latent, data, cp.state.mix.components());
  Rng rng;
  std::istringstream in(cp.rng_state);
  in >> rng;
  if (!in) throw SchemaError("checkpoint engine state is unreadable");
  chain.restore(cp.state, rng, cp.sample);
  return chain;
}

}  // namespace hmmix
