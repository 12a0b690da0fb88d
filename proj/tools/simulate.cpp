#include <memory>
#include <numeric>
#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "hmmix/error.hpp"
#include "hmmix/oracle.hpp"
#include "hmmix/output.hpp"
#include "hmmix/random.hpp"

namespace hmmix::cli {

namespace {

struct SimulateCommand {
  Settings settings;
  int run(std::ostream& out, std::ostream& log);
};

std::vector<double> normalized(std::span<const double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= total;
  return out;
}

// Default truth for K = 4 sits at the prior means of the default priors.
void default_truth(std::size_t K, MixtureParams& mix, MarkovParams& markov) {
  const Priors p = default_priors(K);
  for (std::size_t k = 0; k < K; ++k) {
    mix.theta.push_back(p.t2[k] / (p.t1[k] - 1.0));
    mix.eta.push_back(p.e1[k]);
  }
  mix.mu = p.m;
  mix.sigma2 = p.s2 / (p.s1 - 1.0);
  markov.q0 = normalized(p.r0);
  markov.Q = Matrix(K + 1, K + 1);
  for (std::size_t j = 0; j <= K; ++j) {
    const auto row = normalized(p.r.row(j));
    std::copy(row.begin(), row.end(), markov.Q.row(j).begin());
  }
  markov.beta = p.mu0;
}

std::pair<MixtureParams, MarkovParams> resolve_truth(KeyValueConfig& kv, std::size_t K) {
  const char* keys[] = {"truth.theta", "truth.eta", "truth.mu", "truth.sigma2", "truth.q0", "truth.Q", "truth.beta"};
  bool all = true;
  for (const char* k : keys) all = all && kv.has(k);
  MixtureParams mix;
  MarkovParams markov;
  if (!all) {
    if (K != 4) throw ConfigError("K != 4 needs every truth.* key (theta, eta, mu, sigma2, q0, Q, beta)");
    default_truth(K, mix, markov);
  }
  if (kv.has("truth.theta")) mix.theta = kv.get_doubles("truth.theta");
  if (kv.has("truth.eta")) mix.eta = kv.get_doubles("truth.eta");
  if (kv.has("truth.mu")) mix.mu = kv.get_double("truth.mu");
  if (kv.has("truth.sigma2")) mix.sigma2 = kv.get_double("truth.sigma2");
  if (kv.has("truth.q0")) markov.q0 = kv.get_doubles("truth.q0");
  if (kv.has("truth.Q")) {
    const auto flat = kv.get_doubles("truth.Q");
    if (flat.size() != (K + 1) * (K + 1)) throw ConfigError("truth.Q must be (K+1)x(K+1), row-major");
    markov.Q = Matrix(K + 1, K + 1);
    markov.Q.values() = flat;
  }
  if (kv.has("truth.beta")) {
    const auto b = kv.get_doubles("truth.beta");
    if (b.size() != 2) throw ConfigError("truth.beta needs two values");
    markov.beta = {b[0], b[1]};
  }
  if (mix.K() != K || mix.eta.size() != K) throw ConfigError("truth.theta and truth.eta need K values");
  try {
    mix.validate();
    markov.validate(K + 1);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid truth: ") + e.what());
  }
  kv.set("truth.theta", mix.theta);
  kv.set("truth.eta", mix.eta);
  kv.set("truth.mu", mix.mu);
  kv.set("truth.sigma2", mix.sigma2);
  kv.set("truth.q0", markov.q0);
  kv.set("truth.Q", markov.Q.values());
  kv.set("truth.beta", std::vector<double>(markov.beta.begin(), markov.beta.end()));
  return {mix, markov};
}

int SimulateCommand::run(std::ostream& out, std::ostream& log) {
  settings.resolve();
  auto& kv = settings.kv();
  const std::uint64_t seed = settings.seed(log);
  const std::size_t K = settings.count_or("model.K", 4);
  if (K == 0) throw ConfigError("K must be at least 1");
  const std::size_t n = settings.count_or("sim.n", 5000);
  const std::size_t chromosomes = settings.count_or("sim.chromosomes", 1);
  const std::size_t max_gap = settings.count_or("sim.max_gap", 20000);
  if (chromosomes == 0 || n < chromosomes) throw ConfigError("need at least one location per chromosome");
  if (max_gap < 2) throw ConfigError("sim.max_gap must be at least 2");
  kv.set("model.K", std::to_string(K));
  kv.set("sim.n", std::to_string(n));
  kv.set("sim.chromosomes", std::to_string(chromosomes));
  kv.set("sim.max_gap", std::to_string(max_gap));
  const auto [mix, markov] = resolve_truth(kv, K);

  Rng rng = make_substream(seed, "simulation");
  std::vector<ChromosomeLayout> layout;
  for (std::size_t c = 0; c < chromosomes; ++c) {
    const std::size_t size = n / chromosomes + (c < n % chromosomes ? 1 : 0);
    layout.push_back({"chr" + std::to_string(c + 1),
                      random_positions(size, static_cast<std::int64_t>(max_gap), rng)});
  }
  const auto sim = simulate_dataset(mix, markov, layout, rng);

  const auto dir = ensure_directory(settings.get_or("output_dir", "."));
  {
    auto f = open_output(dir / "data.csv");
    write_expression_table(f, sim.data);
  }
  {
    auto f = open_output(dir / "truth.csv");
    f << "chromosome,position,z,w\n";
    std::size_t g = 0;
    for (const auto& s : sim.data.series) {
      for (std::size_t i = 0; i < s.size(); ++i, ++g) {
        f << s.chromosome << ',' << s.positions[i] << ',' << int(sim.truth.latent.z[g]) + 1 << ','
          << int(sim.truth.latent.w[g]) << '\n';
      }
    }
  }
  write_manifest(dir / "manifest.txt", kv, "simulate");
  out << "simulated " << n << " locations on " << chromosomes << " chromosomes into " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

void add_simulate(CLI::App& app, Runner& runner) {
  auto cmd = std::make_shared<SimulateCommand>();
  auto* sub = app.add_subcommand("simulate", "Draw a synthetic dataset from the generative model");
  cmd->settings.bind(*sub);
  auto& s = cmd->settings;
  s.flag(*sub, "-o,--output-dir", "output_dir", "directory for data.csv, truth.csv and manifest.txt");
  s.flag(*sub, "-n,--n", "sim.n", "total number of locations (default 5000)");
  s.flag(*sub, "--chromosomes", "sim.chromosomes", "number of chromosomes (default 1)");
  s.flag(*sub, "--max-gap", "sim.max_gap", "largest gap between consecutive probes in bp (default 20000)");
  s.flag(*sub, "-K,--K", "model.K", "number of gamma components (default 4)");
  sub->callback([cmd, &runner] { runner = [cmd](std::ostream& o, std::ostream& l) { return cmd->run(o, l); }; });
}

}  // namespace hmmix::cli
