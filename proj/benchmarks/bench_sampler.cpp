#include <benchmark/benchmark.h>

#include <vector>

#include "hmmix/filter.hpp"
#include "hmmix/oracle.hpp"
#include "hmmix/sampler.hpp"

namespace {

using namespace hmmix;

struct Problem {
  MixtureParams mix;
  MarkovParams markov;
  SyntheticDataset sim;
};

Problem make_problem(std::size_t n, std::size_t chromosomes) {
  Problem p;
  p.mix.theta = {3.0, 6.0};
  p.mix.eta = {25.0, 40.0};
  p.mix.mu = 12.0;
  p.mix.sigma2 = 1.0;
  p.markov.q0 = {0.55, 0.40, 0.05};
  p.markov.Q = Matrix(3, 3);
  p.markov.Q.values() = {0.85, 0.12, 0.03, 0.12, 0.85, 0.03, 0.05, 0.05, 0.9};
  p.markov.beta = {2.0, -4.0};
  Rng rng(1);
  std::vector<ChromosomeLayout> layout;
  for (std::size_t c = 0; c < chromosomes; ++c) {
    layout.push_back({"chr" + std::to_string(c + 1), random_positions(n / chromosomes, 20000, rng)});
  }
  p.sim = simulate_dataset(p.mix, p.markov, layout, rng);
  return p;
}

Priors bench_priors() {
  Priors p;
  p.r0.assign(3, 1.0);
  p.r = Matrix(3, 3, 1.0);
  p.t1 = {2.0, 2.0};
  p.t2 = {3.0, 6.0};
  p.e1 = {50.0, 50.0};
  p.e2 = {1.0, 1.0};
  p.m = 12.0;
  p.v = 100.0;
  p.s1 = 2.0;
  p.s2 = 1.0;
  p.Sigma0 = {10.0, 0.0, 0.0, 10.0};
  return p;
}

void BM_BackwardFilter(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto cache = backward_filter(p.sim.data.series[0], p.mix, p.markov);
    benchmark::DoNotOptimize(cache.log_evidence());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BackwardFilter)->Arg(1000)->Arg(5000)->Arg(50000);

void BM_ForwardSample(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 1);
  const auto cache = backward_filter(p.sim.data.series[0], p.mix, p.markov);
  std::vector<std::uint8_t> z(cache.size()), w(cache.size());
  Rng rng(2);
  for (auto _ : state) {
    forward_sample(cache, rng, z, w);
    benchmark::DoNotOptimize(z.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardSample)->Arg(1000)->Arg(5000)->Arg(50000);

void BM_GibbsSweep(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 4);
  const auto priors = bench_priors();
  ChainConfig config = default_chain_config();
  config.threads = static_cast<std::size_t>(state.range(1));
  ChainState chain = initial_state(p.sim.data, priors, config);
  Rng rng(3);
  for (auto _ : state) gibbs_sweep(chain, p.sim.data, priors, config, rng);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GibbsSweep)->Args({5000, 1})->Args({5000, 4})->Args({50000, 1});

}  // namespace

BENCHMARK_MAIN();
