#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hmmix/sampler.hpp"

namespace hmmix {

// Moran's I with unstandardized inverse-distance weights w_ij = 1/|p_i - p_j|
// on raw base-pair positions.
double morans_i(std::span<const double> values, std::span<const std::int64_t> positions);

struct MoranResult {
  double statistic = 0.0;
  std::size_t permutations = 0;
  double p_value = 1.0;  // one-sided, greater
  std::uint64_t seed = 0;
};

// p = (1 + #{permuted I >= observed I}) / (permutations + 1). Permutation p
// shuffles with an engine derived from (seed, p), so the result does not
// depend on `threads`.
MoranResult morans_permutation_test(std::span<const double> values, std::span<const std::int64_t> positions,
                                    std::size_t permutations, std::uint64_t seed, std::size_t threads = 1);

// Element t is the mean of the first t+1 draws.
std::vector<double> ergodic_average(std::span<const double> trace);

struct AcceptanceReport {
  std::vector<double> rate;
  std::vector<double> proposal_sd;
  std::vector<std::size_t> accepted;
  std::vector<std::size_t> attempted;
};
AcceptanceReport acceptance_report(const ChainState& state);
AcceptanceReport acceptance_report(const PosteriorSample& sample);

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (M - 1 denominator)
};

struct PosteriorSummary {
  std::vector<ParameterSummary> parameters;
  std::vector<double> component_weights;  // K+1 posterior mean allocation frequencies
};

PosteriorSummary summarize_posterior(const PosteriorSample& sample);
// Same summary from a trace and per-location component means (as read back from disk).
PosteriorSummary summarize_posterior(const std::vector<std::string>& names, std::span<const double> trace,
                                     std::size_t draws, std::span<const double> allocation_means,
                                     std::size_t components);

void write_summary(std::ostream& out, const PosteriorSummary& summary);

}  // namespace hmmix
