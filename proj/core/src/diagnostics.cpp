#include "hmmix/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include "hmmix/error.hpp"
#include "hmmix/random.hpp"
#include "hmmix/text.hpp"

namespace hmmix {

namespace {

// Weights are cached for moderate n so that each permutation is a plain
// O(n^2) quadratic form; larger series recompute them on the fly.
constexpr std::size_t kMaxCachedMoranSites = 4096;

struct MoranKernel {
  std::size_t n = 0;
  std::vector<std::int64_t> positions;
  std::vector<double> weights;  // n x n, zero diagonal; empty when not cached
  double weight_sum = 0.0;

  explicit MoranKernel(std::span<const std::int64_t> pos) : n(pos.size()), positions(pos.begin(), pos.end()) {
    const bool cache = n <= kMaxCachedMoranSites;
    if (cache) weights.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto gap = std::llabs(positions[i] - positions[j]);
        if (gap == 0) throw DomainError("Moran's I needs distinct positions");
        const double w = 1.0 / static_cast<double>(gap);
        if (cache) {
          weights[i * n + j] = w;
          weights[j * n + i] = w;
        }
        weight_sum += 2.0 * w;
      }
    }
  }

  // centred: values minus their mean; ss: sum of squares of centred.
  double statistic(std::span<const double> centred, double ss) const {
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      if (!weights.empty()) {
        const double* row = &weights[i * n];
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * centred[j];
      } else {
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) acc += centred[j] / static_cast<double>(std::llabs(positions[i] - positions[j]));
        }
      }
      cross += centred[i] * acc;
    }
    return static_cast<double>(n) / weight_sum * cross / ss;
  }
};

std::vector<double> centre(std::span<const double> values, double& ss) {
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  std::vector<double> out(values.size());
  ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = values[i] - mean;
    ss += out[i] * out[i];
  }
  const double scale = std::max(1.0, std::abs(mean));
  if (!(ss > 1e-24 * scale * scale * static_cast<double>(values.size()))) {
    throw ZeroVarianceError("Moran's I is undefined for constant values");
  }
  return out;
}

void check_inputs(std::span<const double> values, std::span<const std::int64_t> positions) {
  if (values.size() != positions.size()) throw DomainError("values and positions differ in length");
  if (values.size() < 3) throw DomainError("Moran's I needs at least three locations");
}

}  // namespace

double morans_i(std::span<const double> values, std::span<const std::int64_t> positions) {
  check_inputs(values, positions);
  double ss = 0.0;
  const auto centred = centre(values, ss);
  return MoranKernel(positions).statistic(centred, ss);
}

MoranResult morans_permutation_test(std::span<const double> values, std::span<const std::int64_t> positions,
                                    std::size_t permutations, std::uint64_t seed, std::size_t threads) {
  check_inputs(values, positions);
  if (permutations < 99) throw ConfigError("use at least 99 permutations");
  double ss = 0.0;
  const auto centred = centre(values, ss);
  const MoranKernel kernel(positions);
  const double observed = kernel.statistic(centred, ss);

  std::vector<std::uint8_t> exceed(permutations, 0);
  auto run_range = [&](std::size_t begin, std::size_t step) {
    std::vector<double> perm(centred);
    for (std::size_t p = begin; p < permutations; p += step) {
      Rng rng(substream_seed(seed, 0x6d6f72616eULL, p));
      std::copy(centred.begin(), centred.end(), perm.begin());
      // Fisher-Yates with the library's own uniform for portability.
      for (std::size_t i = perm.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        std::swap(perm[i - 1], perm[std::min(j, i - 1)]);
      }
      exceed[p] = kernel.statistic(perm, ss) >= observed ? 1 : 0;
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, permutations));
  if (workers == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run_range, t, workers);
  }
  const std::size_t count = std::accumulate(exceed.begin(), exceed.end(), std::size_t{0});
  MoranResult r;
  r.statistic = observed;
  r.permutations = permutations;
  r.p_value = static_cast<double>(1 + count) / static_cast<double>(permutations + 1);
  r.seed = seed;
  return r;
}

std::vector<double> ergodic_average(std::span<const double> trace) {
  if (trace.empty()) throw DomainError("ergodic average of an empty trace");
  std::vector<double> out(trace.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    sum += trace[t];
    out[t] = sum / static_cast<double>(t + 1);
  }
  return out;
}

namespace {

AcceptanceReport make_report(const std::vector<std::size_t>& accepted, const std::vector<std::size_t>& attempted,
                             const std::vector<double>& sd) {
  AcceptanceReport r;
  r.accepted = accepted;
  r.attempted = attempted;
  r.proposal_sd = sd;
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    if (attempted[k] == 0) throw DomainError("no post-burn-in eta proposals recorded");
    r.rate.push_back(static_cast<double>(accepted[k]) / static_cast<double>(attempted[k]));
  }
  return r;
}

}  // namespace

AcceptanceReport acceptance_report(const ChainState& state) {
  return make_report(state.accepted, state.attempted, state.proposal_sd);
}

AcceptanceReport acceptance_report(const PosteriorSample& sample) {
  return make_report(sample.eta_accepted, sample.eta_attempted, sample.proposal_sd);
}

PosteriorSummary summarize_posterior(const std::vector<std::string>& names, std::span<const double> trace,
                                     std::size_t draws, std::span<const double> allocation_means,
                                     std::size_t components) {
  if (draws < 2) throw DomainError("posterior summary needs at least two draws");
  const std::size_t P = names.size();
  if (trace.size() != draws * P) throw DomainError("trace size does not match parameter count");
  PosteriorSummary out;
  for (std::size_t p = 0; p < P; ++p) {
    double mean = 0.0;
    for (std::size_t m = 0; m < draws; ++m) mean += trace[m * P + p];
    mean /= static_cast<double>(draws);
    double ss = 0.0;
    for (std::size_t m = 0; m < draws; ++m) {
      const double d = trace[m * P + p] - mean;
      ss += d * d;
    }
    out.parameters.push_back({names[p], mean, std::sqrt(ss / static_cast<double>(draws - 1))});
  }
  if (components == 0 || allocation_means.size() % components != 0) {
    throw DomainError("allocation means do not match the component count");
  }
  const std::size_t n = allocation_means.size() / components;
  out.component_weights.assign(components, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < components; ++k) out.component_weights[k] += allocation_means[i * components + k];
  for (double& w : out.component_weights) w /= static_cast<double>(n);
  return out;
}

PosteriorSummary summarize_posterior(const PosteriorSample& sample) {
  const std::size_t K1 = sample.K + 1;
  std::vector<double> means(sample.allocation_counts.size());
  const double M = static_cast<double>(sample.M());
  for (std::size_t i = 0; i < means.size(); ++i) means[i] = sample.allocation_counts[i] / M;
  return summarize_posterior(sample.parameter_names, sample.trace, sample.M(), means, K1);
}

void write_summary(std::ostream& out, const PosteriorSummary& summary) {
  out << "parameter\tmean\tsd\n";
  for (const auto& p : summary.parameters) {
    out << p.name << '\t' << text::format_double(p.mean) << '\t' << text::format_double(p.sd) << '\n';
  }
  for (std::size_t k = 0; k < summary.component_weights.size(); ++k) {
    out << "weight_" << (k + 1) << '\t' << text::format_double(summary.component_weights[k]) << "\tNA\n";
  }
}

}  // namespace hmmix
