#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmmix/sampler.hpp"

namespace hmmix {

// Grouping of global location indices into chromosomes, as carried by a
// PosteriorSample or reconstructed from a probability file.
struct SiteLayout {
  std::vector<std::string> chromosomes;
  std::vector<std::size_t> offsets;  // per chromosome, plus total at the end
  std::vector<std::int64_t> positions;

  static SiteLayout from(const PosteriorSample& sample);
  std::size_t size() const { return positions.size(); }
  std::size_t chromosome_of(std::size_t site) const;
};

// Retained draws of the Gaussian-component indicator, one row per draw.
using GaussianDraws = std::vector<std::vector<std::uint8_t>>;

struct RegionCall {
  std::string chromosome;
  std::size_t start_index = 0;  // global location indices, inclusive
  std::size_t end_index = 0;
  std::int64_t start_position = 0;  // one-based base-pair coordinates, inclusive
  std::int64_t end_position = 0;
  std::vector<double> site_probabilities;
  double joint_probability = 0.0;

  std::size_t length() const { return end_index - start_index + 1; }
  double min_site_probability() const;
};

// Mean of Z_{i,K+1} over all retained draws.
std::vector<double> location_probabilities(const PosteriorSample& sample);

// Fraction of draws in which every listed location is Gaussian. The listed
// sites must share one chromosome.
double cluster_probability(const PosteriorSample& sample, std::span<const std::size_t> sites);
double cluster_probability(const SiteLayout& layout, const GaussianDraws& draws, std::span<const std::size_t> sites);

struct DetectionRule {
  double threshold = 0.5;      // site probability must exceed this
  std::size_t min_length = 5;  // shortest reported run
  void validate() const;
};

// Maximal runs of consecutive locations (within one chromosome) whose
// probability exceeds the threshold and whose length is at least min_length.
// Joint probabilities are filled from `draws` when given, otherwise left NaN.
std::vector<RegionCall> find_regions(const SiteLayout& layout, std::span<const double> probabilities,
                                     const DetectionRule& rule, const GaussianDraws* draws = nullptr);

// Tab-separated `chromosome start_pos end_pos n_probes min_site_prob
// joint_prob`, BED convention: start is zero-based, end is exclusive, so a
// region covering one-based positions [s, e] is written as s-1, e.
void write_regions(std::ostream& out, const std::vector<RegionCall>& regions);

using SiteKey = std::pair<std::string, std::int64_t>;

// |A & B| / |A | B|. Both empty throws DomainError.
double compare_runs(const std::set<SiteKey>& a, const std::set<SiteKey>& b);

// Locations whose Gaussian probability exceeds the threshold.
std::set<SiteKey> gaussian_sites(const SiteLayout& layout, std::span<const double> probabilities,
                                 double threshold = 0.5);

}  // namespace hmmix
