#include "hmmix/detect.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hmmix/error.hpp"
#include "hmmix/text.hpp"

namespace hmmix {

SiteLayout SiteLayout::from(const PosteriorSample& sample) {
  return SiteLayout{sample.chromosomes, sample.offsets, sample.positions};
}

std::size_t SiteLayout::chromosome_of(std::size_t site) const {
  if (site >= size()) throw DomainError("location index out of range");
  const auto it = std::upper_bound(offsets.begin(), offsets.end(), site);
  return static_cast<std::size_t>(it - offsets.begin()) - 1;
}

double RegionCall::min_site_probability() const {
  return site_probabilities.empty() ? 0.0 : *std::min_element(site_probabilities.begin(), site_probabilities.end());
}

std::vector<double> location_probabilities(const PosteriorSample& sample) {
  const std::size_t n = sample.n();
  const std::size_t K1 = sample.K + 1;
  std::vector<double> p(n, 0.0);
  if (sample.M() == 0) throw DomainError("posterior sample holds no draws");
  const double M = static_cast<double>(sample.M());
  for (std::size_t i = 0; i < n; ++i) p[i] = sample.allocation_counts[i * K1 + sample.K] / M;
  return p;
}

double cluster_probability(const SiteLayout& layout, const GaussianDraws& draws, std::span<const std::size_t> sites) {
  if (sites.empty()) throw DomainError("cluster needs at least one location");
  if (draws.empty()) throw DomainError("no stored allocation draws");
  const std::size_t chrom = layout.chromosome_of(sites.front());
  for (std::size_t s : sites) {
    if (layout.chromosome_of(s) != chrom) throw DomainError("cluster spans more than one chromosome");
  }
  std::size_t hits = 0;
  std::vector<std::size_t> per_site(sites.size(), 0);
  for (const auto& draw : draws) {
    bool all = true;
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (draw[sites[j]]) {
        ++per_site[j];
      } else {
        all = false;
      }
    }
    if (all) ++hits;
  }
  // The joint frequency can never exceed any marginal frequency of the same draws.
  for (std::size_t c : per_site) {
    if (hits > c) throw ContractError("cluster probability exceeds a site probability");
  }
  return static_cast<double>(hits) / static_cast<double>(draws.size());
}

double cluster_probability(const PosteriorSample& sample, std::span<const std::size_t> sites) {
  return cluster_probability(SiteLayout::from(sample), sample.gaussian_draws, sites);
}

void DetectionRule::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("detection threshold must lie in (0,1), got " + text::format_double(threshold));
  }
  if (min_length < 1) throw ConfigError("minimum region length must be at least 1");
}

std::vector<RegionCall> find_regions(const SiteLayout& layout, std::span<const double> probabilities,
                                     const DetectionRule& rule, const GaussianDraws* draws) {
  rule.validate();
  if (probabilities.size() != layout.size()) throw DomainError("probability vector does not match the layout");
  std::vector<RegionCall> out;
  for (std::size_t c = 0; c + 1 < layout.offsets.size(); ++c) {
    const std::size_t begin = layout.offsets[c], end = layout.offsets[c + 1];
    std::size_t i = begin;
    while (i < end) {
      if (!(probabilities[i] > rule.threshold)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < end && probabilities[j] > rule.threshold) ++j;
      if (j - i >= rule.min_length) {
        RegionCall r;
        r.chromosome = layout.chromosomes[c];
        r.start_index = i;
        r.end_index = j - 1;
        r.start_position = layout.positions[i];
        r.end_position = layout.positions[j - 1];
        r.site_probabilities.assign(probabilities.begin() + static_cast<std::ptrdiff_t>(i),
                                    probabilities.begin() + static_cast<std::ptrdiff_t>(j));
        r.joint_probability = std::nan("");
        if (draws && !draws->empty()) {
          std::vector<std::size_t> sites(j - i);
          for (std::size_t s = 0; s < sites.size(); ++s) sites[s] = i + s;
          r.joint_probability = cluster_probability(layout, *draws, sites);
        }
        out.push_back(std::move(r));
      }
      i = j;
    }
  }
  return out;
}

void write_regions(std::ostream& out, const std::vector<RegionCall>& regions) {
  out << "chromosome\tstart_pos\tend_pos\tn_probes\tmin_site_prob\tjoint_prob\n";
  for (const auto& r : regions) {
    out << r.chromosome << '\t' << (r.start_position - 1) << '\t' << r.end_position << '\t' << r.length() << '\t'
        << text::format_double(r.min_site_probability()) << '\t'
        << (std::isnan(r.joint_probability) ? std::string("NA") : text::format_double(r.joint_probability)) << '\n';
  }
}

double compare_runs(const std::set<SiteKey>& a, const std::set<SiteKey>& b) {
  if (a.empty() && b.empty()) throw DomainError("overlap of two empty call sets is undefined");
  std::size_t inter = 0;
  for (const auto& key : a) inter += b.count(key);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::set<SiteKey> gaussian_sites(const SiteLayout& layout, std::span<const double> probabilities, double threshold) {
  if (probabilities.size() != layout.size()) throw DomainError("probability vector does not match the layout");
  std::set<SiteKey> out;
  for (std::size_t c = 0; c + 1 < layout.offsets.size(); ++c) {
    for (std::size_t i = layout.offsets[c]; i < layout.offsets[c + 1]; ++i) {
      if (probabilities[i] > threshold) out.insert({layout.chromosomes[c], layout.positions[i]});
    }
  }
  return out;
}

}  // namespace hmmix
