#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "hmmix/detect.hpp"
#include "hmmix/error.hpp"
#include "support.hpp"

namespace hmmix {
namespace {

SiteLayout layout_of(std::vector<std::pair<std::string, std::vector<std::int64_t>>> chroms) {
  SiteLayout l;
  for (auto& [name, pos] : chroms) {
    l.offsets.push_back(l.positions.size());
    l.chromosomes.push_back(name);
    l.positions.insert(l.positions.end(), pos.begin(), pos.end());
  }
  l.offsets.push_back(l.positions.size());
  return l;
}

TEST(FindRegions, SingleRunAboveThreshold) {
  const auto l = layout_of({{"chr1", {100, 200, 300, 400, 500}}});
  const std::vector<double> p{0.9, 0.9, 0.9, 0.9, 0.1};
  const auto r = find_regions(l, p, DetectionRule{0.5, 4});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].start_index, 0u);
  EXPECT_EQ(r[0].end_index, 3u);
  EXPECT_EQ(r[0].start_position, 100);
  EXPECT_EQ(r[0].end_position, 400);
  EXPECT_EQ(r[0].length(), 4u);
  EXPECT_DOUBLE_EQ(r[0].min_site_probability(), 0.9);
  EXPECT_TRUE(std::isnan(r[0].joint_probability));
  EXPECT_TRUE(find_regions(l, p, DetectionRule{0.5, 5}).empty());
}

TEST(FindRegions, ThresholdIsStrictAndRunsStopAtChromosomes) {
  const auto l = layout_of({{"a", {1, 2, 3}}, {"b", {1, 2, 3}}});
  const std::vector<double> p{0.5, 0.8, 0.8, 0.8, 0.8, 0.2};
  const auto r = find_regions(l, p, DetectionRule{0.5, 2});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].chromosome, "a");
  EXPECT_EQ(r[0].start_index, 1u);
  EXPECT_EQ(r[0].end_index, 2u);
  EXPECT_EQ(r[1].chromosome, "b");
  EXPECT_EQ(r[1].start_index, 3u);
  EXPECT_EQ(r[1].end_index, 4u);
}

TEST(FindRegions, RuleValidation) {
  const auto l = layout_of({{"a", {1}}});
  const std::vector<double> p{0.9};
  EXPECT_THROW(find_regions(l, p, DetectionRule{0.0, 1}), ConfigError);
  EXPECT_THROW(find_regions(l, p, DetectionRule{1.0, 1}), ConfigError);
  EXPECT_THROW(find_regions(l, p, DetectionRule{0.5, 0}), ConfigError);
  EXPECT_THROW(find_regions(l, std::vector<double>{0.9, 0.1}, DetectionRule{}), DomainError);
}

TEST(WriteRegions, HeaderAndBedCoordinates) {
  std::ostringstream empty;
  write_regions(empty, {});
  EXPECT_EQ(empty.str(), "chromosome\tstart_pos\tend_pos\tn_probes\tmin_site_prob\tjoint_prob\n");

  const auto l = layout_of({{"chr2", {1000, 1500, 2600}}});
  GaussianDraws draws{{1, 1, 1}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1}};
  const auto r = find_regions(l, std::vector<double>{0.75, 1.0, 0.75}, DetectionRule{0.5, 3}, &draws);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r[0].joint_probability, 0.5);
  std::ostringstream out;
  write_regions(out, r);
  EXPECT_EQ(out.str(), empty.str() + "chr2\t999\t2600\t3\t0.75\t0.5\n");
}

TEST(ClusterProbability, JointNeverExceedsMarginals) {
  std::mt19937_64 gen(3);
  std::bernoulli_distribution coin(0.6);
  const auto l = layout_of({{"a", {1, 2, 3, 4, 5, 6}}});
  GaussianDraws draws(500, std::vector<std::uint8_t>(6));
  for (auto& d : draws)
    for (auto& v : d) v = coin(gen);
  for (std::size_t len = 1; len <= 6; ++len) {
    std::vector<std::size_t> sites(len);
    std::iota(sites.begin(), sites.end(), 0);
    const double joint = cluster_probability(l, draws, sites);
    for (std::size_t s : sites) {
      double marginal = 0.0;
      for (const auto& d : draws) marginal += d[s];
      EXPECT_LE(joint, marginal / 500.0);
    }
    if (len == 1) {
      double m0 = 0.0;
      for (const auto& d : draws) m0 += d[0];
      EXPECT_DOUBLE_EQ(joint, m0 / 500.0);
    }
  }
}

TEST(ClusterProbability, SitesMustShareAChromosome) {
  const auto l = layout_of({{"a", {1, 2}}, {"b", {1}}});
  GaussianDraws draws{{1, 1, 1}};
  EXPECT_THROW(cluster_probability(l, draws, std::vector<std::size_t>{1, 2}), DomainError);
  EXPECT_THROW(cluster_probability(l, draws, std::vector<std::size_t>{}), DomainError);
  EXPECT_THROW(cluster_probability(l, GaussianDraws{}, std::vector<std::size_t>{0}), DomainError);
  EXPECT_DOUBLE_EQ(cluster_probability(l, draws, std::vector<std::size_t>{0, 1}), 1.0);
}

TEST(LocationProbabilities, MeanOfGaussianCounts) {
  PosteriorSample s;
  s.K = 1;
  s.chromosomes = {"a"};
  s.offsets = {0, 3};
  s.positions = {1, 2, 3};
  s.iterations = {1, 2, 3, 4};
  s.allocation_counts = {4, 0, 1, 3, 2, 2};
  s.gaussian_draws = {{0, 1, 1}, {0, 1, 0}};
  const auto p = location_probabilities(s);
  EXPECT_EQ(p, (std::vector<double>{0.0, 0.75, 0.5}));
  EXPECT_DOUBLE_EQ(cluster_probability(s, std::vector<std::size_t>{1, 2}), 0.5);
  EXPECT_EQ(SiteLayout::from(s).chromosome_of(2), 0u);
  EXPECT_THROW(SiteLayout::from(s).chromosome_of(3), DomainError);
}

std::set<SiteKey> keys(std::initializer_list<std::int64_t> pos) {
  std::set<SiteKey> out;
  for (auto p : pos) out.insert({"chr1", p});
  return out;
}

TEST(CompareRuns, JaccardExamples) {
  EXPECT_DOUBLE_EQ(compare_runs(keys({1, 2, 3}), keys({1, 2, 3, 4})), 0.75);
  EXPECT_DOUBLE_EQ(compare_runs(keys({1, 2}), keys({1, 2})), 1.0);
  EXPECT_DOUBLE_EQ(compare_runs(keys({1}), keys({2})), 0.0);
  EXPECT_DOUBLE_EQ(compare_runs(keys({}), keys({2})), 0.0);
  EXPECT_THROW(compare_runs(keys({}), keys({})), DomainError);
  std::set<SiteKey> other{{"chr2", 1}};
  EXPECT_DOUBLE_EQ(compare_runs(keys({1}), other), 0.0);
}

TEST(GaussianSites, StrictThreshold) {
  const auto l = layout_of({{"a", {10, 20}}, {"b", {10}}});
  const auto s = gaussian_sites(l, std::vector<double>{0.5, 0.6, 0.9});
  EXPECT_EQ(s, (std::set<SiteKey>{{"a", 20}, {"b", 10}}));
}

}  // namespace
}  // namespace hmmix
