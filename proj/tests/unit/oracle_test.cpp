#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "hmmix/error.hpp"
#include "hmmix/oracle.hpp"
#include "support.hpp"

namespace hmmix {
namespace {

TEST(ExactLaw, SingleSiteIsTheMixturePosterior) {
  const auto mix = testing::mixture({2.0, 5.0}, {8.0, 12.0}, 9.0, 1.5);
  const auto mk = testing::markov({0.2, 0.3, 0.5}, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0});
  const auto s = testing::make_series("c", {10}, {4.0});
  const auto law = enumerate_zw_posterior(s, mix, mk);
  ASSERT_EQ(law.size(), 3u);
  std::vector<double> expected(3);
  for (std::size_t k = 0; k < 3; ++k) expected[k] = mk.q0[k] * testing::ref_density(mix, k, 4.0);
  const double total = std::accumulate(expected.begin(), expected.end(), 0.0);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(law.probabilities()[k], expected[k] / total, 1e-13);
  EXPECT_EQ(law.marginal_w(0), 0.0);
}

TEST(ExactLaw, TwoSitesOneGammaByHand) {
  const auto mix = testing::mixture({2.0}, {4.0}, 6.0, 1.0);
  const auto mk = testing::markov({0.7, 0.3}, {0.9, 0.1, 0.2, 0.8}, {0.25, -0.5});
  const auto s = testing::make_series("c", {1, 3}, {2.5, 5.0});
  const double rho = testing::ref_phi(0.25 - 0.5 * s.d[1]);
  const auto law = enumerate_zw_posterior(s, mix, mk);
  ASSERT_EQ(law.size(), 8u);
  std::map<std::size_t, double> table;
  double total = 0.0;
  for (std::uint8_t z0 = 0; z0 < 2; ++z0)
    for (std::uint8_t z1 = 0; z1 < 2; ++z1)
      for (std::uint8_t w1 = 0; w1 < 2; ++w1) {
        const double second = w1 ? rho * mk.Q(z0, z1) : (1 - rho) * mk.q0[z1];
        const double p = mk.q0[z0] * testing::ref_density(mix, z0, 2.5) * second * testing::ref_density(mix, z1, 5.0);
        const std::size_t idx = z0 + 2 * z1 + 4 * w1;
        table[idx] = p;
        total += p;
      }
  for (const auto& [idx, p] : table) EXPECT_NEAR(law.probabilities()[idx], p / total, 1e-13) << idx;
  double w = 0.0;
  for (const auto& [idx, p] : table)
    if (idx >= 4) w += p / total;
  EXPECT_NEAR(law.marginal_w(1), w, 1e-13);
}

TEST(ExactLaw, EncodeDecodeRoundTrip) {
  ExactLaw law(3, 3, std::vector<double>(27 * 4, 1.0 / 108.0));
  for (std::size_t idx = 0; idx < law.size(); ++idx) {
    std::vector<std::uint8_t> z(3), w(3);
    law.decode(idx, z, w);
    EXPECT_EQ(w[0], 0);
    EXPECT_EQ(law.encode(z, w), idx);
  }
  const auto m = law.marginal_z(2);
  for (double p : m) EXPECT_NEAR(p, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(law.marginal_w(2), 0.5, 1e-14);
}

TEST(ExactLaw, CapacityLimits) {
  const auto mix2 = testing::mixture({2.0, 4.0}, {4.0, 4.0}, 6.0, 1.0);
  const auto mk2 = testing::markov({0.3, 0.3, 0.4}, {0.3, 0.3, 0.4, 0.3, 0.3, 0.4, 0.3, 0.3, 0.4}, {0, 0});
  const auto s7 = testing::make_series("c", {1, 2, 3, 4, 5, 6, 7}, {1, 2, 3, 4, 5, 6, 7});
  EXPECT_THROW(enumerate_zw_posterior(s7, mix2, mk2), CapacityError);
  const auto mix3 = testing::mixture({2.0, 4.0, 5.0}, {4.0, 4.0, 4.0}, 6.0, 1.0);
  const auto mk3 = testing::markov({0.25, 0.25, 0.25, 0.25}, std::vector<double>(16, 0.25), {0, 0});
  EXPECT_THROW(enumerate_zw_posterior(testing::make_series("c", {1}, {1}), mix3, mk3), CapacityError);
  const auto s6 = testing::make_series("c", {1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 6});
  const auto law = enumerate_zw_posterior(s6, mix2, mk2);
  EXPECT_EQ(law.size(), 729u * 32u);
  EXPECT_NEAR(std::accumulate(law.probabilities().begin(), law.probabilities().end(), 0.0), 1.0, 1e-12);
}

TEST(TvDistance, Examples) {
  EXPECT_DOUBLE_EQ(tv_distance(std::vector<double>{0.5, 0.5}, std::vector<double>{0.75, 0.25}), 0.25);
  EXPECT_DOUBLE_EQ(tv_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(tv_distance(std::vector<double>{0.2, 0.8}, std::vector<double>{0.2, 0.8}), 0.0);
  EXPECT_THROW(tv_distance(std::vector<double>{1}, std::vector<double>{0.5, 0.5}), DomainError);
  const auto e = empirical_law(std::vector<std::size_t>{1, 3});
  EXPECT_EQ(e, (std::vector<double>{0.25, 0.75}));
}

TEST(RandomPositions, IncreasingWithBoundedGaps) {
  Rng rng(5);
  const auto p = random_positions(5000, 20000, rng);
  ASSERT_EQ(p.size(), 5000u);
  EXPECT_EQ(p[0], 1);
  std::int64_t largest = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const auto g = p[i] - p[i - 1];
    ASSERT_GE(g, 1);
    ASSERT_LE(g, 20000);
    largest = std::max(largest, g);
  }
  EXPECT_GT(largest, 10000);
}

struct SimFixture {
  MixtureParams mix = testing::mixture({3.0, 6.0}, {25.0, 40.0}, 12.0, 1.0);
  MarkovParams mk = testing::markov({0.55, 0.40, 0.05}, {0.85, 0.12, 0.03, 0.12, 0.85, 0.03, 0.05, 0.05, 0.9},
                                    {2.0, -4.0});
};

TEST(SimulateDataset, LayoutAndInvariants) {
  SimFixture f;
  Rng rng(1);
  std::vector<ChromosomeLayout> layout{{"chr1", random_positions(300, 20000, rng)},
                                       {"chr2", random_positions(200, 20000, rng)}};
  const auto sim = simulate_dataset(f.mix, f.mk, layout, rng);
  ASSERT_EQ(sim.data.series.size(), 2u);
  EXPECT_EQ(sim.data.total_n(), 500u);
  EXPECT_NO_THROW(validate(sim.data));
  EXPECT_NO_THROW(validate(sim.truth.latent, sim.data, 3));
  const auto off = sim.data.offsets();
  EXPECT_EQ(sim.truth.latent.w[off[0]], 0);
  EXPECT_EQ(sim.truth.latent.w[off[1]], 0);
  // One global distance scale: the largest rescaled distance is exactly one.
  double dmax = 0.0;
  for (const auto& s : sim.data.series)
    for (std::size_t i = 1; i < s.size(); ++i) dmax = std::max(dmax, s.d[i]);
  EXPECT_NEAR(dmax, 1.0, 1e-12);
  EXPECT_EQ(sim.truth.mix, f.mix);
}

TEST(SimulateDataset, DecouplingLimitGivesIidAllocations) {
  SimFixture f;
  f.mk.beta = {-40.0, 0.0};
  Rng rng(2);
  std::vector<ChromosomeLayout> layout{{"c", random_positions(100000, 1000, rng)}};
  const auto sim = simulate_dataset(f.mix, f.mk, layout, rng);
  std::vector<double> freq(3, 0.0);
  for (auto z : sim.truth.latent.z) freq[z] += 1.0;
  const double n = 100000.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double p = f.mk.q0[k];
    EXPECT_NEAR(freq[k] / n, p, 4.0 * std::sqrt(p * (1 - p) / n)) << k;
  }
  EXPECT_EQ(std::accumulate(sim.truth.latent.w.begin(), sim.truth.latent.w.end(), 0), 0);
}

TEST(SimulateDataset, AbsorbingLimitFollowsTheChain) {
  SimFixture f;
  f.mk.beta = {40.0, 0.0};
  Rng rng(3);
  std::vector<ChromosomeLayout> layout{{"c", random_positions(100000, 1000, rng)}};
  const auto sim = simulate_dataset(f.mix, f.mk, layout, rng);
  // Transition frequencies out of state 0 follow row 0 of Q.
  const auto& z = sim.truth.latent.z;
  std::vector<double> count(3, 0.0);
  double from = 0.0;
  for (std::size_t i = 1; i < z.size(); ++i) {
    ASSERT_EQ(sim.truth.latent.w[i], 1);
    if (z[i - 1] == 0) {
      from += 1.0;
      count[z[i]] += 1.0;
    }
  }
  for (std::size_t k = 0; k < 3; ++k) {
    const double p = f.mk.Q(0, k);
    EXPECT_NEAR(count[k] / from, p, 4.0 * std::sqrt(p * (1 - p) / from)) << k;
  }
}

TEST(SimulateExpressions, ComponentMoments) {
  const auto mix = testing::mixture({3.0}, {25.0}, 12.0, 2.0);
  Rng rng(4);
  const std::size_t n = 200000;
  std::vector<std::uint8_t> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = i % 2;
  const auto x = simulate_expressions(mix, z, rng);
  double s0 = 0, s1 = 0, q1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] == 0) {
      s0 += x[i];
      ASSERT_GT(x[i], 0.0);
    } else {
      s1 += x[i];
      q1 += (x[i] - 12.0) * (x[i] - 12.0);
    }
  }
  const double h = n / 2.0;
  EXPECT_NEAR(s0 / h, 3.0, 4.0 * std::sqrt(9.0 / 25.0 / h));
  EXPECT_NEAR(s1 / h, 12.0, 4.0 * std::sqrt(2.0 / h));
  EXPECT_NEAR(q1 / h, 2.0, 4.0 * 2.0 * std::sqrt(2.0 / h));
}

}  // namespace
}  // namespace hmmix
