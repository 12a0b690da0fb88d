#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "hmmix/random.hpp"

namespace hmmix {
namespace {

struct Moments {
  double mean = 0.0, var = 0.0;
};

template <class Draw>
Moments moments(std::size_t n, Draw draw) {
  double s = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    ss += x * x;
  }
  Moments m;
  m.mean = s / static_cast<double>(n);
  m.var = (ss - s * m.mean) / static_cast<double>(n - 1);
  return m;
}

TEST(GammaDraws, MeanAndVarianceWithinFourStandardErrors) {
  const std::size_t n = 1000000;
  Rng rng(2024);
  for (auto [theta, eta] : {std::pair{3.0, 4.0}, std::pair{12.0, 250.0}, std::pair{1.0, 0.5}}) {
    const auto m = moments(n, [&] { return gamma_mean_shape(rng, theta, eta); });
    const double var = theta * theta / eta;
    EXPECT_NEAR(m.mean, theta, 4.0 * std::sqrt(var / n));
    // Var of the sample variance: (mu4 - var^2)/n with mu4 = var^2 (3 + 6/eta).
    const double se_var = std::sqrt((var * var * (2.0 + 6.0 / eta)) / n);
    EXPECT_NEAR(m.var, var, 4.0 * se_var);
  }
}

TEST(InverseGammaDraws, Mean) {
  Rng rng(1);
  const std::size_t n = 400000;
  const double shape = 6.0, scale = 10.0;
  const auto m = moments(n, [&] { return inverse_gamma(rng, shape, scale); });
  const double mean = scale / (shape - 1.0);
  const double var = mean * mean / (shape - 2.0);
  EXPECT_NEAR(m.mean, mean, 4.0 * std::sqrt(var / n));
}

TEST(TruncatedNormal, HalfNormalMean) {
  Rng rng(7);
  const std::size_t n = 400000;
  const auto m = moments(n, [&] { return truncated_normal_unit(rng, 0.0, true); });
  const double mean = std::sqrt(2.0 / M_PI);
  EXPECT_NEAR(m.mean, mean, 4.0 * std::sqrt((1.0 - 2.0 / M_PI) / n));
}

TEST(TruncatedNormal, SignAndTailMean) {
  Rng rng(8);
  for (double mean : {-6.0, -1.0, 0.3, 2.0, 7.0}) {
    for (bool positive : {true, false}) {
      double s = 0.0;
      const int n = 100000;
      for (int i = 0; i < n; ++i) {
        const double v = truncated_normal_unit(rng, mean, positive);
        ASSERT_TRUE(positive ? v > 0.0 : v <= 0.0);
        s += v;
      }
      // E[V | V > 0] = m + phi(m)/Phi(m); mirror for the negative side.
      const double m = positive ? mean : -mean;
      const double phi = std::exp(-0.5 * m * m) / std::sqrt(2.0 * M_PI);
      const double Phi = 0.5 * std::erfc(-m / std::sqrt(2.0));
      const double expected = (m + phi / Phi) * (positive ? 1.0 : -1.0);
      EXPECT_NEAR(s / n, expected, 0.01) << mean << " " << positive;
    }
  }
}

TEST(Dirichlet, OnSimplexWithExpectedMeans) {
  Rng rng(3);
  const std::vector<double> alpha{4.0, 2.0, 0.5};
  std::vector<double> sum(3, 0.0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto p = dirichlet(rng, alpha);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    for (int k = 0; k < 3; ++k) sum[k] += p[k];
  }
  const double a0 = 6.5;
  for (int k = 0; k < 3; ++k) {
    const double m = alpha[k] / a0;
    const double sd = std::sqrt(m * (1 - m) / (a0 + 1));
    EXPECT_NEAR(sum[k] / n, m, 4.0 * sd / std::sqrt(n));
  }
}

TEST(Categorical, FrequenciesAndUnnormalizedWeights) {
  Rng rng(4);
  const std::vector<double> w{2.0, 0.0, 6.0};
  std::vector<int> count(3, 0);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++count[categorical(rng, w)];
  EXPECT_EQ(count[1], 0);
  EXPECT_NEAR(count[2] / double(n), 0.75, 4.0 * std::sqrt(0.75 * 0.25 / n));
}

TEST(Substreams, DeterministicAndDistinct) {
  EXPECT_EQ(substream_seed(9, "chain"), substream_seed(9, "chain"));
  EXPECT_NE(substream_seed(9, "chain"), substream_seed(9, "simulation"));
  EXPECT_NE(substream_seed(9, "chain"), substream_seed(10, "chain"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 100; ++a)
    for (std::uint64_t b = 0; b < 10; ++b) seen.insert(substream_seed(1, a, b));
  EXPECT_EQ(seen.size(), 1000u);
  Rng r1 = make_substream(5, "x"), r2 = make_substream(5, "x");
  EXPECT_EQ(r1(), r2());
}

TEST(Uniform, InHalfOpenUnitInterval) {
  Rng rng(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace hmmix
