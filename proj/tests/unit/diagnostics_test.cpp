#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hmmix/diagnostics.hpp"
#include "hmmix/error.hpp"
#include "support.hpp"

namespace hmmix {
namespace {

// Direct double sum over i != j, independent of the library kernel.
double reference_moran(const std::vector<double>& x, const std::vector<std::int64_t>& p) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double W = 0.0, cross = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss += (x[i] - mean) * (x[i] - mean);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i == j) continue;
      const double w = 1.0 / std::abs(static_cast<double>(p[i] - p[j]));
      W += w;
      cross += w * (x[i] - mean) * (x[j] - mean);
    }
  }
  return n / W * cross / ss;
}

TEST(MoransI, MatchesDirectSum) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd(0, 1);
  for (int t = 0; t < 10; ++t) {
    const auto pos = testing::random_positions_for_test(40, gen);
    std::vector<double> x(40);
    for (auto& v : x) v = nd(gen);
    EXPECT_NEAR(morans_i(x, pos), reference_moran(x, pos), 1e-12);
  }
}

TEST(MoransI, GradientIsPositiveAlternationNegative) {
  std::vector<std::int64_t> pos;
  std::vector<double> up, alt;
  for (int i = 0; i < 30; ++i) {
    pos.push_back(100 * (i + 1));
    up.push_back(i);
    alt.push_back(i % 2 ? 1.0 : -1.0);
  }
  EXPECT_GT(morans_i(up, pos), 0.0);
  EXPECT_LT(morans_i(alt, pos), 0.0);
}

TEST(MoransI, Errors) {
  const std::vector<std::int64_t> pos{1, 2, 3};
  EXPECT_THROW(morans_i(std::vector<double>{2, 2, 2}, pos), ZeroVarianceError);
  EXPECT_THROW(morans_i(std::vector<double>{1, 2}, std::vector<std::int64_t>{1, 2}), DomainError);
  EXPECT_THROW(morans_i(std::vector<double>{1, 2, 3}, std::vector<std::int64_t>{1, 2}), DomainError);
  EXPECT_THROW(morans_i(std::vector<double>{1, 2, 3}, std::vector<std::int64_t>{1, 2, 2}), DomainError);
}

TEST(MoransI, PermutationNullMean) {
  // Under random relabelling E[I] = -1/(n-1).
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd(0, 1);
  const std::size_t n = 25;
  const auto pos = testing::random_positions_for_test(n, gen);
  std::vector<double> x(n);
  for (auto& v : x) v = nd(gen);
  const int reps = 40000;
  double s = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    std::shuffle(x.begin(), x.end(), gen);
    const double I = morans_i(x, pos);
    s += I;
    sq += I * I;
  }
  const double mean = s / reps;
  const double sd = std::sqrt(sq / reps - mean * mean);
  EXPECT_NEAR(mean, -1.0 / (n - 1.0), 4.0 * sd / std::sqrt(reps));
}

TEST(MoranPermutationTest, PValueSupportAndDeterminism) {
  std::vector<std::int64_t> pos;
  std::vector<double> up;
  for (int i = 0; i < 30; ++i) {
    pos.push_back(1000 * (i + 1));
    up.push_back(i);
  }
  const auto r = morans_permutation_test(up, pos, 199, 42);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 200.0);
  EXPECT_EQ(r.permutations, 199u);
  EXPECT_DOUBLE_EQ(r.statistic, morans_i(up, pos));
  const auto again = morans_permutation_test(up, pos, 199, 42, 3);
  EXPECT_EQ(again.p_value, r.p_value);

  std::vector<double> alt;
  for (int i = 0; i < 30; ++i) alt.push_back(i % 2 ? 1.0 : -1.0);
  const auto low = morans_permutation_test(alt, pos, 199, 42);
  const double k = low.p_value * 200.0;
  EXPECT_NEAR(k, std::round(k), 1e-9);
  EXPECT_GT(low.p_value, 0.9);
  EXPECT_LE(low.p_value, 1.0);
  EXPECT_THROW(morans_permutation_test(up, pos, 10, 1), ConfigError);
}

TEST(MoranPermutationTest, ThreadCountDoesNotChangeTheResult) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd(0, 1);
  const auto pos = testing::random_positions_for_test(50, gen);
  std::vector<double> x(50);
  for (auto& v : x) v = nd(gen);
  const auto a = morans_permutation_test(x, pos, 999, 5, 1);
  const auto b = morans_permutation_test(x, pos, 999, 5, 4);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(ErgodicAverage, RunningMean) {
  EXPECT_EQ(ergodic_average(std::vector<double>{0, 1}), (std::vector<double>{0, 0.5}));
  EXPECT_EQ(ergodic_average(std::vector<double>{2, 4, 6}), (std::vector<double>{2, 3, 4}));
  EXPECT_THROW(ergodic_average(std::vector<double>{}), DomainError);
}

TEST(AcceptanceReport, RatesFromTallies) {
  ChainState st;
  st.accepted = {44, 0};
  st.attempted = {100, 10};
  st.proposal_sd = {0.5, 1.5};
  const auto r = acceptance_report(st);
  EXPECT_EQ(r.rate, (std::vector<double>{0.44, 0.0}));
  EXPECT_EQ(r.proposal_sd, st.proposal_sd);
  st.attempted = {100, 0};
  EXPECT_THROW(acceptance_report(st), DomainError);
}

TEST(PosteriorSummary, TwoDrawFormula) {
  const std::vector<std::string> names{"a", "b"};
  const std::vector<double> trace{1.0, 10.0, 3.0, 10.0};
  const std::vector<double> alloc{1.0, 0.0, 0.5, 0.5};
  const auto s = summarize_posterior(names, trace, 2, alloc, 2);
  ASSERT_EQ(s.parameters.size(), 2u);
  EXPECT_DOUBLE_EQ(s.parameters[0].mean, 2.0);
  EXPECT_DOUBLE_EQ(s.parameters[0].sd, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(s.parameters[1].sd, 0.0);
  EXPECT_EQ(s.component_weights, (std::vector<double>{0.75, 0.25}));
  std::ostringstream out;
  write_summary(out, s);
  EXPECT_EQ(out.str(), "parameter\tmean\tsd\na\t2\t1.4142135623730951\nb\t10\t0\nweight_1\t0.75\tNA\nweight_2\t0.25\tNA\n");
  EXPECT_THROW(summarize_posterior(names, trace, 1, alloc, 2), DomainError);
  EXPECT_THROW(summarize_posterior(names, trace, 2, alloc, 3), DomainError);
}

}  // namespace
}  // namespace hmmix
