#include <gtest/gtest.h>

#include <sstream>

#include "hmmix/config.hpp"
#include "hmmix/error.hpp"

namespace hmmix {
namespace {

TEST(KeyValueConfig, ParsesCommentsAndWhitespace) {
  std::istringstream in("# header\n a = 1 \n\nb=x,y # trailing\nlist = 1, 2.5,3\n");
  const auto kv = KeyValueConfig::parse(in);
  EXPECT_EQ(kv.get("a"), "1");
  EXPECT_EQ(kv.get("b"), "x,y");
  EXPECT_EQ(kv.get_int("a"), 1);
  EXPECT_EQ(kv.get_doubles("list"), (std::vector<double>{1, 2.5, 3}));
  EXPECT_FALSE(kv.has("c"));
  EXPECT_FALSE(kv.find("c"));
  EXPECT_THROW(kv.get("c"), ConfigError);
  EXPECT_THROW(kv.get_double("b"), ConfigError);
}

TEST(KeyValueConfig, RejectsMalformedLines) {
  std::istringstream no_eq("a 1\n");
  EXPECT_THROW(KeyValueConfig::parse(no_eq), ConfigError);
  std::istringstream no_key(" = 1\n");
  EXPECT_THROW(KeyValueConfig::parse(no_key), ConfigError);
  EXPECT_THROW(KeyValueConfig::load("/nonexistent/config"), ConfigError);
}

TEST(KeyValueConfig, WriteParseRoundTripAndMerge) {
  KeyValueConfig kv;
  kv.set("x", 0.1);
  kv.set("v", std::vector<double>{1.0 / 3.0, 2.0});
  kv.set("s", std::string("text"));
  std::stringstream io;
  kv.write(io);
  const auto back = KeyValueConfig::parse(io);
  EXPECT_EQ(back.get_double("x"), 0.1);
  EXPECT_EQ(back.get_doubles("v"), (std::vector<double>{1.0 / 3.0, 2.0}));
  KeyValueConfig over;
  over.set("s", std::string("other"));
  auto merged = back;
  merged.merge(over);
  EXPECT_EQ(merged.get("s"), "other");
  EXPECT_EQ(merged.get("x"), back.get("x"));
}

TEST(ChainConfig, Validation) {
  auto c = default_chain_config();
  EXPECT_EQ(c.iterations, 15000u);
  EXPECT_EQ(c.burn_in, 5000u);
  EXPECT_NO_THROW(c.validate());
  c.burn_in = c.iterations;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_chain_config();
  c.z_thin = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_chain_config();
  c.threads = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = default_chain_config();
  c.target_acceptance = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ChainConfig, RoundTripThroughKeyValues) {
  auto c = default_chain_config();
  c.iterations = 300;
  c.burn_in = 100;
  c.z_thin = 3;
  c.adapt = false;
  MixtureParams m;
  m.theta = {1.0, 2.0};
  m.eta = {3.0, 4.0};
  m.mu = 5.0;
  m.sigma2 = 0.5;
  c.initial_mix = m;
  KeyValueConfig kv;
  write_chain_config(kv, c);
  const auto back = read_chain_config(kv, default_chain_config());
  EXPECT_EQ(back.iterations, 300u);
  EXPECT_EQ(back.burn_in, 100u);
  EXPECT_EQ(back.z_thin, 3u);
  EXPECT_FALSE(back.adapt);
  ASSERT_TRUE(back.initial_mix);
  EXPECT_EQ(*back.initial_mix, m);
  EXPECT_FALSE(back.initial_markov);
}

TEST(ChainConfig, PartialInitialValuesAreRejected) {
  KeyValueConfig kv;
  kv.set("init.theta", std::vector<double>{1.0});
  EXPECT_THROW(read_chain_config(kv, default_chain_config()), ConfigError);
  KeyValueConfig neg;
  neg.set("chain.iterations", std::string("-5"));
  EXPECT_THROW(read_chain_config(neg, default_chain_config()), ConfigError);
  KeyValueConfig b;
  b.set("chain.adapt", std::string("maybe"));
  EXPECT_THROW(read_chain_config(b, default_chain_config()), ConfigError);
}

TEST(Priors, RoundTripThroughKeyValues) {
  const auto p = default_priors(4);
  KeyValueConfig kv;
  write_priors(kv, p);
  EXPECT_TRUE(has_complete_priors(kv));
  EXPECT_EQ(read_priors(kv, Priors{}), p);
  KeyValueConfig partial;
  partial.set("prior.m", 3.0);
  EXPECT_FALSE(has_complete_priors(partial));
  const auto q = read_priors(partial, p);
  EXPECT_EQ(q.m, 3.0);
  EXPECT_EQ(q.t1, p.t1);
}

TEST(Priors, ShapeErrors) {
  const auto p = default_priors(4);
  KeyValueConfig kv;
  kv.set("prior.r", std::vector<double>{1, 1, 1});
  EXPECT_THROW(read_priors(kv, p), ConfigError);
  KeyValueConfig mu;
  mu.set("prior.mu0", std::vector<double>{1});
  EXPECT_THROW(read_priors(mu, p), ConfigError);
  KeyValueConfig t;
  t.set("prior.t1", std::vector<double>{1, 1});
  EXPECT_ANY_THROW(read_priors(t, p));
  EXPECT_THROW(default_priors(3), ConfigError);
}

}  // namespace
}  // namespace hmmix
