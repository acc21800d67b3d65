#include <gtest/gtest.h>

#include "rwre/config.hpp"

namespace rwre {
namespace {

const char* kBoolean = R"(
# comment
seed = 7
boolean.lambda = 0.25
boolean.beta = 5
kernel.type = drift
kernel.kappa = 0.2
experiment.n_blocks = 300
experiment.s_list = 4 8 16
)";

std::string key_of(const std::string& text) {
  try {
    ExperimentConfig::parse(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

TEST(Config, ParsesAndRoundTrips) {
  const auto c = ExperimentConfig::parse(kBoolean);
  EXPECT_EQ(c.family, Family::kBoolean);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_DOUBLE_EQ(c.lambda, 0.25);
  EXPECT_DOUBLE_EQ(c.kernel.kappa, 0.2);
  EXPECT_EQ(c.experiment.n_blocks, 300);
  EXPECT_EQ(c.experiment.s_list, (std::vector<std::int64_t>{4, 8, 16}));
  const auto back = ExperimentConfig::parse(c.to_text());
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.to_text(), c.to_text());
}

TEST(Config, RenewalRoundTrips) {
  const auto c = ExperimentConfig::parse("renewal.mu = uniform 0 3\nrenewal.beta = 2.5\nkernel.type = lazy\n");
  EXPECT_EQ(c.family, Family::kRenewal);
  EXPECT_EQ(ExperimentConfig::parse(c.to_text()), c);
  EXPECT_DOUBLE_EQ(c.renewal_config().mu.moment_order(), 3.5);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(key_of("boolean.lambda = 0.3\nkernel.type = drift\n"), "kernel.kappa");
  EXPECT_EQ(key_of("boolean.lambda = -1\nkernel.kappa = 0.1\n"), "boolean.lambda");
  EXPECT_EQ(key_of("boolean.lambda = 0.3\nkernel.kappa = 0.1\nboolean.colour = red\n"), "boolean.colour");
  EXPECT_EQ(key_of("boolean.lambda = 0.3\nboolean.lambda = 0.4\nkernel.kappa = 0.1\n"), "boolean.lambda");
  EXPECT_EQ(key_of("boolean.lambda = 0.3\nrenewal.mu = dirac 0\nkernel.kappa = 0.1\n"), "renewal.*");
  EXPECT_EQ(key_of("kernel.kappa = 0.1\n"), "boolean.*");
  EXPECT_EQ(key_of("renewal.mu = uniform 1 2\nkernel.kappa = 0.1\n"), "renewal.mu");
  EXPECT_EQ(key_of("boolean.lambda = 0.3\nkernel.kappa = 0.1\nseed = -4\n"), "seed");
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/x.cfg"), ConfigError);
}

TEST(Config, BuildsFamilyAndKernel) {
  const auto c = ExperimentConfig::parse(kBoolean);
  const auto family = c.make_family();
  EXPECT_EQ(family->name(), "boolean");
  EXPECT_NEAR(c.make_kernel().kappa(), 0.2, 1e-15);
}

}  // namespace
}  // namespace rwre
