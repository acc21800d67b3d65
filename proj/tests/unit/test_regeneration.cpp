#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rwre/boolean_env.hpp"
#include "rwre/errors.hpp"
#include "rwre/regeneration.hpp"
#include "rwre/renewal_env.hpp"
#include "rwre/stats.hpp"

namespace rwre {
namespace {

RenewalFamily pinned_family() {
  RenewalConfig c;
  c.mu = InterarrivalLaw::dirac(0);
  return RenewalFamily(c);
}

TEST(Blocks, PinnedEnvironmentGivesSingleSteps) {
  const auto family = pinned_family();
  const auto k = JumpKernel::drift(0.1);
  const auto blocks = sample_blocks(family, k, 4000, 3);
  for (const auto& b : blocks) {
    EXPECT_EQ(b.T1, 1);
    EXPECT_LE(std::abs(b.disp[0]), 1);
    EXPECT_FALSE(b.censored);
  }
  // Every site has omega = 0, so each step uses (0.1, 0.1, 0.8).
  const auto est = estimate_limits(blocks, 1, 200, 1);
  const double mean = 0.7, var = 0.1 + 0.8 - mean * mean;
  EXPECT_NEAR(est.v[0], mean, 4 * std::sqrt(var / 4000));
  EXPECT_NEAR(est.sigma(0, 0), var, 0.04);
  EXPECT_LE(est.v_lo[0], est.v[0]);
  EXPECT_GE(est.v_hi[0], est.v[0]);
}

TEST(Blocks, StayPutGivesZeroSpeedAndCovariance) {
  BooleanFamily family(BooleanConfig{});
  const auto blocks = sample_blocks(family, JumpKernel::stay_put(1), 300, 4);
  const auto est = estimate_limits(blocks, 1, 100, 1);
  EXPECT_EQ(est.v[0], 0.0);
  EXPECT_EQ(est.sigma(0, 0), 0.0);
  for (const auto& e : direct_run(family, JumpKernel::stay_put(1), 50, 20, 5)) EXPECT_EQ(e[0], 0.0);
}

TEST(Blocks, ConsecutiveBlocksUncorrelated) {
  BooleanFamily family(BooleanConfig{});
  const std::size_t n = 10000;
  const auto blocks = sample_blocks(family, JumpKernel::drift(0.1), n, 6);
  std::vector<double> a, b;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a.push_back(static_cast<double>(blocks[i].T1));
    b.push_back(static_cast<double>(blocks[i + 1].T1));
  }
  EXPECT_LT(std::abs(pearson_correlation(a, b)), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Blocks, SeedsAreStableAsNGrows) {
  BooleanFamily family(BooleanConfig{});
  const auto k = JumpKernel::drift(0.1);
  const auto small = sample_blocks(family, k, 20, 8);
  const auto large = sample_blocks(family, k, 40, 8, {}, 2);
  for (std::size_t i = 0; i < small.size(); ++i) {
    EXPECT_EQ(small[i].T1, large[i].T1);
    EXPECT_EQ(small[i].disp, large[i].disp);
  }
}

TEST(Blocks, RejectionFloorAndCensoring) {
  ConstantFamily never(1, 1, 0, false);
  EXPECT_THROW(sample_block(never, JumpKernel::drift(0.1), 1), DiagnosticsError);
  BooleanConfig c;
  c.lambda = 1.0;
  BooleanFamily family(c);
  BlockOptions tight;
  tight.horizon = 1;
  bool any_censored = false;
  for (std::uint64_t s = 0; s < 100; ++s) any_censored |= sample_block(family, JumpKernel::drift(0.1), s, tight).censored;
  EXPECT_TRUE(any_censored);
}

// Synthetic blocks with T1 = 1 + Geometric(1/2), disp | T1 ~ Binomial(T1, 0.3):
// v = 0.3. The ratio estimator's RMS error must shrink like n^{-1/2}.
TEST(Estimator, RatioEstimatorConvergesAtRootN) {
  std::mt19937_64 gen(1);
  std::geometric_distribution<int> geo(0.5);
  std::vector<std::pair<double, double>> points;
  for (std::size_t n : {100u, 400u, 1600u, 6400u}) {
    double sq = 0;
    const int reps = 200;
    for (int r = 0; r < reps; ++r) {
      std::vector<RegenerationBlock> blocks(n);
      for (auto& b : blocks) {
        b.T1 = 1 + geo(gen);
        b.disp[0] = std::binomial_distribution<int>(static_cast<int>(b.T1), 0.3)(gen);
      }
      const double v = estimate_limits(blocks, 1, 2, 0).v[0];
      sq += (v - 0.3) * (v - 0.3);
    }
    points.emplace_back(static_cast<double>(n), std::sqrt(sq / reps));
  }
  const auto fit = loglog_slope(points);
  EXPECT_NEAR(fit.slope, -0.5, 0.15);
}

TEST(Estimator, AllCensoredIsError) {
  std::vector<RegenerationBlock> blocks(3);
  for (auto& b : blocks) b.censored = true;
  EXPECT_ANY_THROW(estimate_limits(blocks, 1));
}

}  // namespace
}  // namespace rwre
