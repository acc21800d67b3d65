#include <gtest/gtest.h>

#include <cmath>

#include "rwre/boolean_env.hpp"
#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {
namespace {

LatticePoint pt(Coord x, Coord t) {
  LatticePoint z;
  z.x[0] = x;
  z.t = t;
  return z;
}

BallRecord ball(double x, double t, double r) {
  BallRecord b;
  b.x[0] = x;
  b.t = t;
  b.radius = r;
  return b;
}

// Scans every lattice point of the ball's bounding box.
bool meets_cone_scan(const BallRecord& b, const LatticePoint& apex, int R, ConeDirection dir) {
  const Lattice l(1);
  for (Coord t = static_cast<Coord>(std::floor(b.t - b.radius)); t <= static_cast<Coord>(std::ceil(b.t + b.radius)); ++t) {
    for (Coord x = static_cast<Coord>(std::floor(b.x[0] - b.radius)); x <= static_cast<Coord>(std::ceil(b.x[0] + b.radius)); ++x) {
      const double dx = static_cast<double>(x) - b.x[0], dt = static_cast<double>(t) - b.t;
      if (dx * dx + dt * dt < b.radius * b.radius && cone_contains(l, apex, pt(x, t), R, dir)) return true;
    }
  }
  return false;
}

TEST(RadiusLaw, ParetoSurvival) {
  const auto law = RadiusLaw::pareto(0.5, 4.0);
  EXPECT_DOUBLE_EQ(law.survival(0.25), 1.0);
  EXPECT_NEAR(law.survival(1.0), std::pow(0.5, 4.0), 1e-15);
  EXPECT_NEAR(law.survival(law.inverse_survival(1e-3)), 1e-3, 1e-12);
}

TEST(Crossing, Examples) {
  EXPECT_TRUE(ball_crosses_both_cones(ball(0.0, 0.0, 0.6), pt(0, 0), 1, 1));
  EXPECT_TRUE(ball_crosses_both_cones(ball(0.0, 0.5, 1.2), pt(0, 0), 1, 1));
  EXPECT_TRUE(meets_cone_scan(ball(0.0, 0.5, 1.2), pt(0, 0), 1, ConeDirection::kPast));
  EXPECT_TRUE(meets_cone_scan(ball(0.0, 0.5, 1.2), pt(0, 0), 1, ConeDirection::kFuture));
  EXPECT_FALSE(ball_crosses_both_cones(ball(30.0, 10.0, 2.0), pt(0, 0), 1, 1));
}

TEST(Crossing, MatchesLatticeScan) {
  CounterRng rng(17, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto b = ball(rng.uniform() * 16 - 8, rng.uniform() * 16 - 8, rng.uniform() * 5);
    const int R = 1 + static_cast<int>(rng.below(2));
    for (auto dir : {ConeDirection::kFuture, ConeDirection::kPast}) {
      ASSERT_EQ(ball_meets_cone(b, pt(0, 0), 1, R, dir), meets_cone_scan(b, pt(0, 0), R, dir))
          << b.x[0] << " " << b.t << " " << b.radius << " R=" << R;
    }
  }
}

TEST(Crossing, ContinuousDominatesDiscrete) {
  CounterRng rng(18, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto b = ball(rng.uniform() * 16 - 8, rng.uniform() * 16 - 8, rng.uniform() * 5);
    for (auto dir : {ConeDirection::kFuture, ConeDirection::kPast}) {
      if (ball_meets_cone(b, pt(0, 0), 1, 1, dir, ConeMode::kDiscrete)) {
        EXPECT_TRUE(ball_meets_cone(b, pt(0, 0), 1, 1, dir, ConeMode::kContinuous));
      }
    }
  }
}

BooleanConfig deterministic_config(double lambda, double rho) {
  BooleanConfig c;
  c.lambda = lambda;
  c.radius = RadiusLaw::deterministic(rho);
  c.trunc_s = 16;
  return c;
}

TEST(Sampling, WindowsAreDeterministicAndEmptyWindowIsEmpty) {
  BooleanConfig c;
  const BoxSpec w({{-5, 5}, {-5, 5}});
  EXPECT_EQ(sample_balls(w, c, 3), sample_balls(w, c, 3));
  RealWindow empty;
  empty.lo = {0, 0};
  empty.hi = {0, 1};
  EXPECT_TRUE(sample_balls(empty, c, 3).empty());
}

TEST(Sampling, PoissonCountInWindow) {
  const auto c = deterministic_config(0.3, 0.5);
  RealWindow w;
  w.lo = {0.0, 0.0};
  w.hi = {4.0, 4.0};
  const int n = 20000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(sample_balls(w, c, derive_seed(5, label("t"), static_cast<std::uint64_t>(i))).size());
    s += k;
    s2 += k * k;
  }
  const double mean = s / n, var = s2 / n - mean * mean, expected = 0.3 * 16.0;
  EXPECT_NEAR(mean, expected, 5 * std::sqrt(expected / n));
  EXPECT_NEAR(var / expected, 1.0, 0.05);
}

TEST(Sampling, VoidProbability) {
  const auto c = deterministic_config(0.2, 0.5);
  const int n = 20000;
  int vacant = 0;
  for (int i = 0; i < n; ++i) vacant += omega_at(pt(0, 0), c, derive_seed(6, label("v"), static_cast<std::uint64_t>(i))) ? 0 : 1;
  const double p = std::exp(-0.2 * M_PI * 0.25);
  EXPECT_NEAR(static_cast<double>(vacant) / n, p, 4 * std::sqrt(p * (1 - p) / n));
}

TEST(Environment, EtaImpliesVacantAndIsMonotoneInS) {
  BooleanConfig c;
  c.lambda = 0.3;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    BooleanEnvironment env(c, seed);
    for (Coord t = -3; t <= 3; ++t) {
      for (Coord x = -3; x <= 3; ++x) {
        const auto z = pt(x, t);
        const bool e = env.eta(z);
        if (e) {
          EXPECT_EQ(env.omega(z), 0);
        }
        // eta^s = 1 iff the nearest crossing center is at least s/2 away.
        const double dist = env.nearest_crossing_distance(z, 64.0);
        EXPECT_EQ(e, dist >= c.trunc_s / 2.0);
        for (int s : {2, 4, 8, 16, 32}) {
          BooleanConfig cs = c;
          cs.trunc_s = s;
          const bool es = eta_s_at(z, cs, seed);
          EXPECT_EQ(es, dist >= s / 2.0);
          if (s <= c.trunc_s && !es) {
            EXPECT_FALSE(e);
          }
        }
      }
    }
  }
}

TEST(Environment, EtaFieldMatchesPointwise) {
  BooleanConfig c;
  BooleanEnvironment env(c, 99);
  const BoxSpec box({{-4, 4}, {-2, 6}});
  const auto field = env.eta_field(box);
  box.for_each([&](const LatticePoint& z) { EXPECT_EQ(field.at(z) != 0, env.eta(z)); });
}

TEST(Environment, TranslationCovariance) {
  BooleanConfig c;
  c.rho_max = 4.0;
  const auto classes = radius_classes(c);
  Coord side = 1;
  for (const auto& rc : classes) side = std::max(side, rc.side);
  BooleanConfig shifted = c;
  shifted.cell_origin = pt(side, 2 * side);
  BooleanEnvironment a(c, 7), b(shifted, 7);
  for (Coord t = -2; t <= 2; ++t) {
    for (Coord x = -2; x <= 2; ++x) {
      EXPECT_EQ(a.omega(pt(x, t)), b.omega(pt(x + side, t + 2 * side)));
      EXPECT_EQ(a.eta(pt(x, t)), b.eta(pt(x + side, t + 2 * side)));
    }
  }
}

TEST(Config, Validation) {
  BooleanConfig c;
  c.lambda = -1;
  EXPECT_THROW(c.validate(), UsageError);
  c = BooleanConfig{};
  c.trunc_s = 0;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Budget, DecreasesInS) {
  BooleanConfig c;
  double prev = 1e9;
  for (double s : {4.0, 8.0, 16.0, 32.0}) {
    const double b = truncation_budget(c, s).truncation;
    EXPECT_LT(b, prev);
    prev = b;
  }
}

}  // namespace
}  // namespace rwre
