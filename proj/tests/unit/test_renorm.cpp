#include <gtest/gtest.h>

#include <functional>

#include "rwre/boolean_env.hpp"
#include "rwre/environment.hpp"
#include "rwre/errors.hpp"
#include "rwre/renewal_env.hpp"
#include "rwre/renorm.hpp"
#include "rwre/walk.hpp"

namespace rwre {
namespace {

LatticePoint pt(Coord x, Coord t) {
  LatticePoint z;
  z.x[0] = x;
  z.t = t;
  return z;
}

TrapSet traps(std::vector<LatticePoint> p) { return TrapSet::explicit_points(1, std::move(p)); }

AllowedPath vertical(Coord x, Coord t0, Coord len) {
  AllowedPath p;
  p.start_time = t0;
  for (Coord t = t0; t <= t0 + len; ++t) p.sites.push_back(pt(x, t));
  return p;
}

// Does some 1-allowed path of length H from z visit a trap?
bool threatened_by_paths(const LatticePoint& z, int H, const TrapSet& s) {
  std::function<bool(LatticePoint, int)> go = [&](LatticePoint w, int left) {
    if (s.contains(w)) return true;
    if (left == 0) return false;
    for (Coord dx = -1; dx <= 1; ++dx) {
      if (go(pt(w.x[0] + dx, w.t + 1), left - 1)) return true;
    }
    return false;
  };
  return go(z, H);
}

// Minimum of count_threats over every R-allowed path, by explicit enumeration.
std::int64_t min_by_enumeration(const MjInstance& m) {
  const Coord len = static_cast<Coord>(m.J) * m.H;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (const auto& s : m.start) {
    AllowedPath p;
    p.start_time = s.t;
    p.lipschitz = m.R;
    p.sites = {s};
    std::function<void()> go = [&]() {
      if (static_cast<Coord>(p.sites.size()) == len + 1) {
        best = std::min(best, count_threats(p, m.H, m.traps));
        return;
      }
      const auto last = p.sites.back();
      for (Coord dx = -m.R; dx <= m.R; ++dx) {
        p.sites.push_back(pt(last.x[0] + dx, last.t + 1));
        go();
        p.sites.pop_back();
      }
    };
    go();
  }
  return best;
}

TEST(Threatened, Examples) {
  for (int H = 1; H <= 5; ++H) {
    EXPECT_TRUE(is_threatened(pt(0, 0), H, traps({pt(0, H)})));
    EXPECT_FALSE(is_threatened(pt(0, 0), H, traps({pt(H + 1, 1)})));
  }
}

TEST(Threatened, MatchesPathEnumeration) {
  CounterRng rng(1, 2);
  for (int i = 0; i < 500; ++i) {
    const int H = 1 + static_cast<int>(rng.below(5));
    std::vector<LatticePoint> p;
    const int n = static_cast<int>(rng.below(5));
    for (int k = 0; k < n; ++k) p.push_back(pt(static_cast<Coord>(rng.below(15)) - 7, static_cast<Coord>(rng.below(9)) - 1));
    const auto s = traps(p);
    const auto z = pt(static_cast<Coord>(rng.below(5)) - 2, 0);
    EXPECT_EQ(is_threatened(z, H, s), threatened_by_paths(z, H, s));
  }
}

TEST(CountThreats, Examples) {
  EXPECT_EQ(count_threats(vertical(0, 0, 4), 2, traps({})), 0);
  EXPECT_EQ(count_threats(vertical(0, 0, 4), 2, traps({pt(0, 2)})), 2);
  const auto s = traps({pt(0, 2), pt(0, 5)});
  for (int H = 1; H <= 8; H *= 2) EXPECT_LE(count_threats(vertical(0, 0, 8), H, s), 8 / H + 1);
}

TEST(MinThreats, Examples) {
  EXPECT_EQ(min_threats(2, 2, traps({}), {pt(0, 0)}, 1), 0);
  EXPECT_EQ(min_threats(2, 2, traps({pt(0, 2)}), {pt(0, 0)}, 1), 1);
}

TEST(MinThreats, MatchesEnumeration) {
  int compared = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto m = random_mj_instance(seed);
    const auto dp = min_threats(m.J, m.H, m.traps, m.start, m.R);
    EXPECT_EQ(dp, min_threats_brute_force(m.J, m.H, m.traps, m.start, m.R)) << seed;
    if (std::pow(2.0 * m.R + 1, m.J * m.H) <= 20000) {
      EXPECT_EQ(dp, min_by_enumeration(m)) << seed;
      ++compared;
    }
  }
  EXPECT_GT(compared, 100);
}

TEST(MinThreats, MinimalAndMonotoneUnderShrinkage) {
  CounterRng rng(4, 4);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto m = random_mj_instance(seed);
    const auto mj = min_threats(m.J, m.H, m.traps, m.start, m.R);
    // A random explicit path never beats the minimum.
    AllowedPath p;
    p.start_time = 0;
    p.lipschitz = m.R;
    p.sites = {m.start[rng.below(m.start.size())]};
    for (int k = 0; k < m.J * m.H; ++k) {
      p.sites.push_back(pt(p.sites.back().x[0] + static_cast<Coord>(rng.below(2 * static_cast<std::uint64_t>(m.R) + 1)) - m.R, p.sites.back().t + 1));
    }
    EXPECT_LE(mj, count_threats(p, m.H, m.traps));
    auto pts = *m.traps.points();
    if (!pts.empty()) {
      pts.erase(pts.begin() + static_cast<long>(rng.below(pts.size())));
      EXPECT_LE(min_threats(m.J, m.H, traps(pts), m.start, m.R), mj);
    }
  }
}

TEST(MinThreats, OversizedWindowIsResourceError) {
  EXPECT_THROW(min_threats_over(1000, 2, traps({}), {pt(0, 0)}, 1, 100), ResourceError);
}

TEST(FallOnTrap, AllTrapsAndNoTraps) {
  ConstantEnvironment all(1, 1, 0, true);
  const auto r = verify_fall_on_trap(all, JumpKernel::drift(0.1), 4, 4, 200, 1);
  EXPECT_EQ(r.empirical, 0.0);
  EXPECT_TRUE(r.pass);
  ConstantEnvironment none(1, 1, 0, false);
  const auto r0 = verify_fall_on_trap(none, JumpKernel::drift(0.1), 4, 4, 200, 1);
  EXPECT_EQ(r0.M_J, 0);
  EXPECT_EQ(r0.bound, 1.0);
  EXPECT_TRUE(r0.pass);
}

TEST(Qk, PinnedEnvironmentIsZeroAndEstimatesAreMonotone) {
  RenewalConfig c;
  c.mu = InterarrivalLaw::dirac(0);
  for (const auto& e : estimate_qk({0, 3}, RenewalFamily(c), 200, 1)) EXPECT_EQ(e.value, 0.0);
  BooleanConfig b;
  b.lambda = 0.6;
  const auto q = estimate_qk({0, 3}, BooleanFamily(b), 3000, 2);
  for (std::size_t k = 1; k < q.size(); ++k) EXPECT_LE(q[k].value, q[k - 1].value);
  EXPECT_GT(q[0].value, 0.0);
}

TEST(Akh, ConstantEnvironments) {
  ConstantFamily all(1, 1, 0, true), none(1, 1, 0, false);
  EXPECT_EQ(estimate_A_kH(2, 4, all, 1, 20, 1).value, 0.0);
  EXPECT_EQ(estimate_A_kH(2, 4, none, 1, 20, 1).value, 1.0);
  EXPECT_EQ(estimate_unthreatened_box(8, all, 20, 1).value, 0.0);
  EXPECT_EQ(estimate_unthreatened_box(8, none, 20, 1).value, 1.0);
}

TEST(Ladder, Scales) {
  EXPECT_EQ(ScaleLadder::L(0), 1);
  EXPECT_EQ(ScaleLadder::L(3), 64);
  EXPECT_THROW((ScaleLadder{3, 2}.validate()), UsageError);
}

}  // namespace
}  // namespace rwre
