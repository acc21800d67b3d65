#include <gtest/gtest.h>

#include <limits>

#include "rwre/errors.hpp"
#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"

namespace rwre {
namespace {

LatticePoint pt(Coord x, Coord t) {
  LatticePoint z;
  z.x[0] = x;
  z.t = t;
  return z;
}

TEST(Cone, Examples) {
  const Lattice l(1);
  EXPECT_TRUE(cone_contains(l, pt(0, 0), pt(2, 1), 2, ConeDirection::kFuture));
  EXPECT_FALSE(cone_contains(l, pt(0, 0), pt(3, 1), 2, ConeDirection::kFuture));
  EXPECT_TRUE(cone_contains(l, pt(1, 5), pt(1, 5), 1, ConeDirection::kFuture));
  EXPECT_TRUE(cone_contains(l, pt(1, 5), pt(1, 5), 1, ConeDirection::kPast));
}

TEST(Cone, DimensionMismatchIsUsageError) {
  const Lattice l(1);
  LatticePoint w;
  w.x[1] = 1;
  EXPECT_THROW(cone_contains(l, pt(0, 0), w, 1, ConeDirection::kFuture), UsageError);
}

TEST(Cone, FuturePastDuality) {
  CounterRng rng(7, 1);
  for (int d = 1; d <= 3; ++d) {
    const Lattice l(d);
    for (int i = 0; i < 2000; ++i) {
      LatticePoint z, w;
      for (int k = 0; k < d; ++k) {
        z.x[static_cast<std::size_t>(k)] = static_cast<Coord>(rng.below(11)) - 5;
        w.x[static_cast<std::size_t>(k)] = static_cast<Coord>(rng.below(11)) - 5;
      }
      z.t = static_cast<Coord>(rng.below(11)) - 5;
      w.t = static_cast<Coord>(rng.below(11)) - 5;
      const int R = 1 + static_cast<int>(rng.below(3));
      EXPECT_EQ(cone_contains(l, z, w, R, ConeDirection::kFuture), cone_contains(l, w, z, R, ConeDirection::kPast));
    }
  }
}

BoxSpec time_box(Coord a, Coord b) { return BoxSpec({{0, 0}, {a, b}}); }

TEST(Separation, Examples) {
  EXPECT_EQ(separation(time_box(0, 1), time_box(5, 6)), 4);
  EXPECT_EQ(separation(time_box(0, 3), time_box(2, 5)), 0);
  EXPECT_EQ(separation(time_box(2, 4), time_box(2, 4)), 0);
}

TEST(Separation, SymmetricAndZeroOnOverlap) {
  CounterRng rng(3, 2);
  for (int i = 0; i < 1000; ++i) {
    Coord a = static_cast<Coord>(rng.below(20)), b = a + static_cast<Coord>(rng.below(5));
    Coord c = static_cast<Coord>(rng.below(20)), e = c + static_cast<Coord>(rng.below(5));
    const auto s = separation(time_box(a, b), time_box(c, e));
    EXPECT_EQ(s, separation(time_box(c, e), time_box(a, b)));
    if (!(b < c || e < a)) {
      EXPECT_EQ(s, 0);
    }
  }
}

TEST(Box, DiameterHeightVolume) {
  const BoxSpec b({{0, 3}, {-1, 4}, {2, 2}});
  EXPECT_EQ(b.spatial_dim(), 2);
  EXPECT_EQ(b.spatial_diameter(), 5);
  EXPECT_EQ(b.height(), 0);
  EXPECT_EQ(b.volume(), 4 * 6 * 1);
  EXPECT_THROW(BoxSpec({{1, 0}, {0, 0}}), UsageError);
  std::int64_t visited = 0;
  b.for_each([&](const LatticePoint& z) {
    EXPECT_TRUE(b.contains(z));
    ++visited;
  });
  EXPECT_EQ(visited, b.volume());
}

AllowedPath path(std::vector<std::pair<Coord, Coord>> sites, int L) {
  AllowedPath p;
  p.start_time = sites.front().second;
  p.lipschitz = L;
  for (auto [x, t] : sites) p.sites.push_back(pt(x, t));
  return p;
}

TEST(AllowedPath, Examples) {
  const Lattice l(1);
  EXPECT_TRUE(validate_allowed_path(l, path({{0, 0}, {1, 1}, {0, 2}}, 1)));
  EXPECT_FALSE(validate_allowed_path(l, path({{0, 0}, {2, 1}}, 1)));
  EXPECT_TRUE(validate_allowed_path(l, path({{0, 0}, {2, 1}}, 2)));
  EXPECT_FALSE(validate_allowed_path(l, path({{0, 0}, {0, 2}}, 1)));
  EXPECT_THROW(validate_allowed_path(l, AllowedPath{}), UsageError);
}

TEST(AllowedPath, PrefixesOfValidPathsValidate) {
  const Lattice l(1);
  CounterRng rng(11, 0);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::pair<Coord, Coord>> sites{{0, 0}};
    for (int k = 1; k < 12; ++k) sites.emplace_back(sites.back().first + static_cast<Coord>(rng.below(5)) - 2, k);
    const auto p = path(sites, 2);
    if (!validate_allowed_path(l, p)) continue;
    for (std::size_t n = 1; n <= sites.size(); ++n) {
      EXPECT_TRUE(validate_allowed_path(l, path({sites.begin(), sites.begin() + static_cast<long>(n)}, 2)));
    }
  }
}

TEST(Checked, OverflowIsUsageError) {
  const Coord big = std::numeric_limits<Coord>::max();
  EXPECT_THROW(checked_add(big, 1), UsageError);
  EXPECT_THROW(checked_sub(-big - 1, 1), UsageError);
  EXPECT_THROW(checked_mul(big, 2), UsageError);
  EXPECT_EQ(checked_add(2, 3), 5);
}

TEST(BoxDisplacements, LexicographicOrder) {
  const auto v = box_displacements(2, 1);
  ASSERT_EQ(v.size(), 9u);
  EXPECT_EQ(v.front()[0], -1);
  EXPECT_EQ(v.front()[1], -1);
  EXPECT_EQ(v[1][0], -1);
  EXPECT_EQ(v[1][1], 0);
  EXPECT_EQ(v.back()[0], 1);
  EXPECT_EQ(v.back()[1], 1);
}

}  // namespace
}  // namespace rwre
