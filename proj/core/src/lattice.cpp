#include "rwre/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

std::size_t LatticePointHash::operator()(const LatticePoint& z) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(z.t);
  for (Coord c : z.x) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Coord checked_add(Coord a, Coord b) {
  Coord out;
  if (__builtin_add_overflow(a, b, &out)) throw UsageError("lattice coordinate overflow");
  return out;
}

Coord checked_sub(Coord a, Coord b) {
  Coord out;
  if (__builtin_sub_overflow(a, b, &out)) throw UsageError("lattice coordinate overflow");
  return out;
}

Coord checked_mul(Coord a, Coord b) {
  Coord out;
  if (__builtin_mul_overflow(a, b, &out)) throw UsageError("lattice coordinate overflow");
  return out;
}

Lattice::Lattice(int d) : d_(d) {
  if (d < 1 || d > kMaxSpatialDim) {
    throw UsageError("spatial dimension d must lie in [1, " +
                     std::to_string(kMaxSpatialDim) + "], got " + std::to_string(d));
  }
}

void Lattice::check(const Displacement& y) const {
  for (int i = d_; i < kMaxSpatialDim; ++i) {
    if (y[static_cast<std::size_t>(i)] != 0) {
      throw UsageError("dimension mismatch: non-zero coordinate beyond d=" + std::to_string(d_));
    }
  }
}

void Lattice::check(const LatticePoint& z) const { check(z.x); }

Coord Lattice::spatial_norm(const Displacement& x) const {
  Coord m = 0;
  for (int i = 0; i < d_; ++i) {
    const Coord c = x[static_cast<std::size_t>(i)];
    if (c == std::numeric_limits<Coord>::min()) throw UsageError("lattice coordinate overflow");
    m = std::max(m, std::abs(c));
  }
  return m;
}

Coord Lattice::spatial_distance(const LatticePoint& a, const LatticePoint& b) const {
  Coord m = 0;
  for (int i = 0; i < d_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const Coord diff = checked_sub(a.x[k], b.x[k]);
    if (diff == std::numeric_limits<Coord>::min()) throw UsageError("lattice coordinate overflow");
    m = std::max(m, std::abs(diff));
  }
  return m;
}

LatticePoint Lattice::shifted(const LatticePoint& z, const Displacement& y, Coord dt) const {
  LatticePoint out = z;
  for (int i = 0; i < d_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.x[k] = checked_add(z.x[k], y[k]);
  }
  out.t = checked_add(z.t, dt);
  return out;
}

bool cone_contains(const Lattice& lattice, const LatticePoint& apex, const LatticePoint& w,
                   int R, ConeDirection direction) {
  lattice.check(apex);
  lattice.check(w);
  if (R < 1) throw UsageError("cone slope R must be positive");
  const Coord dt = direction == ConeDirection::kFuture ? checked_sub(w.t, apex.t)
                                                       : checked_sub(apex.t, w.t);
  if (dt < 0) return false;
  return lattice.spatial_distance(w, apex) <= checked_mul(R, dt);
}

BoxSpec::BoxSpec(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.size() < 2 || axes_.size() > kMaxSpatialDim + 1) {
    throw UsageError("box needs between 2 and " + std::to_string(kMaxSpatialDim + 1) + " axes");
  }
  for (const auto& iv : axes_) {
    if (iv.lo > iv.hi) throw UsageError("box axis with lo > hi");
  }
}

BoxSpec BoxSpec::from_corner(const Lattice& lattice, const LatticePoint& lo,
                             const Displacement& spatial_extent, Coord time_extent) {
  lattice.check(lo);
  std::vector<Interval> axes;
  for (int i = 0; i < lattice.dim(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    axes.push_back({lo.x[k], checked_add(lo.x[k], spatial_extent[k])});
  }
  axes.push_back({lo.t, checked_add(lo.t, time_extent)});
  return BoxSpec(std::move(axes));
}

Coord BoxSpec::spatial_diameter() const {
  Coord r = 0;
  for (int i = 0; i < spatial_dim(); ++i) r = std::max(r, axes_[static_cast<std::size_t>(i)].length());
  return r;
}

Coord BoxSpec::height() const { return time().length(); }

bool BoxSpec::contains(const LatticePoint& z) const {
  for (int i = 0; i < spatial_dim(); ++i) {
    const auto& iv = axes_[static_cast<std::size_t>(i)];
    const Coord c = z.x[static_cast<std::size_t>(i)];
    if (c < iv.lo || c > iv.hi) return false;
  }
  return z.t >= time().lo && z.t <= time().hi;
}

std::int64_t BoxSpec::volume() const {
  std::int64_t v = 1;
  for (const auto& iv : axes_) v = checked_mul(v, checked_add(iv.length(), 1));
  return v;
}

Coord separation(const BoxSpec& a, const BoxSpec& b) {
  if (a.spatial_dim() != b.spatial_dim()) throw UsageError("separation: boxes differ in dimension");
  const Interval& ta = a.time();
  const Interval& tb = b.time();
  if (tb.hi < ta.lo) return ta.lo - tb.hi;
  if (ta.hi < tb.lo) return tb.lo - ta.hi;
  return 0;
}

bool validate_allowed_path(const Lattice& lattice, const AllowedPath& path) {
  if (path.sites.empty()) throw UsageError("allowed path must contain at least one site");
  if (path.lipschitz < 1) throw UsageError("allowed path Lipschitz constant must be positive");
  for (std::size_t k = 0; k < path.sites.size(); ++k) {
    const LatticePoint& z = path.sites[k];
    lattice.check(z);
    if (z.t != path.start_time + static_cast<Coord>(k)) return false;
    if (k > 0 && lattice.spatial_distance(z, path.sites[k - 1]) > path.lipschitz) return false;
  }
  return true;
}

std::vector<Displacement> box_displacements(int d, int R) {
  if (d < 1 || d > kMaxSpatialDim || R < 0) throw UsageError("box_displacements: bad d or R");
  std::vector<Displacement> out;
  Displacement y{};
  for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = -R;
  while (true) {
    out.push_back(y);
    int axis = d - 1;
    while (axis >= 0) {
      auto& c = y[static_cast<std::size_t>(axis)];
      if (c < R) {
        ++c;
        break;
      }
      c = -R;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

}  // namespace rwre
