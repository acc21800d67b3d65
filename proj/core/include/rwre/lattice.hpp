#pragma once

// Geometry of the space-time lattice Z^d x Z: points, L-infinity cones,
// boxes with spatial diameter / height / vertical separation, and
// R-allowed paths.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace rwre {

inline constexpr int kMaxSpatialDim = 3;

using Coord = std::int64_t;
using Displacement = std::array<Coord, kMaxSpatialDim>;

// Space-time site z = (x, t). The spatial dimension d is not stored per
// point; it lives in a Lattice context. Coordinates beyond d must be zero.
struct LatticePoint {
  Displacement x{};
  Coord t = 0;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& z) const noexcept;
};

// Overflow-checked arithmetic; throws UsageError instead of wrapping.
Coord checked_add(Coord a, Coord b);
Coord checked_sub(Coord a, Coord b);
Coord checked_mul(Coord a, Coord b);

class Lattice {
 public:
  explicit Lattice(int d);

  int dim() const { return d_; }

  // Throws UsageError when z has a non-zero coordinate beyond dimension d.
  void check(const LatticePoint& z) const;
  void check(const Displacement& y) const;

  // |x|_inf over the first d coordinates.
  Coord spatial_norm(const Displacement& x) const;
  Coord spatial_distance(const LatticePoint& a, const LatticePoint& b) const;

  LatticePoint shifted(const LatticePoint& z, const Displacement& y,
                       Coord dt) const;

 private:
  int d_;
};

enum class ConeDirection { kFuture, kPast };

// Membership of w in the future cone C_apex^+ or past cone C_apex^- of slope R.
bool cone_contains(const Lattice& lattice, const LatticePoint& apex,
                   const LatticePoint& w, int R, ConeDirection direction);

struct Interval {
  Coord lo = 0;
  Coord hi = 0;
  Coord length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Axis-aligned integer box prod_i [a_i, b_i]; the last axis is time.
class BoxSpec {
 public:
  BoxSpec() = default;
  explicit BoxSpec(std::vector<Interval> axes);

  // Box of spatial dimension d built from a space-time corner and extents.
  static BoxSpec from_corner(const Lattice& lattice, const LatticePoint& lo,
                             const Displacement& spatial_extent,
                             Coord time_extent);

  int spatial_dim() const { return static_cast<int>(axes_.size()) - 1; }
  const std::vector<Interval>& axes() const { return axes_; }
  const Interval& time() const { return axes_.back(); }
  const Interval& axis(int i) const { return axes_.at(static_cast<std::size_t>(i)); }

  Coord spatial_diameter() const;  // r(A)
  Coord height() const;            // h(A)
  bool contains(const LatticePoint& z) const;
  std::int64_t volume() const;

  // Visits every lattice point in lexicographic order; time varies fastest.
  template <typename F>
  void for_each(F&& visit) const;

  friend bool operator==(const BoxSpec&, const BoxSpec&) = default;

 private:
  std::vector<Interval> axes_;
};

// Vertical separation sep(A, B); 0 when the time intervals intersect.
Coord separation(const BoxSpec& a, const BoxSpec& b);

struct AllowedPath {
  Coord start_time = 0;
  std::vector<LatticePoint> sites;
  int lipschitz = 1;

  Coord length() const { return static_cast<Coord>(sites.size()) - 1; }
};

// True iff site k sits at time start_time + k and every spatial step has
// L-infinity norm at most `lipschitz`. Empty paths are a usage error.
bool validate_allowed_path(const Lattice& lattice, const AllowedPath& path);

// Lexicographic enumeration of [-R, R]^d, first coordinate most significant.
std::vector<Displacement> box_displacements(int d, int R);

template <typename F>
void BoxSpec::for_each(F&& visit) const {
  const int d = spatial_dim();
  if (d < 0) return;
  LatticePoint z;
  for (int i = 0; i < d; ++i) z.x[static_cast<std::size_t>(i)] = axes_[static_cast<std::size_t>(i)].lo;
  z.t = time().lo;
  while (true) {
    visit(static_cast<const LatticePoint&>(z));
    int axis = d;  // time axis varies fastest
    while (axis >= 0) {
      const auto& iv = axes_[static_cast<std::size_t>(axis)];
      Coord& c = axis == d ? z.t : z.x[static_cast<std::size_t>(axis)];
      if (c < iv.hi) {
        ++c;
        break;
      }
      c = iv.lo;
      --axis;
    }
    if (axis < 0) return;
  }
}

}  // namespace rwre
