#include "rwre/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"

namespace rwre {

namespace {

constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max() / 4;

Coord floor_mod(Coord a, Coord m) {
  const Coord r = a % m;
  return r < 0 ? r + m : r;
}

// Dense spatial grid prod_a [lo_a, lo_a + n_a - 1]; the last axis is
// contiguous.
struct Grid {
  int d = 1;
  std::array<Coord, kMaxSpatialDim> lo{};
  std::array<Coord, kMaxSpatialDim> n{1, 1, 1};
  std::array<std::size_t, kMaxSpatialDim> stride{};

  Grid(int dim, const std::array<Coord, kMaxSpatialDim>& lower, const std::array<Coord, kMaxSpatialDim>& extent)
      : d(dim), lo(lower), n(extent) {
    for (int a = d; a < kMaxSpatialDim; ++a) {
      lo[static_cast<std::size_t>(a)] = 0;
      n[static_cast<std::size_t>(a)] = 1;
    }
    std::size_t s = 1;
    for (int a = kMaxSpatialDim - 1; a >= 0; --a) {
      stride[static_cast<std::size_t>(a)] = s;
      s *= static_cast<std::size_t>(n[static_cast<std::size_t>(a)]);
    }
  }

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(n[2]);
  }
  bool inside(const Displacement& x) const {
    for (std::size_t a = 0; a < kMaxSpatialDim; ++a) {
      if (x[a] < lo[a] || x[a] >= lo[a] + n[a]) return false;
    }
    return true;
  }
  std::size_t index(const Displacement& x) const {
    std::size_t i = 0;
    for (std::size_t a = 0; a < kMaxSpatialDim; ++a) i += static_cast<std::size_t>(x[a] - lo[a]) * stride[a];
    return i;
  }
  Displacement point(std::size_t i) const {
    Displacement x{};
    for (std::size_t a = 0; a < kMaxSpatialDim; ++a) {
      x[a] = lo[a] + static_cast<Coord>(i / stride[a]);
      i %= stride[a];
    }
    return x;
  }
  BoxSpec box(Coord t_lo, Coord t_hi) const {
    std::vector<Interval> axes;
    for (int a = 0; a < d; ++a) {
      const auto k = static_cast<std::size_t>(a);
      axes.push_back({lo[k], lo[k] + n[k] - 1});
    }
    axes.push_back({t_lo, t_hi});
    return BoxSpec(std::move(axes));
  }
};

// Applies op(out, in) over windows of radius r along every spatial axis;
// op folds neighbours into the running value.
template <typename T, typename Op>
void separable_filter(std::vector<T>& v, const Grid& g, Coord r, T outside, Op op) {
  std::vector<T> line, out;
  for (int a = 0; a < g.d; ++a) {
    const auto ax = static_cast<std::size_t>(a);
    const auto len = static_cast<std::size_t>(g.n[ax]);
    const std::size_t stride = g.stride[ax];
    line.resize(len);
    out.resize(len);
    const std::size_t total = g.size();
    for (std::size_t base = 0; base < total; ++base) {
      // base must be the first element of its line along axis a.
      if ((base / stride) % len != 0) continue;
      for (std::size_t i = 0; i < len; ++i) line[i] = v[base + i * stride];
      for (std::size_t i = 0; i < len; ++i) {
        T acc = outside;
        const auto ii = static_cast<Coord>(i);
        for (Coord j = ii - r; j <= ii + r; ++j) {
          acc = op(acc, j < 0 || j >= static_cast<Coord>(len) ? outside : line[static_cast<std::size_t>(j)]);
        }
        out[i] = acc;
      }
      for (std::size_t i = 0; i < len; ++i) v[base + i * stride] = out[i];
    }
  }
}

// Trap indicators over a space-time box, read slice by slice.
class TrapSlab {
 public:
  TrapSlab(const TrapSet& traps, const Grid& grid, Coord t_lo, Coord t_hi)
      : grid_(grid), t_lo_(t_lo), field_(traps.field(grid.box(t_lo, t_hi))) {
    n_t_ = static_cast<std::size_t>(t_hi - t_lo + 1);
  }

  std::vector<std::uint8_t> slice(Coord t) const {
    std::vector<std::uint8_t> s(grid_.size());
    // BoxField keeps time fastest, so slice entries are n_t apart.
    const auto off = static_cast<std::size_t>(t - t_lo_);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = field_.values[i * n_t_ + off];
    return s;
  }

 private:
  Grid grid_;
  Coord t_lo_;
  std::size_t n_t_;
  BoxField field_;
};

// H-threatened indicator at time t over `main`, where `slab` covers main
// widened by H in space and [t, t + H] in time.
std::vector<std::uint8_t> threat_layer(const TrapSlab& slab, const Grid& trap_grid, const Grid& main, Coord t,
                                       int H) {
  auto g = slab.slice(t + H);
  for (int s = H - 1; s >= 0; --s) {
    separable_filter<std::uint8_t>(g, trap_grid, 1, 0, [](std::uint8_t a, std::uint8_t b) {
      return static_cast<std::uint8_t>(a | b);
    });
    const auto here = slab.slice(t + s);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] |= here[i];
  }
  std::vector<std::uint8_t> out(main.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[trap_grid.index(main.point(i))];
  return out;
}

Grid widened(const Grid& g, Coord by) {
  std::array<Coord, kMaxSpatialDim> lo = g.lo, n = g.n;
  for (int a = 0; a < g.d; ++a) {
    lo[static_cast<std::size_t>(a)] -= by;
    n[static_cast<std::size_t>(a)] += 2 * by;
  }
  return Grid(g.d, lo, n);
}

}  // namespace

Coord ScaleLadder::L(int k) {
  if (k < 0 || k > 30) throw UsageError("scale index out of range");
  return Coord{1} << (2 * k);
}

void ScaleLadder::validate() const {
  if (k_min < 0 || k_max < k_min || k_max > 30) throw UsageError("experiment.k_min/k_max: need 0 <= k_min <= k_max <= 30");
}

TrapSet TrapSet::explicit_points(int d, std::vector<LatticePoint> points) {
  TrapSet s;
  s.d_ = Lattice(d).dim();
  for (const auto& p : points) Lattice(d).check(p);
  s.points_ = std::move(points);
  s.lookup_.insert(s.points_.begin(), s.points_.end());
  return s;
}

TrapSet TrapSet::from_environment(const EnvironmentView& env) {
  TrapSet s;
  s.d_ = env.dim();
  s.env_ = &env;
  return s;
}

bool TrapSet::contains(const LatticePoint& z) const {
  if (env_) return env_->eta(z);
  return lookup_.count(z) > 0;
}

BoxField TrapSet::field(const BoxSpec& box) const {
  if (env_) return env_->eta_field(box);
  BoxField f(box);
  for (const auto& p : points_) {
    if (box.contains(p)) f.at(p) = 1;
  }
  return f;
}

bool is_threatened(const LatticePoint& z, int H, const TrapSet& traps) {
  if (H < 1) throw UsageError("is_threatened: H must be >= 1");
  const int d = traps.dim();
  if (const auto* pts = traps.points()) {
    for (const auto& p : *pts) {
      const Coord dt = p.t - z.t;
      if (dt < 0 || dt > H) continue;
      bool ok = true;
      for (int i = 0; i < d && ok; ++i) {
        const auto k = static_cast<std::size_t>(i);
        ok = std::abs(p.x[k] - z.x[k]) <= dt;
      }
      if (ok) return true;
    }
    return false;
  }
  for (Coord s = 0; s <= H; ++s) {
    std::vector<Interval> axes;
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      axes.push_back({z.x[k] - s, z.x[k] + s});
    }
    axes.push_back({z.t + s, z.t + s});
    bool hit = false;
    BoxSpec(std::move(axes)).for_each([&](const LatticePoint& w) {
      if (!hit && traps.contains(w)) hit = true;
    });
    if (hit) return true;
  }
  return false;
}

std::int64_t count_threats(const AllowedPath& path, int H, const TrapSet& traps) {
  if (H < 1) throw UsageError("count_threats: H must be >= 1");
  validate_allowed_path(Lattice(traps.dim()), path);
  std::int64_t count = 0;
  for (const auto& z : path.sites) {
    if (floor_mod(z.t, H) == 0 && is_threatened(z, H, traps)) ++count;
  }
  return count;
}

std::int64_t min_threats_over(std::int64_t length, int H, const TrapSet& traps,
                              const std::vector<LatticePoint>& start_region, int R, std::int64_t max_cells) {
  if (H < 1) throw UsageError("min_threats: H must be >= 1");
  if (R < 1) throw UsageError("min_threats: R must be >= 1");
  if (length < 0) throw UsageError("min_threats: length must be >= 0");
  if (start_region.empty()) throw UsageError("min_threats: empty start region");
  const int d = traps.dim();
  const Coord t0 = start_region.front().t;
  std::array<Coord, kMaxSpatialDim> lo{}, hi{};
  for (int a = 0; a < d; ++a) {
    lo[static_cast<std::size_t>(a)] = std::numeric_limits<Coord>::max();
    hi[static_cast<std::size_t>(a)] = std::numeric_limits<Coord>::min();
  }
  for (const auto& z : start_region) {
    Lattice(d).check(z);
    if (z.t != t0) throw UsageError("min_threats: start region must lie in one time layer");
    for (int a = 0; a < d; ++a) {
      const auto k = static_cast<std::size_t>(a);
      lo[k] = std::min(lo[k], z.x[k]);
      hi[k] = std::max(hi[k], z.x[k]);
    }
  }
  const Coord reach = checked_mul(R, length);
  std::array<Coord, kMaxSpatialDim> extent{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    const auto k = static_cast<std::size_t>(a);
    lo[k] -= reach;
    extent[k] = hi[k] + reach - lo[k] + 1;
  }
  const Grid main(d, lo, extent);
  const Grid trap_grid = widened(main, H);
  const Coord t1 = t0 + length;
  const double cells = static_cast<double>(trap_grid.size()) * static_cast<double>(length + H + 1);
  if (cells > static_cast<double>(max_cells)) {
    throw ResourceError("min_threats: window of " + std::to_string(static_cast<long long>(cells)) +
                        " cells exceeds the limit");
  }
  const TrapSlab slab(traps, trap_grid, t0, t1 + H);

  std::vector<std::int64_t> value(main.size(), 0);
  auto add_threats = [&](Coord t) {
    if (floor_mod(t, H) != 0) return;
    const auto layer = threat_layer(slab, trap_grid, main, t, H);
    for (std::size_t i = 0; i < value.size(); ++i) value[i] += layer[i];
  };
  add_threats(t1);
  for (Coord t = t1 - 1; t >= t0; --t) {
    separable_filter<std::int64_t>(value, main, R, kUnreachable,
                                   [](std::int64_t a, std::int64_t b) { return std::min(a, b); });
    add_threats(t);
  }
  std::int64_t best = kUnreachable;
  for (const auto& z : start_region) best = std::min(best, value[main.index(z.x)]);
  return best;
}

std::int64_t min_threats(int J, int H, const TrapSet& traps, const std::vector<LatticePoint>& start_region, int R) {
  if (J < 0) throw UsageError("min_threats: J must be >= 0");
  return min_threats_over(static_cast<std::int64_t>(J) * H, H, traps, start_region, R);
}

std::int64_t min_threats_brute_force(int J, int H, const TrapSet& traps,
                                     const std::vector<LatticePoint>& start_region, int R, std::int64_t max_paths) {
  if (H < 1 || R < 1 || J < 0) throw UsageError("min_threats_brute_force: need H, R >= 1 and J >= 0");
  const int d = traps.dim();
  const std::int64_t length = static_cast<std::int64_t>(J) * H;
  const auto steps = box_displacements(d, R);
  const double paths = static_cast<double>(start_region.size()) *
                       std::pow(static_cast<double>(steps.size()), static_cast<double>(length));
  if (paths > static_cast<double>(max_paths)) throw ResourceError("min_threats_brute_force: too many paths");

  std::unordered_map<LatticePoint, bool, LatticePointHash> memo;
  auto threatened = [&](const LatticePoint& z) {
    auto it = memo.find(z);
    if (it != memo.end()) return it->second;
    const bool v = is_threatened(z, H, traps);
    memo.emplace(z, v);
    return v;
  };
  std::int64_t best = kUnreachable;
  // Depth-first over every step sequence.
  auto dfs = [&](auto&& self, const LatticePoint& z, std::int64_t depth, std::int64_t count) -> void {
    if (floor_mod(z.t, H) == 0 && threatened(z)) ++count;
    if (depth == length) {
      best = std::min(best, count);
      return;
    }
    for (const auto& y : steps) {
      LatticePoint next = z;
      for (std::size_t k = 0; k < y.size(); ++k) next.x[k] += y[k];
      ++next.t;
      self(self, next, depth + 1, count);
    }
  };
  for (const auto& z : start_region) dfs(dfs, z, 0, 0);
  return best;
}

MjInstance random_mj_instance(std::uint64_t seed) {
  CounterRng rng(seed, label("mj.instance"));
  const auto draw = [&](Coord lo, Coord hi) {
    return lo + static_cast<Coord>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  };
  MjInstance inst;
  inst.R = static_cast<int>(draw(1, 2));
  inst.J = static_cast<int>(draw(1, 4));
  inst.H = static_cast<int>(draw(1, 8 / inst.J));
  const Coord length = static_cast<Coord>(inst.J) * inst.H;
  const Coord reach = inst.R * length / 2 + 2;
  std::vector<LatticePoint> points;
  const Coord n_traps = draw(0, 6);
  for (Coord i = 0; i < n_traps; ++i) {
    LatticePoint z;
    z.x[0] = draw(-reach, reach);
    z.t = draw(0, length + inst.H);
    points.push_back(z);
  }
  inst.traps = TrapSet::explicit_points(1, std::move(points));
  const Coord n_start = draw(1, 3);
  for (Coord i = 0; i < n_start; ++i) {
    LatticePoint z;
    z.x[0] = draw(-2, 2);
    if (std::find(inst.start.begin(), inst.start.end(), z) == inst.start.end()) inst.start.push_back(z);
  }
  return inst;
}

FallOnTrapReport verify_fall_on_trap(const EnvironmentView& env, const JumpKernel& kernel, int J, int H,
                                     std::int64_t n_walks, std::uint64_t seed) {
  if (n_walks < 1) throw UsageError("verify_fall_on_trap: need at least one walk");
  if (env.dim() != kernel.dim()) throw UsageError("kernel and environment dimensions differ");
  const TrapSet traps = TrapSet::from_environment(env);
  FallOnTrapReport rep;
  const LatticePoint origin{};
  rep.M_J = min_threats(J, H, traps, {origin}, kernel.range());
  rep.bound = std::pow(1.0 - std::pow(kernel.kappa(), H), static_cast<double>(rep.M_J));
  const std::int64_t horizon = static_cast<std::int64_t>(J) * H;
  std::int64_t survived = 0;
  for (std::int64_t i = 0; i < n_walks; ++i) {
    const std::uint64_t walk_seed = derive_seed(seed, label("walk"), static_cast<std::uint64_t>(i));
    LatticePoint z = origin;
    bool hit = false;
    for (std::int64_t t = 1; t <= horizon && !hit; ++t) {
      z = step(z, env, kernel, walk_seed);
      hit = traps.contains(z);
    }
    if (!hit) ++survived;
  }
  rep.n = n_walks;
  rep.empirical = static_cast<double>(survived) / static_cast<double>(n_walks);
  rep.se = std::sqrt(rep.bound * (1.0 - rep.bound) / static_cast<double>(n_walks));
  rep.pass = rep.empirical <= rep.bound + 3.0 * rep.se;
  return rep;
}

std::vector<Estimate> estimate_qk(const ScaleLadder& ladder, const EnvironmentFamily& family,
                                  std::int64_t n_samples, std::uint64_t seed, int jobs) {
  ladder.validate();
  if (n_samples < 1) throw UsageError("estimate_qk: n_samples must be >= 1");
  const Coord L_max = ScaleLadder::L(ladder.k_max);
  std::vector<Coord> first_hit(static_cast<std::size_t>(n_samples));
  parallel_for(first_hit.size(), jobs, [&](std::size_t i) {
    const auto env = family.realize(derive_seed(seed, label("qk"), i));
    LatticePoint z{};
    Coord t = 0;
    for (; t < L_max; ++t) {
      z.t = t;
      if (env->eta(z)) break;
    }
    first_hit[i] = t;
  });
  std::vector<Estimate> out;
  for (int k = ladder.k_min; k <= ladder.k_max; ++k) {
    const Coord L = ScaleLadder::L(k);
    const auto hits = std::count_if(first_hit.begin(), first_hit.end(), [&](Coord t) { return t >= L; });
    out.push_back(wilson(hits, n_samples));
  }
  return out;
}

Estimate estimate_A_kH(int k, int H, const EnvironmentFamily& family, int R, std::int64_t n_samples,
                       std::uint64_t seed, int jobs) {
  if (k < 1) throw UsageError("estimate_A_kH: k must be >= 1");
  if (n_samples < 1) throw UsageError("estimate_A_kH: n_samples must be >= 1");
  const Coord L = ScaleLadder::L(k);
  const int d = family.dim();
  std::vector<LatticePoint> start;
  Grid(d, {}, {L, L, L}).box(0, 0).for_each([&](const LatticePoint& z) { start.push_back(z); });
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(n_samples));
  parallel_for(hit.size(), jobs, [&](std::size_t i) {
    const auto env = family.realize(derive_seed(seed, label("akh"), i));
    const TrapSet traps = TrapSet::from_environment(*env);
    hit[i] = min_threats_over(L - 1, H, traps, start, R) < static_cast<std::int64_t>(k) * k ? 1 : 0;
  });
  return wilson(std::count(hit.begin(), hit.end(), std::uint8_t{1}), n_samples);
}

Estimate estimate_unthreatened_box(Coord L, const EnvironmentFamily& family, std::int64_t n_samples,
                                   std::uint64_t seed, int jobs) {
  if (L < 1) throw UsageError("estimate_unthreatened_box: L must be >= 1");
  if (n_samples < 1) throw UsageError("estimate_unthreatened_box: n_samples must be >= 1");
  const int d = family.dim();
  const Grid main(d, {}, {L, L, L});
  const Grid trap_grid = widened(main, L);
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(n_samples));
  parallel_for(hit.size(), jobs, [&](std::size_t i) {
    const auto env = family.realize(derive_seed(seed, label("box"), i));
    const TrapSet traps = TrapSet::from_environment(*env);
    const TrapSlab slab(traps, trap_grid, 0, L);
    const auto layer = threat_layer(slab, trap_grid, main, 0, static_cast<int>(L));
    hit[i] = std::find(layer.begin(), layer.end(), std::uint8_t{0}) != layer.end() ? 1 : 0;
  });
  return wilson(std::count(hit.begin(), hit.end(), std::uint8_t{1}), n_samples);
}

}  // namespace rwre
