#include "rwre/boolean_env.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDefaultCapSurvival = 1e-9;

using CellIndex = std::array<Coord, kMaxSpatialDim + 1>;

Coord floor_div(double v, Coord side) {
  return static_cast<Coord>(std::floor(v / static_cast<double>(side)));
}

double sq(double v) { return v * v; }

double dist2(const BallRecord& b, const LatticePoint& z, int d) {
  double acc = sq(b.t - static_cast<double>(z.t));
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    acc += sq(b.x[k] - static_cast<double>(z.x[k]));
  }
  return acc;
}

double sample_radius(const RadiusLaw& law, const RadiusClass& rc, double u) {
  if (law.kind == RadiusLaw::Kind::kDeterministic) return law.rho;
  const double s_hi = law.survival(rc.hi);
  const double s_lo = law.survival(rc.lo);
  const double p = s_hi + u * (s_lo - s_hi);
  return std::clamp(law.inverse_survival(p), rc.lo, rc.hi);
}

std::vector<BallRecord> sample_cell(const BooleanConfig& cfg, const RadiusClass& rc, int cls,
                                    const CellIndex& cell, std::uint64_t seed) {
  const int d = cfg.d;
  std::array<std::int64_t, kMaxSpatialDim + 2> words{};
  words[0] = cls;
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    words[k + 1] = cell[k] - cfg.cell_origin.x[k] / rc.side;
  }
  words[static_cast<std::size_t>(d) + 1] = cell[static_cast<std::size_t>(d)] - cfg.cell_origin.t / rc.side;
  CounterRng rng(seed, hash_words(label("boolean.cell"),
                                  std::span<const std::int64_t>(words.data(), static_cast<std::size_t>(d) + 2)));

  const double side = static_cast<double>(rc.side);
  const double mean = cfg.lambda * std::pow(side, d + 1) * rc.mass;
  const std::int64_t n = rng.poisson(mean);
  std::vector<BallRecord> balls;
  balls.reserve(static_cast<std::size_t>(n));
  for (std::int64_t j = 0; j < n; ++j) {
    BallRecord b;
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      b.x[k] = (static_cast<double>(cell[k]) + rng.uniform()) * side;
    }
    b.t = (static_cast<double>(cell[static_cast<std::size_t>(d)]) + rng.uniform()) * side;
    b.radius = sample_radius(cfg.radius, rc, rng.uniform());
    balls.push_back(b);
  }
  return balls;
}

// Visits cells of class `rc` meeting the closed real box [lo, hi].
template <typename F>
void for_each_cell(int d, Coord side, const std::array<double, kMaxSpatialDim + 1>& lo,
                   const std::array<double, kMaxSpatialDim + 1>& hi, F&& visit) {
  CellIndex first{}, last{}, c{};
  for (int i = 0; i <= d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    first[k] = floor_div(lo[k], side);
    last[k] = floor_div(hi[k], side);
    if (first[k] > last[k]) return;
  }
  c = first;
  while (true) {
    visit(static_cast<const CellIndex&>(c));
    int axis = d;
    while (axis >= 0) {
      const auto k = static_cast<std::size_t>(axis);
      if (c[k] < last[k]) {
        ++c[k];
        break;
      }
      c[k] = first[k];
      --axis;
    }
    if (axis < 0) return;
  }
}

// Visits balls of every class whose centers can lie within the per-class
// half-widths (spatial, time) around z. `source(cls, cell)` yields the
// balls of one cell; `visit(ball)` returns false to stop.
template <typename Source, typename HalfWidths, typename Visit>
void scan_around(const BooleanConfig& cfg, const std::vector<RadiusClass>& classes,
                 const LatticePoint& z, HalfWidths&& half_widths, Source&& source, Visit&& visit) {
  const int d = cfg.d;
  for (std::size_t j = 0; j < classes.size(); ++j) {
    const auto [hw_x, hw_t] = half_widths(classes[j]);
    if (hw_x < 0.0 || hw_t < 0.0) continue;
    std::array<double, kMaxSpatialDim + 1> lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      lo[k] = static_cast<double>(z.x[k]) - hw_x;
      hi[k] = static_cast<double>(z.x[k]) + hw_x;
    }
    lo[static_cast<std::size_t>(d)] = static_cast<double>(z.t) - hw_t;
    hi[static_cast<std::size_t>(d)] = static_cast<double>(z.t) + hw_t;
    bool stop = false;
    for_each_cell(d, classes[j].side, lo, hi, [&](const CellIndex& c) {
      if (stop) return;
      const auto& balls = source(static_cast<int>(j), c);
      for (const BallRecord& b : balls) {
        if (!visit(b)) {
          stop = true;
          return;
        }
      }
    });
    if (stop) return;
  }
}

struct DirectSource {
  const BooleanConfig& cfg;
  const std::vector<RadiusClass>& classes;
  std::uint64_t seed;
  std::vector<BallRecord> scratch;

  const std::vector<BallRecord>& operator()(int cls, const CellIndex& c) {
    scratch = sample_cell(cfg, classes[static_cast<std::size_t>(cls)], cls, c, seed);
    return scratch;
  }
};

double cone_spread(int R) { return std::sqrt(1.0 + static_cast<double>(R) * R); }

// Euclidean distance from `ball`'s center to the real cone of slope R.
double distance_to_real_cone(const BallRecord& ball, const LatticePoint& apex, int d, int R,
                             ConeDirection dir) {
  const double sign = dir == ConeDirection::kFuture ? 1.0 : -1.0;
  const double ct = sign * (ball.t - static_cast<double>(apex.t));
  double spread = 0.0;
  std::array<double, kMaxSpatialDim> off{};
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    off[k] = std::abs(ball.x[k] - static_cast<double>(apex.x[k]));
    spread = std::max(spread, off[k]);
  }
  auto f = [&](double tau) {
    double acc = sq(tau - ct);
    for (int i = 0; i < d; ++i) {
      acc += sq(std::max(0.0, off[static_cast<std::size_t>(i)] - R * tau));
    }
    return acc;
  };
  double a = 0.0;
  double b = std::max(ct, 0.0) + spread / R + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (f(m1) <= f(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  return std::sqrt(f(0.5 * (a + b)));
}

}  // namespace

// --- RadiusLaw ---------------------------------------------------------------

RadiusLaw RadiusLaw::pareto(double rho0, double beta) {
  RadiusLaw law;
  law.kind = Kind::kPareto;
  law.rho0 = rho0;
  law.beta = beta;
  return law;
}

RadiusLaw RadiusLaw::deterministic(double rho) {
  RadiusLaw law;
  law.kind = Kind::kDeterministic;
  law.rho = rho;
  return law;
}

double RadiusLaw::survival(double r) const {
  if (kind == Kind::kDeterministic) return r <= rho ? 1.0 : 0.0;
  if (r <= rho0) return 1.0;
  return std::pow(r / rho0, -beta);
}

double RadiusLaw::inverse_survival(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw UsageError("inverse_survival: p must lie in (0, 1]");
  if (kind == Kind::kDeterministic) return rho;
  return rho0 * std::pow(p, -1.0 / beta);
}

// --- BooleanConfig -----------------------------------------------------------

double BooleanConfig::effective_rho_max() const {
  if (rho_max > 0.0) return rho_max;
  if (radius.kind == RadiusLaw::Kind::kDeterministic) return radius.rho;
  return radius.inverse_survival(kDefaultCapSurvival);
}

double BooleanConfig::radius_tail_mass() const {
  const double cap = effective_rho_max();
  if (radius.kind == RadiusLaw::Kind::kDeterministic) return radius.rho > cap ? 1.0 : 0.0;
  return radius.survival(cap);
}

void BooleanConfig::validate() const {
  if (d < 1 || d > kMaxSpatialDim) throw UsageError("d: spatial dimension out of range");
  if (R < 1) throw UsageError("kernel.R: range must be a positive integer");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("boolean.lambda: must be positive");
  if (trunc_s < 1) throw UsageError("boolean.trunc_s: must be >= 1");
  if (radius.kind == RadiusLaw::Kind::kPareto) {
    if (!(radius.rho0 > 0.0)) throw UsageError("boolean.rho0: must be positive");
    if (!(radius.beta > d + 1)) {
      throw UsageError("boolean.beta: radius tail exponent must exceed d+1 = " + std::to_string(d + 1));
    }
    if (rho_max != 0.0 && !(rho_max >= radius.rho0)) {
      throw UsageError("boolean.rho_max: must be >= boolean.rho0");
    }
  } else {
    if (!(radius.rho > 0.0)) throw UsageError("boolean.rho: must be positive");
    if (rho_max != 0.0 && rho_max < radius.rho) throw UsageError("boolean.rho_max: below the deterministic radius");
  }
  if (rho_max < 0.0) throw UsageError("boolean.rho_max: must be non-negative");
  const auto classes = radius_classes(*this);
  Coord coarsest = 1;
  for (const auto& rc : classes) coarsest = std::max(coarsest, rc.side);
  for (int i = 0; i <= d; ++i) {
    const Coord c = i == d ? cell_origin.t : cell_origin.x[static_cast<std::size_t>(i)];
    if (c % coarsest != 0) {
      throw UsageError("boolean cell origin must be a multiple of the coarsest cell side " +
                       std::to_string(coarsest));
    }
  }
  Lattice(d).check(cell_origin);
}

std::vector<RadiusClass> radius_classes(const BooleanConfig& cfg) {
  auto side_for = [](double hi) {
    Coord side = 1;
    while (static_cast<double>(side) < hi) side *= 2;
    return side;
  };
  std::vector<RadiusClass> out;
  if (cfg.radius.kind == RadiusLaw::Kind::kDeterministic) {
    out.push_back({cfg.radius.rho, cfg.radius.rho, 1.0, side_for(cfg.radius.rho)});
    return out;
  }
  const double cap = cfg.effective_rho_max();
  double lo = cfg.radius.rho0;
  while (lo < cap) {
    const double hi = std::min(2.0 * lo, cap);
    const double mass = cfg.radius.survival(lo) - cfg.radius.survival(hi);
    out.push_back({lo, hi, mass, side_for(hi)});
    lo = hi;
  }
  return out;
}

// --- sampling ----------------------------------------------------------------

RealWindow RealWindow::envelope(const BoxSpec& box) {
  RealWindow w;
  const int d = box.spatial_dim();
  for (int i = 0; i <= d; ++i) {
    const auto& iv = box.axis(i);
    w.lo[static_cast<std::size_t>(i)] = static_cast<double>(iv.lo);
    w.hi[static_cast<std::size_t>(i)] = static_cast<double>(iv.hi) + 1.0;
  }
  return w;
}

bool RealWindow::empty(int d) const {
  for (int i = 0; i <= d; ++i) {
    if (!(lo[static_cast<std::size_t>(i)] < hi[static_cast<std::size_t>(i)])) return true;
  }
  return false;
}

std::vector<BallRecord> sample_balls(const BoxSpec& window, const BooleanConfig& config,
                                     std::uint64_t seed) {
  if (window.spatial_dim() != config.d) throw UsageError("sample_balls: window dimension mismatch");
  return sample_balls(RealWindow::envelope(window), config, seed);
}

std::vector<BallRecord> sample_balls(const RealWindow& window, const BooleanConfig& config,
                                     std::uint64_t seed) {
  config.validate();
  std::vector<BallRecord> out;
  const int d = config.d;
  if (window.empty(d)) return out;
  const auto classes = radius_classes(config);
  for (std::size_t j = 0; j < classes.size(); ++j) {
    for_each_cell(d, classes[j].side, window.lo, window.hi, [&](const CellIndex& c) {
      for (const BallRecord& b : sample_cell(config, classes[j], static_cast<int>(j), c, seed)) {
        bool inside = b.t >= window.lo[static_cast<std::size_t>(d)] &&
                      b.t < window.hi[static_cast<std::size_t>(d)];
        for (int i = 0; i < d && inside; ++i) {
          const auto k = static_cast<std::size_t>(i);
          inside = b.x[k] >= window.lo[k] && b.x[k] < window.hi[k];
        }
        if (inside) out.push_back(b);
      }
    });
  }
  return out;
}

// --- geometry ----------------------------------------------------------------

bool ball_meets_cone(const BallRecord& ball, const LatticePoint& apex, int d, int R,
                     ConeDirection direction, ConeMode mode) {
  if (mode == ConeMode::kContinuous) {
    return distance_to_real_cone(ball, apex, d, R, direction) < ball.radius;
  }
  const double r2 = sq(ball.radius);
  const bool future = direction == ConeDirection::kFuture;
  Coord t_lo = static_cast<Coord>(std::ceil(ball.t - ball.radius));
  Coord t_hi = static_cast<Coord>(std::floor(ball.t + ball.radius));
  if (future) {
    t_lo = std::max(t_lo, apex.t);
  } else {
    t_hi = std::min(t_hi, apex.t);
  }
  for (Coord t = t_lo; t <= t_hi; ++t) {
    const double slice2 = r2 - sq(static_cast<double>(t) - ball.t);
    if (slice2 <= 0.0) continue;
    const Coord reach = R * (future ? t - apex.t : apex.t - t);
    double acc = 0.0;
    for (int i = 0; i < d && acc < slice2; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const Coord nearest = std::clamp(static_cast<Coord>(std::llround(ball.x[k])),
                                       apex.x[k] - reach, apex.x[k] + reach);
      acc += sq(static_cast<double>(nearest) - ball.x[k]);
    }
    if (acc < slice2) return true;
  }
  return false;
}

bool ball_crosses_both_cones(const BallRecord& ball, const LatticePoint& z, int d, int R,
                             ConeMode mode) {
  if (dist2(ball, z, d) < sq(ball.radius)) return true;  // contains the apex
  return ball_meets_cone(ball, z, d, R, ConeDirection::kFuture, mode) &&
         ball_meets_cone(ball, z, d, R, ConeDirection::kPast, mode);
}

namespace {

std::pair<double, double> omega_half_widths(const RadiusClass& rc) { return {rc.hi, rc.hi}; }

// Centers of balls able to cross both cones satisfy |dt| < radius and
// |dx|_inf < sqrt(1+R^2) radius.
auto crossing_half_widths(int R, double max_distance) {
  return [R, max_distance](const RadiusClass& rc) {
    return std::pair<double, double>{std::min(cone_spread(R) * rc.hi, max_distance),
                                     std::min(rc.hi, max_distance)};
  };
}

template <typename Source>
bool omega_impl(const LatticePoint& z, const BooleanConfig& cfg,
                const std::vector<RadiusClass>& classes, Source&& source) {
  bool covered = false;
  scan_around(cfg, classes, z, omega_half_widths, source, [&](const BallRecord& b) {
    if (dist2(b, z, cfg.d) < sq(b.radius)) {
      covered = true;
      return false;
    }
    return true;
  });
  return covered;
}

template <typename Source>
double nearest_crossing_impl(const LatticePoint& z, const BooleanConfig& cfg,
                             const std::vector<RadiusClass>& classes, double max_distance,
                             Source&& source) {
  double best = kInf;
  const double max2 = sq(max_distance);
  scan_around(cfg, classes, z, crossing_half_widths(cfg.R, max_distance), source,
              [&](const BallRecord& b) {
                const double dd = dist2(b, z, cfg.d);
                if (dd < max2 && dd < sq(best) &&
                    ball_crosses_both_cones(b, z, cfg.d, cfg.R, cfg.cones)) {
                  best = std::sqrt(dd);
                }
                return true;
              });
  return best;
}

template <typename Source>
bool eta_impl(const LatticePoint& z, const BooleanConfig& cfg,
              const std::vector<RadiusClass>& classes, Source&& source) {
  const double half = 0.5 * cfg.trunc_s;
  bool blocked = false;
  scan_around(cfg, classes, z, crossing_half_widths(cfg.R, half), source, [&](const BallRecord& b) {
    if (dist2(b, z, cfg.d) < sq(half) && ball_crosses_both_cones(b, z, cfg.d, cfg.R, cfg.cones)) {
      blocked = true;
      return false;
    }
    return true;
  });
  return !blocked;
}

}  // namespace

bool omega_at(const LatticePoint& z, const BooleanConfig& config, std::uint64_t seed) {
  config.validate();
  Lattice(config.d).check(z);
  const auto classes = radius_classes(config);
  return omega_impl(z, config, classes, DirectSource{config, classes, seed, {}});
}

bool eta_s_at(const LatticePoint& z, const BooleanConfig& config, std::uint64_t seed) {
  config.validate();
  Lattice(config.d).check(z);
  const auto classes = radius_classes(config);
  return eta_impl(z, config, classes, DirectSource{config, classes, seed, {}});
}

double nearest_crossing_distance(const LatticePoint& z, const BooleanConfig& config,
                                 std::uint64_t seed, double max_distance) {
  config.validate();
  Lattice(config.d).check(z);
  const auto classes = radius_classes(config);
  return nearest_crossing_impl(z, config, classes, max_distance,
                               DirectSource{config, classes, seed, {}});
}

TruncationBudget truncation_budget(const BooleanConfig& config, double s) {
  config.validate();
  const int d = config.d;
  const double kappa = 1.0 / std::sqrt(1.0 + d * (1.0 + sq(config.R)));
  const double area = 2.0 * std::pow(M_PI, 0.5 * (d + 1)) / std::tgamma(0.5 * (d + 1));
  const double cap = config.effective_rho_max();
  const double n1 = d + 1.0;

  // integral over r in [a, b] of area * r^d * survival(kappa r)
  auto shell = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    const RadiusLaw& law = config.radius;
    const double knee = (law.kind == RadiusLaw::Kind::kPareto ? law.rho0 : law.rho) / kappa;
    double total = 0.0;
    const double flat_hi = std::min(b, knee);
    if (flat_hi > a) total += area * (std::pow(flat_hi, n1) - std::pow(a, n1)) / n1;
    if (law.kind == RadiusLaw::Kind::kPareto && b > knee) {
      const double lo = std::max(a, knee);
      const double e = n1 - law.beta;
      const double upper = std::isinf(b) ? 0.0 : std::pow(b, e);
      total += area * std::pow(kappa / law.rho0, -law.beta) * (upper - std::pow(lo, e)) / e;
    }
    return total;
  };

  TruncationBudget out;
  out.truncation = config.lambda * shell(0.5 * s, cap / kappa);
  if (config.radius.kind == RadiusLaw::Kind::kPareto) {
    const double cap_r = cap / kappa;
    out.radius_cap = config.lambda * (config.radius.survival(cap) * area * std::pow(cap_r, n1) / n1 +
                                      shell(cap_r, kInf));
  }
  return out;
}

// --- cached realization ------------------------------------------------------

std::size_t BooleanEnvironment::CellKeyHash::operator()(const CellKey& k) const noexcept {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(k.cls));
  for (Coord c : k.cell) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return static_cast<std::size_t>(h);
}

BooleanEnvironment::BooleanEnvironment(BooleanConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed) {
  config_.validate();
  classes_ = radius_classes(config_);
}

const std::vector<BallRecord>& BooleanEnvironment::cell(int cls, const CellIndex& c) const {
  CellKey key{cls, c};
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto balls = sample_cell(config_, classes_[static_cast<std::size_t>(cls)], cls, c, seed_);
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.try_emplace(key, std::move(balls)).first->second;
}

std::int64_t BooleanEnvironment::omega(const LatticePoint& z) const {
  auto source = [this](int cls, const CellIndex& c) -> const std::vector<BallRecord>& {
    return cell(cls, c);
  };
  return omega_impl(z, config_, classes_, source) ? 1 : 0;
}

bool BooleanEnvironment::eta(const LatticePoint& z) const {
  auto source = [this](int cls, const CellIndex& c) -> const std::vector<BallRecord>& {
    return cell(cls, c);
  };
  return eta_impl(z, config_, classes_, source);
}

double BooleanEnvironment::nearest_crossing_distance(const LatticePoint& z,
                                                     double max_distance) const {
  auto source = [this](int cls, const CellIndex& c) -> const std::vector<BallRecord>& {
    return cell(cls, c);
  };
  return nearest_crossing_impl(z, config_, classes_, max_distance, source);
}

BoxField BooleanEnvironment::eta_field(const BoxSpec& box) const {
  const int d = config_.d;
  if (box.spatial_dim() != d) throw UsageError("eta_field: box dimension mismatch");
  BoxField field(box);
  std::fill(field.values.begin(), field.values.end(), std::uint8_t{1});
  const double half = 0.5 * config_.trunc_s;
  const double spread = cone_spread(config_.R);

  for (std::size_t j = 0; j < classes_.size(); ++j) {
    const RadiusClass& rc = classes_[j];
    const double hw_x = std::min(spread * rc.hi, half);
    const double hw_t = std::min(rc.hi, half);
    std::array<double, kMaxSpatialDim + 1> lo{}, hi{};
    for (int i = 0; i <= d; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double hw = i == d ? hw_t : hw_x;
      lo[k] = static_cast<double>(box.axis(i).lo) - hw;
      hi[k] = static_cast<double>(box.axis(i).hi) + hw;
    }
    for_each_cell(d, rc.side, lo, hi, [&](const CellIndex& c) {
      for (const BallRecord& b : cell(static_cast<int>(j), c)) {
        // Candidate apexes: |dt| < min(radius, s/2), |dx|_inf < min(spread*radius, s/2).
        const double reach_x = std::min(spread * b.radius, half);
        const double reach_t = std::min(b.radius, half);
        std::vector<Interval> axes;
        bool empty = false;
        for (int i = 0; i <= d; ++i) {
          const double center = i == d ? b.t : b.x[static_cast<std::size_t>(i)];
          const double reach = i == d ? reach_t : reach_x;
          const Interval& iv = box.axis(i);
          const Coord a = std::max(iv.lo, static_cast<Coord>(std::floor(center - reach)));
          const Coord e = std::min(iv.hi, static_cast<Coord>(std::ceil(center + reach)));
          if (a > e) {
            empty = true;
            break;
          }
          axes.push_back({a, e});
        }
        if (empty) continue;
        BoxSpec(std::move(axes)).for_each([&](const LatticePoint& z) {
          auto& v = field.at(z);
          if (v == 0) return;
          if (dist2(b, z, d) < sq(half) &&
              ball_crosses_both_cones(b, z, d, config_.R, config_.cones)) {
            v = 0;
          }
        });
      }
    });
  }
  return field;
}

BooleanFamily::BooleanFamily(BooleanConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::unique_ptr<EnvironmentView> BooleanFamily::realize(std::uint64_t seed) const {
  return std::make_unique<BooleanEnvironment>(config_, seed);
}

double BooleanFamily::decoupling_shape(double r, double h, double s) const {
  const int d = config_.d;
  const double exponent = config_.radius.kind == RadiusLaw::Kind::kPareto
                              ? -config_.radius.beta + d + 1
                              : -static_cast<double>(d + 2);
  return std::pow(r + 1.0, d) * (h + 1.0) * std::pow(std::max(s, 1.0), exponent);
}

}  // namespace rwre
