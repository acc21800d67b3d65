#pragma once

// Boolean-percolation environment: Poisson balls in R^{d+1} with
// heavy-tailed radii. omega_z = 1 iff z is covered; eta^s_z = 1 iff no ball
// whose center is within s/2 of z meets both the future and past cones at z.

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

struct RadiusLaw {
  enum class Kind { kPareto, kDeterministic };

  Kind kind = Kind::kPareto;
  double rho0 = 0.5;  // Pareto scale
  double beta = 4.0;  // Pareto tail exponent
  double rho = 0.5;   // deterministic radius

  static RadiusLaw pareto(double rho0, double beta);
  static RadiusLaw deterministic(double rho);

  // P(radius >= r).
  double survival(double r) const;
  // Smallest r with survival(r) <= p, p in (0, 1].
  double inverse_survival(double p) const;
};

// Whether "a ball meets a cone" means it contains a lattice point of the
// discrete cone or merely intersects its real convex hull.
enum class ConeMode { kDiscrete, kContinuous };

struct BooleanConfig {
  int d = 1;
  int R = 1;
  double lambda = 0.3;
  RadiusLaw radius = RadiusLaw::pareto(0.5, 4.0);
  int trunc_s = 64;
  // Hard radius cap; 0 selects the radius where survival drops to 1e-9.
  double rho_max = 0.0;
  ConeMode cones = ConeMode::kDiscrete;
  // Re-keys the cell streams: the realization is translated by this vector.
  // Every coordinate must be a multiple of the coarsest cell side.
  LatticePoint cell_origin{};

  void validate() const;
  double effective_rho_max() const;
  // Radius mass above the cap, i.e. balls the sampler never produces.
  double radius_tail_mass() const;
};

struct BallRecord {
  std::array<double, kMaxSpatialDim> x{};
  double t = 0.0;
  double radius = 0.0;

  friend bool operator==(const BallRecord&, const BallRecord&) = default;
};

// Half-open real window prod [lo_i, hi_i); empty when any lo_i >= hi_i.
struct RealWindow {
  std::array<double, kMaxSpatialDim + 1> lo{};
  std::array<double, kMaxSpatialDim + 1> hi{};

  static RealWindow envelope(const BoxSpec& box);
  bool empty(int d) const;
};

// Radius classes [lo, hi) sampled on cells of side `side`; class j holds
// radii in [rho0 2^j, rho0 2^{j+1}) for the Pareto law.
struct RadiusClass {
  double lo = 0.0;
  double hi = 0.0;
  double mass = 0.0;  // probability a radius falls in the class
  Coord side = 1;
};

std::vector<RadiusClass> radius_classes(const BooleanConfig& config);

// All balls with centers in the real envelope of `window`.
std::vector<BallRecord> sample_balls(const BoxSpec& window, const BooleanConfig& config,
                                     std::uint64_t seed);
std::vector<BallRecord> sample_balls(const RealWindow& window, const BooleanConfig& config,
                                     std::uint64_t seed);

bool omega_at(const LatticePoint& z, const BooleanConfig& config, std::uint64_t seed);

bool ball_meets_cone(const BallRecord& ball, const LatticePoint& apex, int d, int R,
                     ConeDirection direction, ConeMode mode = ConeMode::kDiscrete);
bool ball_crosses_both_cones(const BallRecord& ball, const LatticePoint& z, int d, int R,
                             ConeMode mode = ConeMode::kDiscrete);

bool eta_s_at(const LatticePoint& z, const BooleanConfig& config, std::uint64_t seed);

// Distance from z to the nearest center of a ball that crosses both cones
// at z, among centers closer than max_distance; +inf if none. Then
// eta^s_z = 1 iff the result is >= s/2 (for s/2 <= max_distance).
double nearest_crossing_distance(const LatticePoint& z, const BooleanConfig& config,
                                 std::uint64_t seed, double max_distance);

// Analytic upper bound on P(eta_z != eta^s_z) plus the mass of crossing
// balls removed by the radius cap.
struct TruncationBudget {
  double truncation = 0.0;
  double radius_cap = 0.0;
  double total() const { return truncation + radius_cap; }
};
TruncationBudget truncation_budget(const BooleanConfig& config, double s);

// One realization with a read-through cell cache.
class BooleanEnvironment final : public EnvironmentView {
 public:
  BooleanEnvironment(BooleanConfig config, std::uint64_t seed);

  int dim() const override { return config_.d; }
  int range() const override { return config_.R; }
  std::int64_t omega(const LatticePoint& z) const override;
  bool eta(const LatticePoint& z) const override;
  BoxField eta_field(const BoxSpec& box) const override;

  double nearest_crossing_distance(const LatticePoint& z, double max_distance) const;
  const BooleanConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

 private:
  struct CellKey {
    int cls;
    std::array<Coord, kMaxSpatialDim + 1> cell;
    friend bool operator==(const CellKey&, const CellKey&) = default;
  };
  struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const noexcept;
  };

  const std::vector<BallRecord>& cell(int cls, const std::array<Coord, kMaxSpatialDim + 1>& c) const;

  BooleanConfig config_;
  std::uint64_t seed_;
  std::vector<RadiusClass> classes_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<CellKey, std::vector<BallRecord>, CellKeyHash> cache_;
};

class BooleanFamily final : public EnvironmentFamily {
 public:
  explicit BooleanFamily(BooleanConfig config);

  std::string name() const override { return "boolean"; }
  int dim() const override { return config_.d; }
  int range() const override { return config_.R; }
  std::unique_ptr<EnvironmentView> realize(std::uint64_t seed) const override;
  // (r+1)^d (h+1) s^{-beta+d+1}
  double decoupling_shape(double r, double h, double s) const override;

  const BooleanConfig& config() const { return config_; }

 private:
  BooleanConfig config_;
};

}  // namespace rwre
