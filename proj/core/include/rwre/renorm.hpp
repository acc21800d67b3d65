#pragma once

// Trap sets, threatened points and the minimum number of threats along
// allowed paths, plus Monte Carlo estimators for the multiscale events.

#include <cstdint>
#include <memory>
#include <unordered_set>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/stats.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct ScaleLadder {
  int k_min = 1;
  int k_max = 4;

  static Coord L(int k);  // 4^k
  void validate() const;
};

// Either an explicit finite set or {z : eta_z = 1} over a realization.
class TrapSet {
 public:
  static TrapSet explicit_points(int d, std::vector<LatticePoint> points);
  // `env` must outlive the trap set.
  static TrapSet from_environment(const EnvironmentView& env);

  int dim() const { return d_; }
  bool contains(const LatticePoint& z) const;
  // Indicator of the trap set over a box.
  BoxField field(const BoxSpec& box) const;
  // The explicit points, or nullptr for an environment-backed set.
  const std::vector<LatticePoint>* points() const { return env_ ? nullptr : &points_; }

 private:
  int d_ = 1;
  std::vector<LatticePoint> points_;
  std::unordered_set<LatticePoint, LatticePointHash> lookup_;
  const EnvironmentView* env_ = nullptr;
};

// Some trap (x', t') with t <= t' <= t + H and |x' - x|_inf <= t' - t.
bool is_threatened(const LatticePoint& z, int H, const TrapSet& traps);

// Number of path times in HZ at which the path's site is H-threatened.
std::int64_t count_threats(const AllowedPath& path, int H, const TrapSet& traps);

// Minimum of count_threats over all R-allowed paths of the given length
// starting in `start_region` (all points at one time), by backward dynamic
// programming over time layers.
std::int64_t min_threats_over(std::int64_t length, int H, const TrapSet& traps,
                              const std::vector<LatticePoint>& start_region, int R,
                              std::int64_t max_cells = 400'000'000);
// Path length J*H.
std::int64_t min_threats(int J, int H, const TrapSet& traps, const std::vector<LatticePoint>& start_region,
                         int R);
// Exhaustive enumeration of every path; ResourceError beyond max_paths.
std::int64_t min_threats_brute_force(int J, int H, const TrapSet& traps,
                                     const std::vector<LatticePoint>& start_region, int R,
                                     std::int64_t max_paths = 50'000'000);

// Small random M_J instance in d = 1: R in {1, 2}, J*H <= 8, at most 6
// traps near the reachable region, start region of 1 to 3 sites at time 0.
struct MjInstance {
  int R = 1;
  int J = 1;
  int H = 1;
  TrapSet traps;
  std::vector<LatticePoint> start;
};
MjInstance random_mj_instance(std::uint64_t seed);

struct FallOnTrapReport {
  std::int64_t M_J = 0;
  double bound = 1.0;      // (1 - kappa^H)^{M_J}
  double empirical = 0.0;  // P(T^0 > JH) over walks
  double se = 0.0;         // binomial SE evaluated at the bound
  std::int64_t n = 0;
  bool pass = true;        // empirical <= bound + 3 se
};

// Walks on one fixed realization; T^0 = inf{t > 0 : Z_t in Sigma} with
// Sigma = {eta = 1}. Walk i uses derive_seed(seed, "walk", i).
FallOnTrapReport verify_fall_on_trap(const EnvironmentView& env, const JumpKernel& kernel, int J, int H,
                                     std::int64_t n_walks, std::uint64_t seed);

// q_k = P(eta_{(0,t)} = 0 for t = 0..L_k-1) for k in the ladder (k = 0
// allowed), estimated on nested samples: each realization is scanned up to
// the first eta = 1, so the estimates are monotone in k.
std::vector<Estimate> estimate_qk(const ScaleLadder& ladder, const EnvironmentFamily& family,
                                  std::int64_t n_samples, std::uint64_t seed, int jobs = 1);

// P(some R-allowed path of length L_k - 1 from [0, L_k-1]^d x {0} has
// fewer than k^2 threats), with Wilson interval.
Estimate estimate_A_kH(int k, int H, const EnvironmentFamily& family, int R, std::int64_t n_samples,
                       std::uint64_t seed, int jobs = 1);

// P(some z in [0, L-1]^d x {0} is not L-threatened).
Estimate estimate_unthreatened_box(Coord L, const EnvironmentFamily& family, std::int64_t n_samples,
                                   std::uint64_t seed, int jobs = 1);

}  // namespace rwre
