#pragma once

// Environment built from independent stationary renewal chains, one per
// site of Z^d. Each chain counts down to 0 and then jumps to a fresh
// interarrival time; the jump noise is split as W = Z*What + (1-Z)*Y so
// that Z = 1 marks a restart from the stationary law.

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"
#include "rwre/rng.hpp"

namespace rwre {

// Law of a non-negative integer interarrival time, stored as a finite pmf.
// Parametric laws with infinite support are cut where the tail drops below
// 1e-12 and renormalized; truncation_defect() is the mass removed.
class InterarrivalLaw {
 public:
  static InterarrivalLaw geometric(double q);  // mu(k) = (1-q) q^k
  static InterarrivalLaw dirac(std::int64_t k);
  static InterarrivalLaw uniform(std::int64_t a, std::int64_t b);
  static InterarrivalLaw from_pmf(std::vector<double> pmf);
  // "geometric 0.5", "dirac 0", "uniform 1 2", "pmf 0.2 0.3 0.5".
  static InterarrivalLaw parse(const std::string& text);

  const std::vector<double>& pmf() const { return pmf_; }
  double mass(std::int64_t k) const;
  double mean() const;
  // Untruncated masses and tails P(xi >= k); differ from the stored pmf
  // only for parametric laws with infinite support.
  double exact_mass(std::int64_t k) const;
  double exact_tail(std::int64_t k) const;
  double exact_mean() const;
  double truncation_defect() const { return defect_; }
  // Canonical text accepted by parse().
  const std::string& text() const { return text_; }

  // Declared finite moment order 1+beta; drives the residual-bias
  // diagnostic and the decoupling shape.
  double moment_order() const { return moment_order_; }
  void set_moment_order(double order);

  friend bool operator==(const InterarrivalLaw& a, const InterarrivalLaw& b) {
    return a.text_ == b.text_ && a.moment_order_ == b.moment_order_;
  }

 private:
  InterarrivalLaw(std::vector<double> pmf, double defect, std::string text);

  std::vector<double> pmf_;
  double defect_ = 0.0;
  double geometric_q_ = -1.0;
  std::string text_;
  double moment_order_ = 5.0;
};

// hat_mu(k) = P(xi >= k) / (E xi + 1).
std::vector<double> hat_mu(const InterarrivalLaw& mu);

// inf over the support of hat_mu of mu(k)/hat_mu(k); values within 1e-9 of
// 1 are reported as exactly 1.
double gamma_mu(const InterarrivalLaw& mu);

struct NoiseTriple {
  std::int64_t w_hat = 0;
  bool z = false;
  std::int64_t y = 0;

  std::int64_t w() const { return z ? w_hat : y; }
  friend bool operator==(const NoiseTriple&, const NoiseTriple&) = default;
};

// Per-site i.i.d. triples (What ~ hat_mu, Z ~ Bernoulli(gamma), Y ~
// (mu - gamma hat_mu)/(1 - gamma)).
class DrivingNoise {
 public:
  explicit DrivingNoise(const InterarrivalLaw& mu);

  NoiseTriple at(const Displacement& x, Coord t, std::uint64_t seed) const;
  NoiseTriple from_uniforms(double u_hat, double u_z, double u_y) const;

  double gamma() const { return gamma_; }
  const std::vector<double>& hat_law() const { return hat_; }
  // Law of Y; equal to mu when gamma = 1 (Y is then never used).
  const std::vector<double>& y_law() const { return y_; }
  // Negative mass clipped from mu - gamma hat_mu before renormalizing.
  double y_defect() const { return y_defect_; }

 private:
  double gamma_;
  std::vector<double> hat_;
  std::vector<double> y_;
  double y_defect_ = 0.0;
  DiscreteSampler hat_sampler_;
  DiscreteSampler y_sampler_;
};

struct RenewalConfig {
  int d = 1;
  int R = 1;
  InterarrivalLaw mu = InterarrivalLaw::geometric(0.5);
  int trunc_s = 32;
  std::int64_t K0 = 16;
  std::int64_t K_max = std::int64_t{1} << 22;
  int confirmations = 2;
  std::int64_t horizon = 100000;  // forward scan limit for T^x

  void validate() const;
};

// A certified stationary value together with the depth that certified it
// and the coupling-tail bound K^-(1+beta) on the residual bias.
struct ChainValue {
  std::int64_t value = 0;
  std::int64_t depth = 0;
  double residual_bias = 0.0;
};

// Stationary chain value at (x, t). Values are certified at block starts
// floor(t/K0)*K0 by backward coalescence and filled forward within blocks.
ChainValue omega_at(const Displacement& x, Coord t, const RenewalConfig& config,
                    std::uint64_t seed);

// Least t >= t0 + t^{x-x0} with omega(x,t) = 0 and Z(x,t+1) = 1, where
// t^y = 1 - ceil(|y|/R) for y != 0 and the lower limit is t0 for x = x0.
Coord T_x(const Displacement& x, const LatticePoint& anchor, const RenewalConfig& config,
          std::uint64_t seed);

bool eta_s_at(const LatticePoint& anchor, const RenewalConfig& config, std::uint64_t seed);

// Law of T^x - (lower scan limit): What + sum_{i<S-1} (Y_i + 1), S ~
// Geometric(gamma) on {1, 2, ...}; pmf on {0, ..., n_max}.
std::vector<double> scan_delay_pmf(const RenewalConfig& config, std::int64_t n_max);

// Exact log P(eta^s = 1) from column independence.
double log_eta_probability(const RenewalConfig& config, int s);
// Exact P(eta^{s_small} = 1, eta^{s_large} = 0), s_small <= s_large.
double truncation_gap(const RenewalConfig& config, int s_small, int s_large);

class RenewalEnvironment final : public EnvironmentView {
 public:
  RenewalEnvironment(RenewalConfig config, std::uint64_t seed);

  int dim() const override { return config_.d; }
  int range() const override { return config_.R; }
  std::int64_t omega(const LatticePoint& z) const override;
  bool eta(const LatticePoint& z) const override;

  ChainValue chain(const Displacement& x, Coord t) const;
  NoiseTriple noise(const Displacement& x, Coord t) const;
  Coord T_x(const Displacement& x, const LatticePoint& anchor) const;
  bool eta_s(const LatticePoint& anchor, int s) const;

  const RenewalConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

 private:
  struct BlockKey {
    Displacement x;
    Coord block;
    friend bool operator==(const BlockKey&, const BlockKey&) = default;
  };
  struct BlockKeyHash {
    std::size_t operator()(const BlockKey& k) const noexcept;
  };
  struct Block {
    std::vector<std::int64_t> values;
    std::int64_t depth;
  };

  const Block& block(const Displacement& x, Coord index) const;
  Block build_block(const Displacement& x, Coord index) const;
  std::int64_t certify(const Displacement& x, Coord t, std::int64_t* depth) const;

  RenewalConfig config_;
  std::uint64_t seed_;
  DrivingNoise noise_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<BlockKey, Block, BlockKeyHash> cache_;
};

class RenewalFamily final : public EnvironmentFamily {
 public:
  explicit RenewalFamily(RenewalConfig config);

  std::string name() const override { return "renewal"; }
  int dim() const override { return config_.d; }
  int range() const override { return config_.R; }
  std::unique_ptr<EnvironmentView> realize(std::uint64_t seed) const override;
  // (r+1+s)^d (h+1) s^{d-beta+1}, beta = moment_order - 1
  double decoupling_shape(double r, double h, double s) const override;

  const RenewalConfig& config() const { return config_; }

 private:
  RenewalConfig config_;
};

}  // namespace rwre
