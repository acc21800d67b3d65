#pragma once

// Walks driven by a dynamic environment through the graphical
// construction: the step out of z is g(omega_z, U_z), where U_z is a
// per-site uniform and g inverts the cumulative jump law.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/lattice.hpp"

namespace rwre {

class JumpKernel {
 public:
  // pmf tables are indexed like box_displacements(d, R). States listed in
  // `per_state` use their own table; other states use `fallback` when
  // given and are a usage error otherwise.
  JumpKernel(std::string name, int d, int R, std::map<std::int64_t, std::vector<double>> per_state,
             std::optional<std::vector<double>> fallback);

  // d = 1. State 0: (kappa, kappa, 1-2kappa) on (-1, 0, 1); other states
  // the mirror image (1-2kappa, kappa, kappa).
  static JumpKernel drift(double kappa, int R = 1);
  // Ignores omega: stays with probability 1/2, otherwise uniform over the
  // non-zero y in [-1, 1]^d.
  static JumpKernel lazy(int d, int R = 1);
  // p(s, 0) = 1 for every state. Not elliptic; only for controls.
  static JumpKernel stay_put(int d, int R = 1);

  const std::string& name() const { return name_; }
  int dim() const { return d_; }
  int range() const { return R_; }
  // min over y in [-1, 1]^d and over all states of p(s, y).
  double kappa() const { return kappa_; }
  const std::vector<Displacement>& displacements() const { return displacements_; }

  const std::vector<double>& pmf(std::int64_t state) const;
  // The y whose half-open interval [cum(y), cum(y) + p(s,y)) holds u.
  Displacement jump(std::int64_t state, double u) const;
  // Mean step and step covariance under p(state, .).
  std::vector<double> mean_step(std::int64_t state) const;

 private:
  struct Table {
    std::vector<double> pmf;
    std::vector<double> cdf;
  };
  Table make_table(std::vector<double> pmf) const;
  const Table& table(std::int64_t state) const;

  std::string name_;
  int d_;
  int R_;
  std::vector<Displacement> displacements_;
  std::map<std::int64_t, Table> per_state_;
  std::optional<Table> fallback_;
  double kappa_ = 0.0;
};

// Per-site uniform U_z keyed by (seed, z).
double site_uniform(const LatticePoint& z, std::uint64_t seed);

struct Trajectory {
  LatticePoint start;
  std::vector<Displacement> steps;

  LatticePoint end() const;
  std::vector<LatticePoint> sites() const;
  AllowedPath path(int R) const;
};

// Z_{t+1} = Z_t + (g(omega(Z_t), U_{Z_t}), 1).
LatticePoint step(const LatticePoint& z, const EnvironmentView& env, const JumpKernel& kernel,
                  std::uint64_t seed);

Trajectory simulate(const LatticePoint& start, std::int64_t steps, const EnvironmentView& env,
                    const JumpKernel& kernel, std::uint64_t seed);

}  // namespace rwre
