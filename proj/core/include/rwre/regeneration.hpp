#pragma once

// Regeneration blocks: each block is drawn on a fresh environment
// conditioned on eta_0 = 1 (by rejection), then the walk runs until it
// first stands on a site with eta = 1.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rwre/environment.hpp"
#include "rwre/walk.hpp"

namespace rwre {

struct RegenerationBlock {
  std::int64_t T1 = 0;
  Displacement disp{};
  bool censored = false;
  std::int64_t rejections = 0;  // environments discarded before eta_0 = 1
  std::uint64_t seed = 0;
};

struct BlockOptions {
  std::int64_t horizon = 100000;
  // Below this estimated acceptance rate sample_block gives up.
  double acceptance_floor = 1e-4;
};

RegenerationBlock sample_block(const EnvironmentFamily& family, const JumpKernel& kernel,
                               std::uint64_t seed, const BlockOptions& options = {});

// Block i uses derive_seed(seed, "block", i).
std::vector<RegenerationBlock> sample_blocks(const EnvironmentFamily& family, const JumpKernel& kernel,
                                             std::size_t n, std::uint64_t seed,
                                             const BlockOptions& options = {}, int jobs = 1);

struct LimitEstimates {
  Eigen::VectorXd v;      // spatial speed
  Eigen::MatrixXd sigma;  // CLT covariance
  Eigen::VectorXd v_lo, v_hi;
  Eigen::MatrixXd sigma_lo, sigma_hi;
  double mean_T1 = 0.0;
  std::size_t n_blocks = 0;
  std::size_t n_censored = 0;
};

// v = sum disp / sum T1; sigma = sample covariance of (disp - v T1) over
// mean T1. Censored blocks are counted but excluded.
LimitEstimates estimate_limits(const std::vector<RegenerationBlock>& blocks, int d,
                               int resamples = 2000, std::uint64_t seed = 0,
                               double confidence = 0.95);

// Terminal positions X_t of n_runs independent (environment, walk) pairs
// under the unconditioned law. Run i uses derive_seed(seed, "run", i).
std::vector<Eigen::VectorXd> direct_run(const EnvironmentFamily& family, const JumpKernel& kernel,
                                        std::int64_t t_final, std::size_t n_runs, std::uint64_t seed,
                                        int jobs = 1);

// (X_t - t v) / sqrt(t).
std::vector<Eigen::VectorXd> standardize(const std::vector<Eigen::VectorXd>& endpoints,
                                         std::int64_t t_final, const Eigen::VectorXd& v);

// Successive eta-hits of ONE walk in ONE environment conditioned on
// eta_0 = 1, without resampling. Increments are not guaranteed i.i.d.;
// this only measures how far from i.i.d. they are.
std::vector<RegenerationBlock> successive_hits(const EnvironmentFamily& family, const JumpKernel& kernel,
                                               std::size_t n_hits, std::uint64_t seed,
                                               const BlockOptions& options = {});

}  // namespace rwre
