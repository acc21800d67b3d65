#include "rwre/regeneration.hpp"

#include <cmath>
#include <string>

#include "rwre/errors.hpp"
#include "rwre/parallel.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

namespace {

std::unique_ptr<EnvironmentView> conditioned_environment(const EnvironmentFamily& family,
                                                         std::uint64_t seed, const BlockOptions& options,
                                                         std::int64_t* rejections) {
  if (!(options.acceptance_floor > 0.0 && options.acceptance_floor < 1.0)) {
    throw UsageError("acceptance_floor must lie in (0, 1)");
  }
  // Failing this many draws in a row has probability < e^-30 at the floor.
  const auto max_attempts = static_cast<std::int64_t>(std::ceil(30.0 / options.acceptance_floor));
  const LatticePoint origin{};
  for (std::int64_t attempt = 0; attempt < max_attempts; ++attempt) {
    auto env = family.realize(derive_seed(seed, label("env"), static_cast<std::uint64_t>(attempt)));
    if (env->eta(origin)) {
      *rejections = attempt;
      return env;
    }
  }
  throw DiagnosticsError("eta_0 = 1 acceptance rate below the floor " + std::to_string(options.acceptance_floor) +
                         " after " + std::to_string(max_attempts) + " environments");
}

}  // namespace

RegenerationBlock sample_block(const EnvironmentFamily& family, const JumpKernel& kernel,
                               std::uint64_t seed, const BlockOptions& options) {
  if (options.horizon < 1) throw UsageError("block horizon must be >= 1");
  if (family.dim() != kernel.dim()) throw UsageError("kernel and environment dimensions differ");
  RegenerationBlock block;
  block.seed = seed;
  const auto env = conditioned_environment(family, seed, options, &block.rejections);
  const std::uint64_t walk_seed = derive_seed(seed, label("walk"));
  LatticePoint z{};
  for (std::int64_t t = 1; t <= options.horizon; ++t) {
    z = step(z, *env, kernel, walk_seed);
    if (env->eta(z)) {
      block.T1 = t;
      block.disp = z.x;
      return block;
    }
  }
  block.T1 = options.horizon;
  block.disp = z.x;
  block.censored = true;
  return block;
}

std::vector<RegenerationBlock> sample_blocks(const EnvironmentFamily& family, const JumpKernel& kernel,
                                             std::size_t n, std::uint64_t seed,
                                             const BlockOptions& options, int jobs) {
  std::vector<RegenerationBlock> out(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    out[i] = sample_block(family, kernel, derive_seed(seed, label("block"), i), options);
  });
  return out;
}

LimitEstimates estimate_limits(const std::vector<RegenerationBlock>& blocks, int d, int resamples,
                               std::uint64_t seed, double confidence) {
  (void)Lattice(d);
  std::vector<const RegenerationBlock*> ok;
  LimitEstimates est;
  for (const auto& b : blocks) {
    if (b.censored) {
      ++est.n_censored;
    } else {
      ok.push_back(&b);
    }
  }
  if (ok.size() < 2) throw UsageError("estimate_limits: need at least 2 uncensored blocks");
  est.n_blocks = ok.size();

  // Returns v followed by sigma in column-major order.
  auto compute = [&](const std::vector<std::size_t>& idx) {
    Eigen::VectorXd sum_disp = Eigen::VectorXd::Zero(d);
    double sum_T = 0.0;
    for (std::size_t i : idx) {
      for (int k = 0; k < d; ++k) sum_disp(k) += static_cast<double>(ok[i]->disp[static_cast<std::size_t>(k)]);
      sum_T += static_cast<double>(ok[i]->T1);
    }
    const Eigen::VectorXd v = sum_disp / sum_T;
    const double n = static_cast<double>(idx.size());
    Eigen::VectorXd mean_c = Eigen::VectorXd::Zero(d);
    std::vector<Eigen::VectorXd> centered;
    centered.reserve(idx.size());
    for (std::size_t i : idx) {
      Eigen::VectorXd c(d);
      for (int k = 0; k < d; ++k) {
        c(k) = static_cast<double>(ok[i]->disp[static_cast<std::size_t>(k)]) - v(k) * static_cast<double>(ok[i]->T1);
      }
      mean_c += c;
      centered.push_back(std::move(c));
    }
    mean_c /= n;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& c : centered) cov += (c - mean_c) * (c - mean_c).transpose();
    cov /= (n - 1.0);
    cov /= (sum_T / n);
    cov = 0.5 * (cov + cov.transpose());
    std::vector<double> out(v.data(), v.data() + d);
    out.insert(out.end(), cov.data(), cov.data() + d * d);
    return out;
  };

  std::vector<std::size_t> all(ok.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto point = compute(all);
  est.v = Eigen::Map<const Eigen::VectorXd>(point.data(), d);
  est.sigma = Eigen::Map<const Eigen::MatrixXd>(point.data() + d, d, d);
  double sum_T = 0.0;
  for (const auto* b : ok) sum_T += static_cast<double>(b->T1);
  est.mean_T1 = sum_T / static_cast<double>(ok.size());

  const auto ci = bootstrap_percentile(ok.size(), resamples, seed, compute, confidence);
  est.v_lo.resize(d);
  est.v_hi.resize(d);
  est.sigma_lo.resize(d, d);
  est.sigma_hi.resize(d, d);
  for (int k = 0; k < d; ++k) {
    est.v_lo(k) = ci[static_cast<std::size_t>(k)].first;
    est.v_hi(k) = ci[static_cast<std::size_t>(k)].second;
  }
  for (int k = 0; k < d * d; ++k) {
    est.sigma_lo.data()[k] = ci[static_cast<std::size_t>(d + k)].first;
    est.sigma_hi.data()[k] = ci[static_cast<std::size_t>(d + k)].second;
  }
  return est;
}

std::vector<Eigen::VectorXd> direct_run(const EnvironmentFamily& family, const JumpKernel& kernel,
                                        std::int64_t t_final, std::size_t n_runs, std::uint64_t seed,
                                        int jobs) {
  if (t_final < 1) throw UsageError("direct_run: t_final must be >= 1");
  if (family.dim() != kernel.dim()) throw UsageError("kernel and environment dimensions differ");
  const int d = family.dim();
  std::vector<Eigen::VectorXd> out(n_runs);
  parallel_for(n_runs, jobs, [&](std::size_t i) {
    const std::uint64_t run_seed = derive_seed(seed, label("run"), i);
    const auto env = family.realize(derive_seed(run_seed, label("env")));
    const std::uint64_t walk_seed = derive_seed(run_seed, label("walk"));
    LatticePoint z{};
    for (std::int64_t t = 0; t < t_final; ++t) z = step(z, *env, kernel, walk_seed);
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x(k) = static_cast<double>(z.x[static_cast<std::size_t>(k)]);
    out[i] = std::move(x);
  });
  return out;
}

std::vector<Eigen::VectorXd> standardize(const std::vector<Eigen::VectorXd>& endpoints,
                                         std::int64_t t_final, const Eigen::VectorXd& v) {
  const double t = static_cast<double>(t_final);
  std::vector<Eigen::VectorXd> out;
  out.reserve(endpoints.size());
  for (const auto& x : endpoints) out.push_back((x - t * v) / std::sqrt(t));
  return out;
}

std::vector<RegenerationBlock> successive_hits(const EnvironmentFamily& family, const JumpKernel& kernel,
                                               std::size_t n_hits, std::uint64_t seed,
                                               const BlockOptions& options) {
  std::vector<RegenerationBlock> out;
  std::int64_t rejections = 0;
  const auto env = conditioned_environment(family, seed, options, &rejections);
  const std::uint64_t walk_seed = derive_seed(seed, label("walk"));
  LatticePoint z{};
  LatticePoint last = z;
  while (out.size() < n_hits) {
    RegenerationBlock b;
    b.seed = seed;
    b.rejections = out.empty() ? rejections : 0;
    std::int64_t t = 1;
    for (; t <= options.horizon; ++t) {
      z = step(z, *env, kernel, walk_seed);
      if (env->eta(z)) break;
    }
    b.T1 = std::min(t, options.horizon);
    for (std::size_t k = 0; k < z.x.size(); ++k) b.disp[k] = z.x[k] - last.x[k];
    b.censored = t > options.horizon;
    out.push_back(b);
    if (b.censored) break;
    last = z;
  }
  return out;
}

}  // namespace rwre
