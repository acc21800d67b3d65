#include "rwre/walk.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "rwre/errors.hpp"
#include "rwre/rng.hpp"

namespace rwre {

namespace {

std::size_t index_of(const std::vector<Displacement>& ys, const Displacement& y) {
  const auto it = std::find(ys.begin(), ys.end(), y);
  return static_cast<std::size_t>(it - ys.begin());
}

bool nearest_neighbour(const Displacement& y) {
  return std::all_of(y.begin(), y.end(), [](Coord c) { return c >= -1 && c <= 1; });
}

}  // namespace

JumpKernel::JumpKernel(std::string name, int d, int R,
                       std::map<std::int64_t, std::vector<double>> per_state,
                       std::optional<std::vector<double>> fallback)
    : name_(std::move(name)), d_(Lattice(d).dim()), R_(R) {
  if (R < 1) throw UsageError("kernel.R: range must be a positive integer");
  displacements_ = box_displacements(d_, R_);
  if (per_state.empty() && !fallback) throw UsageError("kernel: no jump law given");
  kappa_ = 1.0;
  auto floor_of = [&](const Table& t) {
    for (std::size_t i = 0; i < displacements_.size(); ++i) {
      if (nearest_neighbour(displacements_[i])) kappa_ = std::min(kappa_, t.pmf[i]);
    }
  };
  for (auto& [state, pmf] : per_state) {
    auto [it, ok] = per_state_.emplace(state, make_table(std::move(pmf)));
    floor_of(it->second);
  }
  if (fallback) {
    fallback_ = make_table(std::move(*fallback));
    floor_of(*fallback_);
  }
}

JumpKernel::Table JumpKernel::make_table(std::vector<double> pmf) const {
  if (pmf.size() != displacements_.size()) {
    throw UsageError("kernel: pmf must have (2R+1)^d = " + std::to_string(displacements_.size()) + " entries");
  }
  Table t;
  double acc = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw UsageError("kernel: negative jump probability");
    acc += p;
    t.cdf.push_back(acc);
  }
  if (std::abs(acc - 1.0) > 1e-12) throw UsageError("kernel: jump law must sum to 1 within 1e-12");
  t.pmf = std::move(pmf);
  return t;
}

JumpKernel JumpKernel::drift(double kappa, int R) {
  if (!(kappa > 0.0 && kappa <= 1.0 / 3.0)) throw UsageError("kernel.kappa: drift kernel needs 0 < kappa <= 1/3");
  const auto ys = box_displacements(1, R);
  std::vector<double> zero(ys.size(), 0.0), other(ys.size(), 0.0);
  const auto at = [&](Coord y) { return index_of(ys, Displacement{y, 0, 0}); };
  zero[at(-1)] = kappa;
  zero[at(0)] = kappa;
  zero[at(1)] = 1.0 - 2.0 * kappa;
  other[at(-1)] = 1.0 - 2.0 * kappa;
  other[at(0)] = kappa;
  other[at(1)] = kappa;
  return JumpKernel("drift", 1, R, {{0, zero}}, other);
}

JumpKernel JumpKernel::lazy(int d, int R) {
  const auto ys = box_displacements(Lattice(d).dim(), R);
  std::vector<double> pmf(ys.size(), 0.0);
  const double neighbours = std::pow(3.0, d) - 1.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!nearest_neighbour(ys[i])) continue;
    pmf[i] = ys[i] == Displacement{} ? 0.5 : 0.5 / neighbours;
  }
  return JumpKernel("lazy", d, R, {}, pmf);
}

JumpKernel JumpKernel::stay_put(int d, int R) {
  const auto ys = box_displacements(Lattice(d).dim(), R);
  std::vector<double> pmf(ys.size(), 0.0);
  pmf[index_of(ys, Displacement{})] = 1.0;
  return JumpKernel("stay", d, R, {}, pmf);
}

const JumpKernel::Table& JumpKernel::table(std::int64_t state) const {
  const auto it = per_state_.find(state);
  if (it != per_state_.end()) return it->second;
  if (fallback_) return *fallback_;
  throw UsageError("kernel: unknown environment state " + std::to_string(state));
}

const std::vector<double>& JumpKernel::pmf(std::int64_t state) const { return table(state).pmf; }

Displacement JumpKernel::jump(std::int64_t state, double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw UsageError("jump: u must lie in [0, 1)");
  const Table& t = table(state);
  auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), u);
  // Rounding can leave cdf.back() a hair below 1; fall back to the last
  // displacement carrying mass.
  std::size_t i = it == t.cdf.end() ? t.cdf.size() - 1 : static_cast<std::size_t>(it - t.cdf.begin());
  while (t.pmf[i] == 0.0 && i > 0) --i;
  return displacements_[i];
}

std::vector<double> JumpKernel::mean_step(std::int64_t state) const {
  const Table& t = table(state);
  std::vector<double> m(static_cast<std::size_t>(d_), 0.0);
  for (std::size_t i = 0; i < displacements_.size(); ++i) {
    for (int k = 0; k < d_; ++k) {
      m[static_cast<std::size_t>(k)] += t.pmf[i] * static_cast<double>(displacements_[i][static_cast<std::size_t>(k)]);
    }
  }
  return m;
}

double site_uniform(const LatticePoint& z, std::uint64_t seed) {
  const std::int64_t words[] = {z.x[0], z.x[1], z.x[2], z.t};
  CounterRng rng(seed, hash_words(label("walk.uniform"), std::span<const std::int64_t>(words)));
  return rng.uniform();
}

LatticePoint Trajectory::end() const {
  LatticePoint z = start;
  for (const auto& y : steps) {
    for (std::size_t i = 0; i < y.size(); ++i) z.x[i] += y[i];
    ++z.t;
  }
  return z;
}

std::vector<LatticePoint> Trajectory::sites() const {
  std::vector<LatticePoint> out;
  out.reserve(steps.size() + 1);
  LatticePoint z = start;
  out.push_back(z);
  for (const auto& y : steps) {
    for (std::size_t i = 0; i < y.size(); ++i) z.x[i] += y[i];
    ++z.t;
    out.push_back(z);
  }
  return out;
}

AllowedPath Trajectory::path(int R) const {
  AllowedPath p;
  p.start_time = start.t;
  p.sites = sites();
  p.lipschitz = R;
  return p;
}

LatticePoint step(const LatticePoint& z, const EnvironmentView& env, const JumpKernel& kernel,
                  std::uint64_t seed) {
  std::int64_t state = 0;
  try {
    state = env.omega(z);
  } catch (const CensoredError& e) {
    throw CensoredError(std::string(e.what()) + " (walk at x0=" + std::to_string(z.x[0]) +
                            ", t=" + std::to_string(z.t) + ")",
                        e.partial_value(), e.budget_used());
  }
  const Displacement y = kernel.jump(state, site_uniform(z, seed));
  LatticePoint next = z;
  for (std::size_t i = 0; i < y.size(); ++i) next.x[i] = checked_add(z.x[i], y[i]);
  next.t = checked_add(z.t, 1);
  return next;
}

Trajectory simulate(const LatticePoint& start, std::int64_t steps, const EnvironmentView& env,
                    const JumpKernel& kernel, std::uint64_t seed) {
  if (steps < 0) throw UsageError("simulate: steps must be >= 0");
  if (env.dim() != kernel.dim()) throw UsageError("simulate: kernel and environment dimensions differ");
  Lattice(kernel.dim()).check(start);
  Trajectory tr;
  tr.start = start;
  tr.steps.reserve(static_cast<std::size_t>(steps));
  LatticePoint z = start;
  for (std::int64_t k = 0; k < steps; ++k) {
    const LatticePoint next = step(z, env, kernel, seed);
    Displacement y{};
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = next.x[i] - z.x[i];
    tr.steps.push_back(y);
    z = next;
  }
  return tr;
}

}  // namespace rwre
